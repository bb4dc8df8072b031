#pragma once

#include <map>
#include <string>
#include <string_view>

#include "qpo/errors.hpp"

namespace qpo {

// Every numerical threshold used by checks and tests lives here. The CLI can
// override any field by name (`--tol endpoint=1e-8`).
struct Tolerances {
    double casimir_closed = 1e-9;       // relative Casimir spread, closed-form path
    double casimir_numeric = 1e-6;      // relative Casimir spread, RK4 path at dt = 1e-4
    double segment_invariant = 1e-12;   // relative drift of x2^2 + u x1^2 + 1/x1^2 within a segment
    double round_trip = 1e-12;          // x_from_z o z_from_x
    double group_property = 1e-10;      // propagate(t1 + t2) vs composition
    double endpoint = 1e-6;             // distance to (gamma, 0) after simulation
    double root_residual = 1e-10;       // |l(s) - r(s)| / r(s)
    double geometry = 1e-9;             // (x2/x1)^2 vs s at switching points, relative
    double time_identity = 1e-12;       // total_time vs composed segment times
    double acos_window = 1e-12;         // how far an acos argument may stray outside [-1, 1]
    double tie = 1e-12;                 // candidates closer than this count as equal time
    double x1_floor = 1e-12;            // RK4 aborts below this x1

    static Tolerances defaults() { return {}; }

    /// Looks a field up by its name; throws domain_error on unknown names.
    double& at(std::string_view name)
    {
        if (name == "casimir_closed") return casimir_closed;
        if (name == "casimir_numeric") return casimir_numeric;
        if (name == "segment_invariant") return segment_invariant;
        if (name == "round_trip") return round_trip;
        if (name == "group_property") return group_property;
        if (name == "endpoint") return endpoint;
        if (name == "root_residual") return root_residual;
        if (name == "geometry") return geometry;
        if (name == "time_identity") return time_identity;
        if (name == "acos_window") return acos_window;
        if (name == "tie") return tie;
        if (name == "x1_floor") return x1_floor;
        throw domain_error("unknown tolerance name '" + std::string(name) + "'");
    }

    Tolerances with(const std::map<std::string, double>& overrides) const
    {
        Tolerances out = *this;
        for (const auto& [name, value] : overrides) {
            if (!(value > 0.0)) throw domain_error("tolerance '" + name + "' must be positive");
            out.at(name) = value;
        }
        return out;
    }
};

}  // namespace qpo
