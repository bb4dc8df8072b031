#pragma once

// JSON and CSV encodings of protocols, candidates, trajectories and bound reports.

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <span>
#include <string>

#include <json.hpp>

#include "qpo/bounds.hpp"
#include "qpo/dynamics.hpp"
#include "qpo/errors.hpp"
#include "qpo/extremal.hpp"

namespace qpo::io {

using nlohmann::json;

/// Digits written for every number in CSV output; JSON uses round-trip precision.
inline constexpr int csv_digits = 17;

inline json to_json(const Protocol& p)
{
    json segs = json::array();
    for (const auto& s : p.segments) segs.push_back({{"u", s.u}, {"duration", s.duration}});
    return {{"gamma", p.gamma}, {"segments", segs}, {"total_time", p.total_time}};
}

inline Protocol protocol_from_json(const json& j)
{
    try {
        Protocol p;
        p.gamma = j.at("gamma").get<double>();
        for (const auto& s : j.at("segments")) p.segments.push_back({s.at("u").get<double>(), s.at("duration").get<double>()});
        p.total_time = j.at("total_time").get<double>();
        p.validate(1e-9);
        return p;
    } catch (const json::exception& e) {
        throw domain_error(std::string("protocol JSON: ") + e.what());
    }
}

inline json to_json(const ExtremalCandidate& c)
{
    return {{"n", c.n},
            {"branch", to_string(c.branch)},
            {"s", c.s},
            {"times", {{"tau_i", c.times.tau_i}, {"tau_u1", c.times.tau_u1}, {"tau_u2", c.times.tau_u2}, {"tau_f", c.times.tau_f}}},
            {"total_time", c.total_time}};
}

inline ExtremalCandidate candidate_from_json(const json& j)
{
    try {
        ExtremalCandidate c;
        c.n = j.at("n").get<int>();
        const auto br = j.at("branch").get<std::string>();
        if (br != "+" && br != "-") throw domain_error("candidate JSON: branch must be \"+\" or \"-\"");
        c.branch = br == "+" ? SignBranch::Plus : SignBranch::Minus;
        c.s = j.at("s").get<double>();
        const auto& t = j.at("times");
        c.times = {t.at("tau_i").get<double>(), t.at("tau_u1").get<double>(), t.at("tau_u2").get<double>(),
                   t.at("tau_f").get<double>()};
        c.total_time = j.at("total_time").get<double>();
        return c;
    } catch (const json::exception& e) {
        throw domain_error(std::string("candidate JSON: ") + e.what());
    }
}

namespace detail {
inline json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
}  // namespace detail

inline json to_json(const BoundReport& r)
{
    return {{"gamma", r.gamma},
            {"N_lo", r.n_lo},
            {"N_hi", r.n_hi},
            {"N", r.n ? json(*r.n) : json(nullptr)},
            {"limiting_time", detail::number_or_null(r.limiting_time)},
            {"exact_time", detail::number_or_null(r.exact_time)},
            {"relative_gap", detail::number_or_null(r.relative_gap)},
            {"s", detail::number_or_null(r.s)},
            {"s_lower", detail::number_or_null(r.s_lower)},
            {"s_upper", detail::number_or_null(r.s_upper)},
            {"endpoint_error", detail::number_or_null(r.endpoint_error)},
            {"status", r.status}};
}

namespace detail {
struct PrecisionGuard {
    std::ostream& os;
    std::streamsize old_precision;
    std::ios_base::fmtflags old_flags;
    explicit PrecisionGuard(std::ostream& o) : os(o), old_precision(o.precision()), old_flags(o.flags())
    {
        os << std::setprecision(csv_digits) << std::defaultfloat;
    }
    ~PrecisionGuard()
    {
        os.precision(old_precision);
        os.flags(old_flags);
    }
};
}  // namespace detail

/// Header `t,x1,x2,u`, one row per sample.
inline void write_trajectory_csv(std::ostream& os, std::span<const TrajectorySample> samples, double time_scale = 1.0)
{
    detail::PrecisionGuard guard(os);
    os << "t,x1,x2,u\n";
    for (const auto& s : samples) os << s.t * time_scale << ',' << s.state.x1 << ',' << s.state.x2 << ',' << s.u << '\n';
}

/// Header `gamma,N,exact_time,limiting_time,relative_gap`; missing values are empty fields.
inline void write_bounds_csv(std::ostream& os, std::span<const BoundReport> reports)
{
    detail::PrecisionGuard guard(os);
    auto field = [&](double v) {
        if (std::isfinite(v)) os << v;
    };
    os << "gamma,N,exact_time,limiting_time,relative_gap\n";
    for (const auto& r : reports) {
        os << r.gamma << ',';
        if (r.n) os << *r.n;
        os << ',';
        field(r.exact_time);
        os << ',';
        field(r.limiting_time);
        os << ',';
        field(r.relative_gap);
        os << '\n';
    }
}

/// Header `gamma,two_ln_gamma,optimal_n,optimal_time,N,extremal_N_time`.
inline void write_sweep_csv(std::ostream& os, std::span<const ScalingPoint> pts)
{
    detail::PrecisionGuard guard(os);
    os << "gamma,two_ln_gamma,optimal_n,optimal_time,N,extremal_N_time\n";
    for (const auto& p : pts) {
        os << p.gamma << ',' << p.log_temperature_ratio << ',' << p.optimal_n << ',' << p.optimal_time << ',';
        if (p.n_window) os << *p.n_window;
        os << ',';
        if (std::isfinite(p.extremal_n_time)) os << p.extremal_n_time;
        os << '\n';
    }
}

}  // namespace qpo::io
