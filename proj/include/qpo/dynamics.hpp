#pragma once

// Core dynamics of the quantum parametric oscillator.
//
// The moment vector z = (<m q^2>, <p^2/m>, <qp + pq>) of a thermal ensemble in
// a harmonic trap of controlled frequency w(t) is mapped to the width variable
// b of the Ermakov equation, and after the rescaling x1 = b, x2 = b'/w_h,
// u = w^2/w_h^2, t -> w_h t to the planar system
//
//     x1' = x2,    x2' = -u x1 + 1/x1^3.
//
// For constant u the quantity c = x2^2 + u x1^2 + 1/x1^2 is conserved and
// y = x1^2 is a harmonic oscillation  y'' = 2c - 4u y  about c/(2u) at angular
// frequency 2 sqrt(u). propagate_segment evaluates that motion in closed form.

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "qpo/config.hpp"
#include "qpo/errors.hpp"
#include "qpo/wide.hpp"

namespace qpo {

/// Dimensional description of the trap and the hot bath. Natural units by default.
struct PhysicalParams {
    double omega_c = 0.0;
    double omega_h = 0.0;
    double T_h = 0.0;
    double hbar = 1.0;
    double k_b = 1.0;
    double mass = 1.0;

    void validate() const
    {
        if (!(omega_c > 0.0) || !(omega_h > omega_c) || !std::isfinite(omega_h))
            throw domain_error("PhysicalParams: need 0 < omega_c < omega_h");
        if (!(T_h > 0.0) || !(hbar > 0.0) || !(k_b > 0.0) || !(mass > 0.0))
            throw domain_error("PhysicalParams: T_h, hbar, k_b and mass must be positive");
    }

    /// sqrt(omega_h / omega_c)
    double gamma() const { return std::sqrt(omega_h / omega_c); }
};

/// Largest gamma for which the library promises double-precision results.
inline constexpr double max_supported_gamma = 1e3;

/// The dimensionless minimum-time problem: steer (1, 0) to (gamma, 0) with
/// u in [u1, u2] = [gamma^-4, 1].
class NormalizedProblem {
public:
    static NormalizedProblem from_gamma(double gamma)
    {
        if (!(gamma > 1.0) || !std::isfinite(gamma))
            throw domain_error("NormalizedProblem: gamma must satisfy gamma > 1 (got " + std::to_string(gamma) + ")");
        if (gamma > max_supported_gamma)
            throw domain_error("NormalizedProblem: gamma above 1e3 exceeds double-precision guarantees");
        return NormalizedProblem(gamma);
    }

    static NormalizedProblem from_physical(const PhysicalParams& p)
    {
        p.validate();
        return from_gamma(p.gamma());
    }

    double gamma() const { return gamma_; }
    double u1() const { return u1_; }
    double u2() const { return 1.0; }
    /// Segment constant of the first arc, through (1, 0) under u1.
    double c1() const { return u1_ + 1.0; }
    /// Segment constant of the last arc, through (gamma, 0) under u2.
    double c() const { return gamma_ * gamma_ + 1.0 / (gamma_ * gamma_); }

private:
    explicit NormalizedProblem(double gamma)
        : gamma_(gamma), u1_(1.0 / ((gamma * gamma) * (gamma * gamma)))
    {
    }

    double gamma_;
    double u1_;
};

struct PhaseState {
    double x1 = 1.0;
    double x2 = 0.0;
};

struct ZState {
    double z1 = 0.0;
    double z2 = 0.0;
    double z3 = 0.0;
};

struct Segment {
    double u = 1.0;
    double duration = 0.0;
};

/// Piecewise-constant control on (0, total_time) in normalized time. The
/// frequency jumps at t = 0 and t = total_time are not represented; x is
/// continuous across them.
struct Protocol {
    double gamma = 1.0;
    std::vector<Segment> segments;
    double total_time = 0.0;

    static Protocol from_segments(double gamma, std::vector<Segment> segments)
    {
        Protocol p{gamma, std::move(segments), 0.0};
        for (const auto& s : p.segments) p.total_time += s.duration;
        p.validate();
        return p;
    }

    /// Durations positive, total consistent, and (given a problem) controls within [u1, u2].
    void validate(double total_rel_tol = 1e-12) const
    {
        double sum = 0.0;
        for (const auto& s : segments) {
            if (!(s.duration > 0.0) || !std::isfinite(s.duration))
                throw domain_error("Protocol: segment durations must be positive and finite");
            if (!(s.u > 0.0) || !std::isfinite(s.u))
                throw domain_error("Protocol: segment controls must be positive");
            sum += s.duration;
        }
        if (std::abs(sum - total_time) > total_rel_tol * std::max(1.0, std::abs(sum)))
            throw domain_error("Protocol: total_time does not equal the sum of segment durations");
    }

    void validate_bounds(const NormalizedProblem& prob) const
    {
        validate();
        const double slack = 1e-15;
        for (const auto& s : segments)
            if (s.u < prob.u1() * (1.0 - slack) || s.u > prob.u2() * (1.0 + slack))
                throw domain_error("Protocol: control value outside [u1, u2]");
    }
};

struct TrajectorySample {
    double t = 0.0;
    PhaseState state;
    double u = 1.0;
};

// ---------------------------------------------------------------------------
// Thermodynamics and conversions

/// Mean energy of a thermal oscillator, (hbar w / 2) coth(hbar w / (2 k_b T)).
inline double thermal_energy(double omega, double temperature, double hbar = 1.0, double k_b = 1.0)
{
    const double arg = hbar * omega / (2.0 * k_b * temperature);
    return 0.5 * hbar * omega / std::tanh(arg);
}

/// E0, the mean energy of the initial equilibrium state at (omega_h, T_h).
inline double initial_energy(const PhysicalParams& p)
{
    p.validate();
    return thermal_energy(p.omega_h, p.T_h, p.hbar, p.k_b);
}

inline ZState thermal_initial_z(const PhysicalParams& p)
{
    const double e0 = initial_energy(p);
    return {e0 / (p.omega_h * p.omega_h), e0, 0.0};
}

/// z1 z2 - z3^2 / 4, conserved by the moment dynamics.
inline double casimir(const ZState& z) { return z.z1 * z.z2 - 0.25 * z.z3 * z.z3; }

/// Mean energy (w^2 z1 + z2) / 2 at instantaneous frequency w.
inline double energy(const ZState& z, double omega) { return 0.5 * (omega * omega * z.z1 + z.z2); }

inline PhaseState x_from_z(const ZState& z, const PhysicalParams& p)
{
    if (!(z.z1 > 0.0)) throw domain_error("x_from_z: z1 must be positive");
    const double e0 = initial_energy(p);
    return {std::sqrt(z.z1 / e0) * p.omega_h, z.z3 / (2.0 * std::sqrt(z.z1 * e0))};
}

/// Inverse of x_from_z. b'' is eliminated through the Ermakov equation, so the
/// result does not depend on the control active at that instant.
inline ZState z_from_x(const PhaseState& s, const PhysicalParams& p)
{
    const double e0 = initial_energy(p);
    const double wh2 = p.omega_h * p.omega_h;
    return {e0 / wh2 * s.x1 * s.x1, e0 * (s.x2 * s.x2 + 1.0 / (s.x1 * s.x1)), 2.0 * e0 * s.x1 * s.x2 / p.omega_h};
}

/// Temperature of the thermal state with mean energy e_f at frequency omega_c.
inline double effective_temperature(double e_f, const PhysicalParams& p)
{
    p.validate();
    const double ground = 0.5 * p.hbar * p.omega_c;
    if (!(e_f >= ground)) throw domain_error("effective_temperature: energy below the ground state hbar*omega_c/2");
    const double q = e_f / ground;
    if (q == 1.0) return 0.0;
    // arcoth(q) = atanh(1/q) = log1p(2/(q-1)) / 2
    const double arcoth = 0.5 * std::log1p(2.0 / (q - 1.0));
    return p.hbar * p.omega_c / (2.0 * p.k_b * arcoth);
}

// ---------------------------------------------------------------------------
// Propagation

/// x2^2 + u x1^2 + 1/x1^2, constant along a segment of constant u.
inline double segment_invariant(const PhaseState& s, double u)
{
    return s.x2 * s.x2 + u * s.x1 * s.x1 + 1.0 / (s.x1 * s.x1);
}

namespace detail {

/// Exact flow of the planar system for constant u > 0.
///
/// y = x1^2 oscillates between y_min = 2/(c + D) and y_max = (c + D)/(2u),
/// D = sqrt(c^2 - 4u), as  y(t) = y_min + (y_max - y_min) sin^2(h0 + sqrt(u) t).
/// Anchoring at the turning points instead of the centre c/(2u) keeps the
/// small-x1 passages accurate when u is tiny and the centre is huge.
template <class T>
void propagate_in(T& x1, T& x2, T u, T duration)
{
    const T y0 = x1 * x1;
    const T v2 = x2 * x2;
    const T root_u = xm::sqrt(u);
    const T c = v2 + u * y0 + T(1) / y0;

    // c^2 - 4u written as a sum of squares.
    const T eq_offset = (root_u * y0 - T(1)) * (root_u * y0 + T(1)) / y0;
    const T disc = v2 * (v2 + T(2) * u * y0 + T(2) / y0) + eq_offset * eq_offset;
    const T d = xm::sqrt(disc);
    const T y_min = T(2) / (c + d);
    const T y_max = (c + d) / (T(2) * u);
    const T span = d / u;  // y_max - y_min

    // (y0 - y_min)(y_max - y0) = y0 x2^2 / u; compute the larger factor directly.
    T below, above;
    if (y0 <= T(0.5) * c / u) {
        above = y_max - y0;
        below = above > T(0) ? y0 * v2 / (u * above) : T(0);
    } else {
        below = y0 - y_min;
        above = below > T(0) ? y0 * v2 / (u * below) : T(0);
    }
    const T h0 = xm::atan2(xm::copysign(xm::sqrt(below), x2), xm::sqrt(above));
    const T h = h0 + root_u * duration;
    const T sh = xm::sin(h);
    const T ch = xm::cos(h);

    const T y = sh * sh < T(0.5) ? y_min + span * sh * sh : y_max - span * ch * ch;
    x1 = xm::sqrt(y);
    x2 = span * root_u * sh * ch / x1;
}

}  // namespace detail

inline PhaseState propagate_segment(const PhaseState& s, double u, double duration)
{
    if (!(u > 0.0) || !std::isfinite(u)) throw domain_error("propagate_segment: control u must be positive");
    if (!(duration >= 0.0) || !std::isfinite(duration))
        throw domain_error("propagate_segment: duration must be non-negative");
    if (!(s.x1 > 0.0)) throw domain_error("propagate_segment: x1 must be positive");
    if (duration == 0.0) return s;
    PhaseState out = s;
    detail::propagate_in(out.x1, out.x2, u, duration);
    return out;
}

/// Classical fixed-step RK4 on the planar system; cross-check for propagate_segment.
inline PhaseState integrate_numeric(const PhaseState& s, double u, double duration, double dt,
                                    double x1_floor = Tolerances{}.x1_floor)
{
    if (!(dt > 0.0)) throw domain_error("integrate_numeric: dt must be positive");
    if (!(duration >= 0.0)) throw domain_error("integrate_numeric: duration must be non-negative");

    auto rhs = [u](double x1, double x2) {
        const double inv = 1.0 / x1;
        return PhaseState{x2, -u * x1 + inv * inv * inv};
    };
    auto check = [x1_floor](double x1) {
        if (!(x1 > x1_floor)) throw numeric_error("integrate_numeric: x1 collapsed towards 0; reduce dt");
    };

    PhaseState x = s;
    check(x.x1);
    const auto steps = static_cast<long long>(std::floor(duration / dt));
    double remaining = duration - static_cast<double>(steps) * dt;
    auto step = [&](double h) {
        const PhaseState k1 = rhs(x.x1, x.x2);
        check(x.x1 + 0.5 * h * k1.x1);
        const PhaseState k2 = rhs(x.x1 + 0.5 * h * k1.x1, x.x2 + 0.5 * h * k1.x2);
        check(x.x1 + 0.5 * h * k2.x1);
        const PhaseState k3 = rhs(x.x1 + 0.5 * h * k2.x1, x.x2 + 0.5 * h * k2.x2);
        check(x.x1 + h * k3.x1);
        const PhaseState k4 = rhs(x.x1 + h * k3.x1, x.x2 + h * k3.x2);
        x.x1 += h / 6.0 * (k1.x1 + 2.0 * k2.x1 + 2.0 * k3.x1 + k4.x1);
        x.x2 += h / 6.0 * (k1.x2 + 2.0 * k2.x2 + 2.0 * k3.x2 + k4.x2);
        check(x.x1);
    };
    for (long long i = 0; i < steps; ++i) step(dt);
    if (remaining > 1e-15 * std::max(1.0, duration)) step(remaining);
    return x;
}

/// Propagates x0 through every segment and returns the endpoint.
inline PhaseState protocol_endpoint(const Protocol& protocol, const PhaseState& x0)
{
    PhaseState x = x0;
    for (const auto& seg : protocol.segments) x = propagate_segment(x, seg.u, seg.duration);
    return x;
}

/// Samples at every multiple of sample_dt plus every segment boundary.
/// The u reported at a boundary is the control of the segment that starts
/// there; the final sample carries the last segment's control. Before the
/// protocol starts the trap sits at omega_h, so an empty protocol reports u = 1.
inline std::vector<TrajectorySample> simulate_protocol(const Protocol& protocol, const PhaseState& x0, double sample_dt)
{
    if (!(sample_dt > 0.0)) throw domain_error("simulate_protocol: sample_dt must be positive");
    if (!(x0.x1 > 0.0)) throw domain_error("simulate_protocol: x0.x1 must be positive");
    protocol.validate();

    std::vector<TrajectorySample> out;
    if (protocol.segments.empty()) {
        out.push_back({0.0, x0, 1.0});
        return out;
    }
    out.push_back({0.0, x0, protocol.segments.front().u});

    PhaseState start = x0;
    double t_start = 0.0;
    long long k = 1;
    for (std::size_t i = 0; i < protocol.segments.size(); ++i) {
        const Segment& seg = protocol.segments[i];
        const double t_end = t_start + seg.duration;
        const double guard = 1e-12 * std::max(1.0, t_end);
        for (;; ++k) {
            const double t = static_cast<double>(k) * sample_dt;
            if (t <= t_start + guard) continue;
            if (t >= t_end - guard) break;
            out.push_back({t, propagate_segment(start, seg.u, t - t_start), seg.u});
        }
        start = propagate_segment(start, seg.u, seg.duration);
        const double next_u = i + 1 < protocol.segments.size() ? protocol.segments[i + 1].u : seg.u;
        out.push_back({t_end, start, next_u});
        t_start = t_end;
    }
    return out;
}

/// Relative spread (max - min) / |mean| of the Casimir along a trajectory.
/// z and the Casimir are formed in xm::wide_t; in double, z1 z2 - z3^2/4
/// loses about 2 log10(x1 x2) digits to cancellation.
inline double casimir_spread(std::span<const TrajectorySample> samples, const PhysicalParams& p)
{
    if (samples.empty()) return 0.0;
    using W = xm::wide_t;
    const W e0 = initial_energy(p);
    const W wh = p.omega_h;
    double lo = INFINITY, hi = -INFINITY, sum = 0.0;
    for (const auto& s : samples) {
        const W x1 = s.state.x1, x2 = s.state.x2;
        const W z1 = e0 / (wh * wh) * x1 * x1;
        const W z2 = e0 * (x2 * x2 + W(1) / (x1 * x1));
        const W z3 = W(2) * e0 * x1 * x2 / wh;
        const double v = static_cast<double>(z1 * z2 - W(0.25) * z3 * z3);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        sum += v;
    }
    return (hi - lo) / std::abs(sum / static_cast<double>(samples.size()));
}

/// Natural-units parameters reproducing a normalized problem: omega_h = 1, T_h = 1.
inline PhysicalParams unit_params(double gamma)
{
    return PhysicalParams{1.0 / (gamma * gamma), 1.0, 1.0};
}

}  // namespace qpo
