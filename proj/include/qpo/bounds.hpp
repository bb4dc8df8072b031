#pragma once

// Asymptotic laws for large gamma, the classic one-switching protocol, and
// utilities comparing exact extremal times against the limits.

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qpo/dynamics.hpp"
#include "qpo/errors.hpp"
#include "qpo/extremal.hpp"
#include "qpo/parallel.hpp"
#include "qpo/roots.hpp"

namespace qpo {

namespace detail {
inline double acos_three_fifths() { return std::acos(0.6); }
}  // namespace detail

struct SwitchCountWindow {
    double n_lo = 0.0;
    double n_hi = 0.0;
    std::optional<int> n;  // the positive integer strictly inside (n_lo, n_hi), if any
};

/// Open unit-width window (2/ln5) ln(gamma) + ln2/ln5 - {2, 1} for the
/// largest switching index N of the Plus branch at large gamma.
inline SwitchCountWindow switch_count_window(double gamma)
{
    if (!(gamma > 1.0)) throw domain_error("switch_count_window: gamma must be > 1");
    const double ln5 = std::log(5.0);
    const double base = 2.0 * std::log(gamma) / ln5 + std::log(2.0) / ln5;
    SwitchCountWindow w{base - 2.0, base - 1.0, std::nullopt};
    const double candidate = std::floor(w.n_lo) + 1.0;
    if (candidate < w.n_hi && candidate >= 1.0) w.n = static_cast<int>(candidate);
    return w;
}

/// Duration of one u1/u2 period in the large-gamma limit: 2 + (pi + acos(3/5))/2.
inline double limiting_period() { return 2.0 + 0.5 * (std::numbers::pi + detail::acos_three_fifths()); }

/// Large-gamma limit of the Plus extremal with 2N+1 switchings.
inline double limiting_time(int n)
{
    if (n < 0) throw domain_error("limiting_time: N must be non-negative");
    return 1.0 + 0.5 * detail::acos_three_fifths() + n * limiting_period();
}

/// Time constant of the logarithmic cooling law, ~2.50675.
inline double tau0() { return limiting_period() / std::log(5.0); }

/// Normalized time needed to reach T_c from T_h: tau0 ln(T_h / T_c).
inline double min_time_for_temperature(double T_c, double T_h)
{
    if (!(T_c > 0.0) || !(T_h > 0.0)) throw domain_error("min_time_for_temperature: temperatures must be positive");
    if (T_c > T_h) throw domain_error("min_time_for_temperature: need T_c <= T_h");
    return tau0() * std::log(T_h / T_c);
}

/// Lowest temperature reachable within normalized time tau: T_h exp(-tau / tau0).
inline double min_temperature_for_time(double tau, double T_h)
{
    if (!(tau >= 0.0)) throw domain_error("min_temperature_for_time: tau must be non-negative");
    return T_h * std::exp(-tau / tau0());
}

/// One-switching power law T_h / (omega_h tau)^2.
inline double power_law_bound(double tau, double T_h, double omega_h)
{
    if (!(tau > 0.0)) throw domain_error("power_law_bound: tau must be positive");
    const double wt = omega_h * tau;
    return T_h / (wt * wt);
}

/// Time beyond which the exponential law gives a lower temperature than the
/// power law. Empty when the exponential law is lower for every tau.
inline std::optional<double> power_law_crossover(double omega_h = 1.0)
{
    if (!(omega_h > 0.0)) throw domain_error("power_law_crossover: omega_h must be positive");
    // g > 0 where the power law is lower; g peaks at tau = 2 tau0.
    auto g = [&](double tau) { return 2.0 * std::log(omega_h * tau) - tau / tau0(); };
    const double lo = 2.0 * tau0();
    if (!(g(lo) > 0.0)) return std::nullopt;
    double hi = 2.0 * lo;
    while (g(hi) > 0.0) hi *= 2.0;
    return roots::bisect(g, lo, hi, g(lo));
}

/// Two-segment protocol u1 for omega_h tau_c, then u2 for omega_h tau_h, with
///   tau_c = acos(a) / (2 omega_c),  tau_h = acos(a) / (2 omega_h),
///   a = (omega_c^2 + omega_h^2) / (omega_c + omega_h)^2.
inline Protocol salamon_protocol(double omega_c, double omega_h)
{
    if (!(omega_c > 0.0) || !(omega_h > omega_c)) throw domain_error("salamon_protocol: need 0 < omega_c < omega_h");
    const double r = omega_c / omega_h;
    // acos(a) = atan2(sqrt((1-a)(1+a)), a) with (1+r)^2 (1-a) = 2r, (1+r)^2 (1+a) = 2(1 + r + r^2)
    const double angle = std::atan2(2.0 * std::sqrt(r * (1.0 + r + r * r)), 1.0 + r * r);
    const double gamma = std::sqrt(omega_h / omega_c);
    const double u1 = 1.0 / ((gamma * gamma) * (gamma * gamma));
    return Protocol::from_segments(gamma, {{u1, 0.5 * angle / r}, {1.0, 0.5 * angle}});
}

/// (1 - 5^(1 + 1/(N+1)) / gamma^4) / (5^(1 + 1/(N+1)) - 1), lower end of the
/// bracket containing the n = N Plus root.
inline double s_hat_lower(double gamma, int n)
{
    const double p = std::pow(5.0, 1.0 + 1.0 / (n + 1.0));
    const double g4 = (gamma * gamma) * (gamma * gamma);
    return (1.0 - p / g4) / (p - 1.0);
}

struct BoundReport {
    double gamma = 0.0;
    double n_lo = 0.0;
    double n_hi = 0.0;
    std::optional<int> n;
    double limiting_time = NAN;
    double exact_time = NAN;
    double relative_gap = NAN;
    double s = NAN;
    double s_lower = NAN;
    double s_upper = NAN;
    double endpoint_error = NAN;
    std::string status = "ok";

    bool complete() const { return status == "ok"; }
    bool s_in_bracket() const { return s_lower <= s && s <= s_upper; }
};

/// Compares the exact Plus extremal with n = N against the limiting time.
/// Gammas without an integer N, or without a Plus root at n = N, come back
/// flagged in `status` rather than as errors.
inline BoundReport bound_report(double gamma)
{
    const auto w = switch_count_window(gamma);
    BoundReport r;
    r.gamma = gamma;
    r.n_lo = w.n_lo;
    r.n_hi = w.n_hi;
    r.n = w.n;
    if (!w.n) {
        r.status = "no integer N in window";
        return r;
    }
    const auto prob = NormalizedProblem::from_gamma(gamma);
    r.limiting_time = limiting_time(*w.n);
    r.s_lower = s_hat_lower(gamma, *w.n);
    r.s_upper = s_max(prob);
    const auto cand = build_candidate(*w.n, SignBranch::Plus, prob);
    if (!cand) {
        r.status = "no Plus root at n = N";
        return r;
    }
    r.exact_time = cand->total_time;
    r.s = cand->s;
    r.relative_gap = std::abs(r.exact_time - r.limiting_time) / r.limiting_time;
    r.endpoint_error = candidate_endpoint_error(*cand, prob);
    return r;
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
};

inline LinearFit least_squares(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2) throw domain_error("least_squares: need >= 2 paired points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw domain_error("least_squares: abscissae are all equal");
    return {sxy / sxx, my - sxy / sxx * mx};
}

/// gamma_min .. gamma_max, geometrically spaced, endpoints exact.
inline std::vector<double> log_spaced_gammas(double gamma_min, double gamma_max, std::size_t points)
{
    if (points == 1) return {gamma_min};
    return roots::log_grid(gamma_min, gamma_max, points);
}

struct ScalingPoint {
    double gamma = 0.0;
    double log_temperature_ratio = 0.0;  // ln(T_h / T_c) = 2 ln(gamma)
    int optimal_n = 0;
    double optimal_time = 0.0;
    std::optional<int> n_window;
    double extremal_n_time = NAN;  // Plus extremal at n = N
};

inline ScalingPoint scaling_point(double gamma)
{
    const auto prob = NormalizedProblem::from_gamma(gamma);
    const auto syn = synthesize_optimal(prob);
    ScalingPoint p;
    p.gamma = gamma;
    p.log_temperature_ratio = 2.0 * std::log(gamma);
    p.optimal_n = syn.optimal.n;
    p.optimal_time = syn.optimal.total_time;
    p.n_window = switch_count_window(gamma).n;
    if (p.n_window)
        if (auto c = build_candidate(*p.n_window, SignBranch::Plus, prob)) p.extremal_n_time = c->total_time;
    return p;
}

/// Evaluates scaling_point over a gamma list in parallel.
inline std::vector<ScalingPoint> scaling_sweep(const std::vector<double>& gammas)
{
    return parallel_map(gammas, [](double g) { return scaling_point(g); });
}

/// Slope of the n = N Plus extremal time against ln(T_h/T_c); approaches tau0.
inline LinearFit fit_extremal_n(std::span<const ScalingPoint> pts)
{
    std::vector<double> x, y;
    for (const auto& p : pts)
        if (std::isfinite(p.extremal_n_time)) {
            x.push_back(p.log_temperature_ratio);
            y.push_back(p.extremal_n_time);
        }
    return least_squares(x, y);
}

/// Same regression on the unrestricted minimum time.
inline LinearFit fit_optimal(std::span<const ScalingPoint> pts)
{
    std::vector<double> x, y;
    for (const auto& p : pts) {
        x.push_back(p.log_temperature_ratio);
        y.push_back(p.optimal_time);
    }
    return least_squares(x, y);
}

/// Smallest gamma in [lo, hi] at which an extremal with three or more
/// switchings beats the one-switching extremal. Located by bisection on the
/// index of the winner.
inline double multi_switch_crossover(double lo = 1.5, double hi = 10.0, double x_tol = 1e-10)
{
    auto winner_multi = [](double g) {
        const auto prob = NormalizedProblem::from_gamma(g);
        return synthesize_optimal(prob).optimal.n >= 1 ? -1.0 : 1.0;
    };
    const double f_lo = winner_multi(lo);
    if (f_lo < 0.0 || winner_multi(hi) > 0.0)
        throw domain_error("multi_switch_crossover: winner index does not change inside [lo, hi]");
    return roots::bisect(winner_multi, lo, hi, f_lo, x_tol);
}

}  // namespace qpo
