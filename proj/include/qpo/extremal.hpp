#pragma once

// Bang-bang extremals of the minimum-time cooling problem.
//
// An extremal with 2n+1 switchings starts on u1, alternates, and ends on u2.
// All of its switching points share the squared slope s = (x2/x1)^2, which is
// a root of
//
//     l(s) = (c + sqrt(c^2 - 4(s+u2))) / (c1 +- sqrt(c1^2 - 4(s+u1)))
//          = ((s+u2)/(s+u1))^(n+1) = r_n(s),        0 < s <= (1-u1)^2/4.
//
// The segment durations follow from s in closed form. Every acos below is
// evaluated as atan2(sqrt((1-a)(1+a)), a) with 1-a and 1+a expanded so that no
// catastrophic cancellation occurs when u1 = gamma^-4 is tiny.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qpo/config.hpp"
#include "qpo/dynamics.hpp"
#include "qpo/errors.hpp"
#include "qpo/roots.hpp"

namespace qpo {

enum class SignBranch { Plus, Minus };

inline constexpr double sign_of(SignBranch b) { return b == SignBranch::Plus ? 1.0 : -1.0; }
inline const char* to_string(SignBranch b) { return b == SignBranch::Plus ? "+" : "-"; }

struct SegmentTimes {
    double tau_i = 0.0;   // first arc, u1
    double tau_u1 = 0.0;  // each interior u1 arc
    double tau_u2 = 0.0;  // each interior u2 arc
    double tau_f = 0.0;   // last arc, u2
};

struct ExtremalCandidate {
    int n = 0;
    SignBranch branch = SignBranch::Plus;
    double s = 0.0;
    SegmentTimes times;
    double total_time = 0.0;

    int switchings() const { return 2 * n + 1; }
};

struct SwitchingGeometry {
    std::vector<PhaseState> points;
};

/// s_m = (1 - u1)^2 / 4
inline double s_max(const NormalizedProblem& prob)
{
    const double d = 1.0 - prob.u1();
    return 0.25 * d * d;
}

namespace detail {

// Radicands and their roots for a given s, written in cancellation-free form:
//   c1^2 - 4(s+u1) = (1-u1)^2 - 4s,   c^2 - 4(s+u2) = (u2 g^2 - g^-2)^2 - 4s.
template <class T>
struct Radicals {
    T d1;  // sqrt(c1^2 - 4 u1) = 1 - u1
    T dc;  // sqrt(c^2 - 4 u2)  = u2 gamma^2 - gamma^-2
    T r1;  // sqrt(c1^2 - 4(s + u1))
    T rc;  // sqrt(c^2 - 4(s + u2))
};

template <class T = double>
Radicals<T> radicals(T s, const NormalizedProblem& prob)
{
    const T g = prob.gamma();
    const T g2 = g * g;
    Radicals<T> r{};
    r.d1 = T(1) - T(prob.u1());
    r.dc = T(prob.u2()) * g2 - T(1) / g2;
    r.r1 = xm::sqrt(std::max(T(0), r.d1 * r.d1 - T(4) * s));
    r.rc = xm::sqrt(std::max(T(0), r.dc * r.dc - T(4) * s));
    return r;
}

inline void require_ratio_in_range(double s, const NormalizedProblem& prob, const char* who)
{
    if (!(s > 0.0) || !(s <= s_max(prob)))
        throw domain_error(std::string(who) + ": switching ratio s must lie in (0, s_m]");
}

/// acos of the ratio num/den given the cancellation-free numerators of 1 - a and 1 + a
/// (both scaled by den). Fails if the ratio leaves [-1 - window, 1 + window].
template <class T>
T stable_acos(T num, T den, T one_minus, T one_plus, double window, const char* who)
{
    const T a = num / den;
    if (!(xm::abs(a) <= T(1) + T(window)))
        throw numeric_error(std::string(who) + ": acos argument " + std::to_string(static_cast<double>(a)) +
                            " outside [-1, 1]");
    return xm::atan2(xm::sqrt(std::max(T(0), one_minus) * std::max(T(0), one_plus)), num);
}

}  // namespace detail

/// Left side l_+(s) or l_-(s) of the switching-ratio equation.
inline double transcendental_lhs(double s, SignBranch branch, const NormalizedProblem& prob)
{
    detail::require_ratio_in_range(s, prob, "transcendental_lhs");
    const auto r = detail::radicals(s, prob);
    const double num = prob.c() + r.rc;
    if (branch == SignBranch::Plus) return num / (prob.c1() + r.r1);
    // c1 - r1 = 4(s + u1) / (c1 + r1)
    return num * (prob.c1() + r.r1) / (4.0 * (s + prob.u1()));
}

/// Right side r_n(s) = ((s + u2)/(s + u1))^(n+1).
inline double transcendental_rhs(double s, int n, const NormalizedProblem& prob)
{
    if (!(s > 0.0)) throw domain_error("transcendental_rhs: s must be positive");
    if (n < 0) throw domain_error("transcendental_rhs: n must be non-negative");
    return std::pow((s + prob.u2()) / (s + prob.u1()), n + 1);
}

/// ln l(s) - ln r_n(s); the function the root finder works on.
inline double log_mismatch(double s, int n, SignBranch branch, const NormalizedProblem& prob)
{
    const auto r = detail::radicals(s, prob);
    const double u1 = prob.u1();
    const double num = prob.c() + r.rc;
    const double ln_l = branch == SignBranch::Plus
                            ? std::log(num / (prob.c1() + r.r1))
                            : std::log(num * (prob.c1() + r.r1) / (4.0 * (s + u1)));
    // ln((s + u2)/(s + u1)) = log1p((u2 - u1)/(s + u1))
    const double ln_r = (n + 1) * std::log1p((prob.u2() - u1) / (s + u1));
    return ln_l - ln_r;
}

/// Scan grid for the switching ratio: 2048 uniform brackets on (floor, s_m]
/// plus 64 geometric nodes inside the first bracket, where roots sit at
/// large gamma (s ~ 1/gamma^2 for one switching).
inline std::vector<double> switch_ratio_grid(const NormalizedProblem& prob, std::size_t brackets = 2048)
{
    const double sm = s_max(prob);
    const double g2 = prob.gamma() * prob.gamma();
    const double floor = std::min(1e-16 * sm, 1e-2 / g2);
    auto grid = roots::uniform_grid(floor, sm, brackets);
    auto fine = roots::log_grid(floor, grid[1], 64);
    return roots::merge_grids(std::move(grid), fine);
}

/// Every root of l_branch(s) = r_n(s) in (0, s_m], in increasing order.
inline std::vector<double> solve_switch_ratios(int n, SignBranch branch, const NormalizedProblem& prob)
{
    if (n < 0) throw domain_error("solve_switch_ratios: n must be non-negative");
    const auto grid = switch_ratio_grid(prob);
    return roots::scan([&](double s) { return log_mismatch(s, n, branch, prob); }, grid, 0.0);
}

/// The smallest root, if any. For the Plus branch l_+ increases and r_n
/// decreases, so a Plus root is unique.
inline std::optional<double> solve_switch_ratio(int n, SignBranch branch, const NormalizedProblem& prob)
{
    const auto all = solve_switch_ratios(n, branch, prob);
    if (all.empty()) return std::nullopt;
    return all.front();
}

namespace detail {

template <class T>
struct SegmentTimesT {
    T tau_i, tau_u1, tau_u2, tau_f;
};

template <class T>
SegmentTimesT<T> segment_times_in(T s, SignBranch branch, const NormalizedProblem& prob, double acos_window)
{
    const auto r = radicals<T>(s, prob);
    const T u1 = prob.u1();
    const T u2 = prob.u2();
    const T c1 = T(1) + u1;
    const T g = prob.gamma();
    const T g2 = g * g;
    const T c = g2 + T(1) / g2;
    const T br = sign_of(branch);

    SegmentTimesT<T> t;

    // First arc: a = (s c1 -+ u1 r1) / ((s + u1) d1)
    {
        const T den = (s + u1) * r.d1;
        const T num = s * c1 - br * u1 * r.r1;
        // (d1 - 2s - r1) = 4 s (s + u1) / (d1 - 2s + r1)
        const T one_minus = branch == SignBranch::Plus
                                ? u1 * (r.d1 - T(2) * s + r.r1)
                                : u1 * (T(4) * s * (s + u1) / (r.d1 - T(2) * s + r.r1));
        // d1 - r1 = 4s / (d1 + r1)
        const T one_plus = branch == SignBranch::Plus ? T(2) * s + u1 * (T(4) * s / (r.d1 + r.r1))
                                                      : T(2) * s + u1 * (r.d1 + r.r1);
        t.tau_i = stable_acos(num, den, one_minus, one_plus, acos_window, "segment_times(tau_i)") /
                  (T(2) * xm::sqrt(u1));
    }

    // Last arc: a = (-s c + u2 rc) / ((s + u2) dc)
    {
        const T den = (s + u2) * r.dc;
        const T num = -s * c + u2 * r.rc;
        const T one_minus = s * (r.dc + c) + u2 * (T(4) * s / (r.dc + r.rc));
        const T one_plus = u2 * (r.dc + r.rc) - T(2) * s / g2;
        t.tau_f = stable_acos(num, den, one_minus, one_plus, acos_window, "segment_times(tau_f)") /
                  (T(2) * xm::sqrt(u2));
    }

    // acos((s - u)/(s + u)) = atan2(2 sqrt(u s), s - u)
    t.tau_u1 = xm::atan2(T(2) * xm::sqrt(u1 * s), s - u1) / (T(2) * xm::sqrt(u1));
    t.tau_u2 = (T(2) * xm::pi<T>() - xm::atan2(T(2) * xm::sqrt(u2 * s), s - u2)) /
               (T(2) * xm::sqrt(u2));
    return t;
}

}  // namespace detail

inline SegmentTimes segment_times(double s, SignBranch branch, const NormalizedProblem& prob,
                                  double acos_window = Tolerances{}.acos_window)
{
    detail::require_ratio_in_range(s, prob, "segment_times");
    const auto t = detail::segment_times_in<double>(s, branch, prob, acos_window);
    return {t.tau_i, t.tau_u1, t.tau_u2, t.tau_f};
}

inline double compose_total_time(int n, const SegmentTimes& t)
{
    return t.tau_i + n * (t.tau_u1 + t.tau_u2) + t.tau_f;
}

inline ExtremalCandidate make_candidate(int n, SignBranch branch, double s, const NormalizedProblem& prob)
{
    ExtremalCandidate cand{n, branch, s, segment_times(s, branch, prob), 0.0};
    cand.total_time = compose_total_time(n, cand.times);
    return cand;
}

/// One candidate per root of the (n, branch) equation.
inline std::vector<ExtremalCandidate> build_candidates(int n, SignBranch branch, const NormalizedProblem& prob)
{
    std::vector<ExtremalCandidate> out;
    for (double s : solve_switch_ratios(n, branch, prob)) out.push_back(make_candidate(n, branch, s, prob));
    return out;
}

/// Fastest candidate for (n, branch), or nothing if the equation has no root.
inline std::optional<ExtremalCandidate> build_candidate(int n, SignBranch branch, const NormalizedProblem& prob)
{
    auto all = build_candidates(n, branch, prob);
    if (all.empty()) return std::nullopt;
    return *std::min_element(all.begin(), all.end(),
                             [](const auto& a, const auto& b) { return a.total_time < b.total_time; });
}

/// u1 for tau_i, then n pairs (u2 for tau_u2, u1 for tau_u1), then u2 for tau_f.
inline Protocol candidate_to_protocol(const ExtremalCandidate& cand, const NormalizedProblem& prob)
{
    std::vector<Segment> segs;
    segs.reserve(2 * static_cast<std::size_t>(cand.n) + 2);
    segs.push_back({prob.u1(), cand.times.tau_i});
    for (int k = 0; k < cand.n; ++k) {
        segs.push_back({prob.u2(), cand.times.tau_u2});
        segs.push_back({prob.u1(), cand.times.tau_u1});
    }
    segs.push_back({prob.u2(), cand.times.tau_f});
    return Protocol::from_segments(prob.gamma(), std::move(segs));
}

/// Distance of the simulated endpoint from the target (gamma, 0).
inline double candidate_endpoint_error(const ExtremalCandidate& cand, const NormalizedProblem& prob)
{
    const PhaseState end = protocol_endpoint(candidate_to_protocol(cand, prob), PhaseState{1.0, 0.0});
    return std::hypot(end.x1 - prob.gamma(), end.x2);
}

/// States at the 2n+1 switching instants of a candidate. Throws
/// consistency_error unless the durations are those of s, every (x2/x1)^2
/// equals s, magnitudes agree, and the signs alternate starting positive.
/// Durations and flow are evaluated in xm::wide_t: forward propagation
/// amplifies duration rounding, about 45x per u1/u2 pair at gamma = 100.
inline SwitchingGeometry switching_geometry(const ExtremalCandidate& cand, const NormalizedProblem& prob,
                                            double tol = Tolerances{}.geometry)
{
    using ext = xm::wide_t;
    detail::require_ratio_in_range(cand.s, prob, "switching_geometry");
    if (cand.n < 0) throw domain_error("switching_geometry: n must be non-negative");
    const auto t = detail::segment_times_in<ext>(cand.s, cand.branch, prob, Tolerances{}.acos_window);
    const ext u1 = prob.u1(), u2 = prob.u2();
    for (auto [stored, exact] : {std::pair{cand.times.tau_i, t.tau_i}, std::pair{cand.times.tau_u1, t.tau_u1},
                                 std::pair{cand.times.tau_u2, t.tau_u2}, std::pair{cand.times.tau_f, t.tau_f}}) {
        if (!(xm::abs(ext(stored) - exact) <= ext(1e-12) * exact))
            throw consistency_error("switching_geometry: segment durations do not belong to s = " +
                                    std::to_string(cand.s));
    }

    SwitchingGeometry geo;
    ext x1 = 1, x2 = 0;
    auto record = [&] { geo.points.push_back({static_cast<double>(x1), static_cast<double>(x2)}); };
    detail::propagate_in(x1, x2, u1, t.tau_i);
    record();
    for (int k = 0; k < cand.n; ++k) {
        detail::propagate_in(x1, x2, u2, t.tau_u2);
        record();
        detail::propagate_in(x1, x2, u1, t.tau_u1);
        record();
    }

    const double first = geo.points.front().x2 / geo.points.front().x1;
    for (std::size_t i = 0; i < geo.points.size(); ++i) {
        const double ratio = geo.points[i].x2 / geo.points[i].x1;
        const bool want_positive = i % 2 == 0;
        if ((ratio > 0.0) != want_positive)
            throw consistency_error("switching_geometry: slope signs do not alternate starting positive");
        if (std::abs(ratio * ratio - cand.s) > tol * cand.s)
            throw consistency_error("switching_geometry: (x2/x1)^2 = " + std::to_string(ratio * ratio) +
                                    " differs from s = " + std::to_string(cand.s));
        if (std::abs(std::abs(ratio) - std::abs(first)) > tol * std::abs(first))
            throw consistency_error("switching_geometry: slope magnitudes differ between switching points");
    }
    return geo;
}

/// ceil(2 ln(gamma) / ln 5) + 2
inline int default_n_max(double gamma)
{
    return static_cast<int>(std::ceil(2.0 * std::log(gamma) / std::log(5.0))) + 2;
}

/// All candidates for n = 0..n_max on both branches.
inline std::vector<ExtremalCandidate> enumerate_candidates(const NormalizedProblem& prob, int n_max)
{
    if (n_max < 0) throw domain_error("enumerate_candidates: n_max must be non-negative");
    std::vector<ExtremalCandidate> all;
    for (int n = 0; n <= n_max; ++n)
        for (SignBranch b : {SignBranch::Plus, SignBranch::Minus}) {
            auto some = build_candidates(n, b, prob);
            all.insert(all.end(), some.begin(), some.end());
        }
    return all;
}

struct Synthesis {
    Protocol protocol;
    ExtremalCandidate optimal;
    std::vector<ExtremalCandidate> candidates;
    double endpoint_error = 0.0;
};

/// Minimum-time extremal over n = 0..n_max and both branches. Ties within
/// tol.tie go to the smaller n. The winner is verified by forward
/// simulation before it is returned.
inline Synthesis synthesize_optimal(const NormalizedProblem& prob, std::optional<int> n_max = std::nullopt,
                                    const Tolerances& tol = {})
{
    const int cap = n_max.value_or(default_n_max(prob.gamma()));
    auto candidates = enumerate_candidates(prob, cap);
    if (candidates.empty())
        throw synthesis_error("synthesize_optimal: no extremal found for gamma = " + std::to_string(prob.gamma()));

    const ExtremalCandidate* best = &candidates.front();
    for (const auto& cand : candidates) {
        const double diff = cand.total_time - best->total_time;
        if (diff < -tol.tie || (std::abs(diff) <= tol.tie && cand.n < best->n)) best = &cand;
    }

    Synthesis out{candidate_to_protocol(*best, prob), *best, std::move(candidates), 0.0};
    const PhaseState end = protocol_endpoint(out.protocol, PhaseState{1.0, 0.0});
    out.endpoint_error = std::hypot(end.x1 - prob.gamma(), end.x2);
    if (!(std::abs(end.x1 - prob.gamma()) <= tol.endpoint && std::abs(end.x2) <= tol.endpoint))
        throw consistency_error("synthesize_optimal: optimal protocol misses (gamma, 0) by " +
                                std::to_string(out.endpoint_error));
    return out;
}

/// Time of the single one-switching extremal (whichever branch carries it).
inline std::optional<ExtremalCandidate> one_switching_candidate(const NormalizedProblem& prob)
{
    std::optional<ExtremalCandidate> best;
    for (SignBranch b : {SignBranch::Plus, SignBranch::Minus})
        if (auto c = build_candidate(0, b, prob); c && (!best || c->total_time < best->total_time)) best = c;
    return best;
}

}  // namespace qpo
