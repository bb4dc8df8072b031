#pragma once

// Brute-force cross-check of the extremal times.
//
// A schedule with 2n+2 alternating arcs (u1 first, u2 last) is parameterised
// by its first 2n durations. The last two are closed by shooting: follow the
// u1 arc until the state lands on the u2 orbit through (gamma, 0), then follow
// that orbit until x1 peaks at gamma. Only propagate_segment and scalar root
// finding are used; none of the closed-form switching formulas.
//
// The free durations are searched on a coarse grid, and every interior grid
// minimum is refined by coordinate descent with golden-section line searches.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "qpo/dynamics.hpp"
#include "qpo/errors.hpp"
#include "qpo/extremal.hpp"
#include "qpo/parallel.hpp"
#include "qpo/roots.hpp"

namespace qpo {

struct SwitchingSchedule {
    std::vector<double> durations;  // u1, u2, u1, ..., u2

    void validate() const
    {
        if (durations.size() < 2 || durations.size() % 2 != 0)
            throw domain_error("SwitchingSchedule: need an even number (>= 2) of durations");
        for (double d : durations)
            if (!(d > 0.0) || !std::isfinite(d)) throw domain_error("SwitchingSchedule: durations must be positive");
    }

    Protocol to_protocol(const NormalizedProblem& prob) const
    {
        std::vector<Segment> segs;
        for (std::size_t i = 0; i < durations.size(); ++i)
            segs.push_back({i % 2 == 0 ? prob.u1() : prob.u2(), durations[i]});
        return Protocol::from_segments(prob.gamma(), std::move(segs));
    }
};

/// Euclidean distance between the simulated endpoint and (gamma, 0).
inline double endpoint_error(const SwitchingSchedule& schedule, const NormalizedProblem& prob)
{
    schedule.validate();
    const PhaseState end = protocol_endpoint(schedule.to_protocol(prob), PhaseState{1.0, 0.0});
    return std::hypot(end.x1 - prob.gamma(), end.x2);
}

struct OracleOptions {
    int grid_points = 64;        // per free duration
    double box_factor = 1.2;     // search box = (0, box_factor * reference duration]
    double line_tol = 1e-6;      // golden-section resolution
    int max_sweeps = 200;
    int max_starts = 16;         // interior grid minima refined
    int arc_scan = 2048;         // resolution of the shooting scans
    std::vector<double> reference;  // reference durations for the box; empty -> analytic candidate
};

struct BruteForceResult {
    double total_time = 0.0;
    SwitchingSchedule schedule;
    double endpoint_error = 0.0;
    int refined_minima = 0;
};

namespace detail {

struct Closure {
    double on_u1 = 0.0;
    double on_u2 = 0.0;
};

/// Fastest (u1, u2) pair of arcs from `from` to (gamma, 0).
inline std::optional<Closure> close_to_target(const PhaseState& from, const NormalizedProblem& prob, int scan)
{
    const double u1 = prob.u1(), u2 = prob.u2();
    const double target = prob.c();
    auto off_orbit = [&](double t) { return segment_invariant(propagate_segment(from, u1, t), u2) - target; };

    const double horizon = std::numbers::pi / std::sqrt(u1);
    std::vector<double> grid = roots::uniform_grid(0.0, horizon, static_cast<std::size_t>(scan));
    grid.front() = horizon * 1e-12;

    std::optional<Closure> best;
    for (double ta : roots::scan(off_orbit, grid)) {
        const PhaseState on = propagate_segment(from, u1, ta);
        // x2 changes sign from + to - where x1 peaks; over one period of y under u2.
        const double period = std::numbers::pi / std::sqrt(u2);
        const auto tgrid = roots::uniform_grid(0.0, period, 256);
        std::optional<double> tb;
        double prev = on.x2;
        for (std::size_t k = 1; k < tgrid.size() && !tb; ++k) {
            const double v = propagate_segment(on, u2, tgrid[k]).x2;
            if (prev > 0.0 && v <= 0.0)
                tb = roots::bisect([&](double t) { return propagate_segment(on, u2, t).x2; }, tgrid[k - 1], tgrid[k], prev);
            prev = v;
        }
        if (!tb) continue;
        if (!best || ta + *tb < best->on_u1 + best->on_u2) best = Closure{ta, *tb};
    }
    return best;
}

inline PhaseState run_prefix(const std::vector<double>& prefix, const NormalizedProblem& prob)
{
    PhaseState x{1.0, 0.0};
    for (std::size_t i = 0; i < prefix.size(); ++i) x = propagate_segment(x, i % 2 == 0 ? prob.u1() : prob.u2(), prefix[i]);
    return x;
}

inline double closed_total(const std::vector<double>& prefix, const NormalizedProblem& prob, int scan)
{
    for (double d : prefix)
        if (!(d > 0.0)) return std::numeric_limits<double>::infinity();
    const auto cl = close_to_target(run_prefix(prefix, prob), prob, scan);
    if (!cl) return std::numeric_limits<double>::infinity();
    double sum = cl->on_u1 + cl->on_u2;
    for (double d : prefix) sum += d;
    return sum;
}

inline SwitchingSchedule close_schedule(const std::vector<double>& prefix, const NormalizedProblem& prob, int scan)
{
    const auto cl = close_to_target(run_prefix(prefix, prob), prob, scan);
    if (!cl) throw infeasible_error("brute_force_min_time: schedule prefix cannot be closed");
    SwitchingSchedule s{prefix};
    s.durations.push_back(cl->on_u1);
    s.durations.push_back(cl->on_u2);
    return s;
}

/// Reference durations for the first 2n arcs of the fastest analytic
/// candidate with index n, or half-periods of y when no candidate exists.
inline std::vector<double> reference_prefix(const NormalizedProblem& prob, int n)
{
    std::vector<double> ref;
    std::optional<ExtremalCandidate> cand;
    for (SignBranch b : {SignBranch::Plus, SignBranch::Minus})
        if (auto c = build_candidate(n, b, prob); c && (!cand || c->total_time < cand->total_time)) cand = c;
    for (int k = 0; k < 2 * n; ++k) {
        if (cand) {
            ref.push_back(k == 0 ? cand->times.tau_i : (k % 2 == 1 ? cand->times.tau_u2 : cand->times.tau_u1));
        } else {
            const double u = k % 2 == 0 ? prob.u1() : prob.u2();
            ref.push_back(0.5 * std::numbers::pi / std::sqrt(u));
        }
    }
    return ref;
}

}  // namespace detail

/// Minimum total time over alternating schedules with 2n+1 switchings whose
/// endpoint error is below `tolerance`. Grid minima on the edge of the box are
/// discarded: they are degenerate schedules that collapse to fewer switchings.
inline BruteForceResult brute_force_min_time(const NormalizedProblem& prob, int n, double tolerance,
                                             OracleOptions opt = {})
{
    if (n < 0) throw domain_error("brute_force_min_time: n must be non-negative");
    if (opt.grid_points < 3) throw domain_error("brute_force_min_time: grid_points must be >= 3");

    auto finish = [&](const std::vector<double>& prefix, int refined) {
        BruteForceResult r;
        r.schedule = detail::close_schedule(prefix, prob, opt.arc_scan);
        r.endpoint_error = endpoint_error(r.schedule, prob);
        if (!(r.endpoint_error < tolerance))
            throw infeasible_error("brute_force_min_time: best schedule misses the target by " +
                                   std::to_string(r.endpoint_error));
        for (double d : r.schedule.durations) r.total_time += d;
        r.refined_minima = refined;
        return r;
    };

    if (n == 0) return finish({}, 0);

    const std::size_t dim = 2 * static_cast<std::size_t>(n);
    std::vector<double> ref = opt.reference.empty() ? detail::reference_prefix(prob, n) : opt.reference;
    if (ref.size() != dim) throw domain_error("brute_force_min_time: reference must hold 2n durations");

    const auto g = static_cast<std::size_t>(opt.grid_points);
    std::vector<double> step(dim);
    for (std::size_t i = 0; i < dim; ++i) step[i] = opt.box_factor * ref[i] / static_cast<double>(g);

    // Grid nodes (k + 1) * step, k = 0..g-1, in row-major order.
    std::size_t total = 1;
    for (std::size_t i = 0; i < dim; ++i) total *= g;
    auto node = [&](std::size_t flat) {
        std::vector<double> p(dim);
        for (std::size_t i = dim; i-- > 0;) {
            p[i] = static_cast<double>(flat % g + 1) * step[i];
            flat /= g;
        }
        return p;
    };
    std::vector<std::size_t> chunks;
    const std::size_t chunk = g;
    for (std::size_t f = 0; f < total; f += chunk) chunks.push_back(f);
    const auto blocks = parallel_map(chunks, [&](std::size_t first) {
        std::vector<double> v;
        for (std::size_t f = first; f < std::min(total, first + chunk); ++f)
            v.push_back(detail::closed_total(node(f), prob, opt.arc_scan));
        return v;
    });
    std::vector<double> values;
    values.reserve(total);
    for (const auto& b : blocks) values.insert(values.end(), b.begin(), b.end());

    // Interior nodes no larger than any of their 3^dim - 1 neighbours.
    std::vector<std::size_t> starts;
    for (std::size_t f = 0; f < total; ++f) {
        if (!std::isfinite(values[f])) continue;
        std::vector<std::size_t> idx(dim);
        bool interior = true;
        for (std::size_t i = dim, rest = f; i-- > 0; rest /= g) {
            idx[i] = rest % g;
            interior = interior && idx[i] > 0 && idx[i] + 1 < g;
        }
        if (!interior) continue;
        bool is_min = true;
        std::size_t neighbours = 1;
        for (std::size_t i = 0; i < dim; ++i) neighbours *= 3;
        for (std::size_t m = 0; m < neighbours && is_min; ++m) {
            std::size_t flat = 0, code = m;
            bool self = true;
            for (std::size_t i = 0; i < dim; ++i) {
                const std::size_t off = code % 3;
                code /= 3;
                self = self && off == 1;
                flat = flat * g + (idx[i] + off - 1);
            }
            if (!self && values[flat] < values[f]) is_min = false;
        }
        if (is_min) starts.push_back(f);
    }
    std::sort(starts.begin(), starts.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    if (starts.size() > static_cast<std::size_t>(opt.max_starts)) starts.resize(static_cast<std::size_t>(opt.max_starts));
    if (starts.empty()) throw infeasible_error("brute_force_min_time: no interior grid minimum; grid too coarse");

    std::optional<std::vector<double>> best;
    double best_value = std::numeric_limits<double>::infinity();
    int refined = 0;
    for (std::size_t f : starts) {
        std::vector<double> p = node(f);
        double value = values[f];
        std::vector<double> radius = step;
        for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
            const double before = value;
            for (std::size_t i = 0; i < dim; ++i) {
                const double start = p[i];
                auto along = [&](double v) {
                    auto q = p;
                    q[i] = v;
                    return detail::closed_total(q, prob, opt.arc_scan);
                };
                const double lo = std::max(p[i] - radius[i], 0.5 * step[i]);
                const double hi = std::min(p[i] + radius[i], opt.box_factor * ref[i]);
                const double v = roots::golden_section(along, lo, hi, opt.line_tol);
                const double fv = along(v);
                if (fv < value) {
                    value = fv;
                    p[i] = v;
                }
                radius[i] = std::max(2.0 * std::abs(p[i] - start), 10.0 * opt.line_tol);
            }
            if (before - value <= 1e-12 * value) break;
        }
        ++refined;
        // A refinement that slid onto the box edge is a degenerate schedule.
        bool interior = true;
        for (std::size_t i = 0; i < dim; ++i)
            interior = interior && p[i] > 1.0 * step[i] && p[i] < opt.box_factor * ref[i] - 0.5 * opt.line_tol;
        if (interior && value < best_value) {
            best_value = value;
            best = p;
        }
    }
    if (!best) throw infeasible_error("brute_force_min_time: every refinement degenerated to the box edge");
    return finish(*best, refined);
}

}  // namespace qpo
