#pragma once

#include <algorithm>
#include <iterator>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "qpo/errors.hpp"

namespace qpo::roots {

/// Bisection on a bracket [lo, hi] with f(lo), f(hi) of opposite sign.
/// With x_tol == 0 it runs until the midpoint is no longer strictly inside
/// the bracket, i.e. to the resolution of double.
template <class F>
double bisect(F&& f, double lo, double hi, double f_lo, double x_tol = 0.0, int max_iter = 400)
{
    const bool lo_negative = f_lo < 0.0;
    for (int i = 0; i < max_iter; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        if (hi - lo <= x_tol) break;
        const double f_mid = f(mid);
        if (f_mid == 0.0) return mid;
        if ((f_mid < 0.0) == lo_negative)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// Evaluates f on an increasing grid and refines every sign change by bisection.
/// Exact zeros on grid nodes are reported as roots. Non-finite samples break brackets.
template <class F>
std::vector<double> scan(F&& f, std::span<const double> grid, double x_tol = 0.0)
{
    std::vector<double> found;
    if (grid.empty()) return found;

    double x_prev = grid[0];
    double f_prev = f(x_prev);
    if (f_prev == 0.0) found.push_back(x_prev);

    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double x = grid[i];
        const double fx = f(x);
        if (fx == 0.0) {
            found.push_back(x);
        } else if (std::isfinite(f_prev) && std::isfinite(fx) && f_prev != 0.0 &&
                   (f_prev < 0.0) != (fx < 0.0)) {
            found.push_back(bisect(f, x_prev, x, f_prev, x_tol));
        }
        x_prev = x;
        f_prev = fx;
    }
    return found;
}

/// brackets + 1 uniformly spaced nodes from lo to hi, endpoints exact.
inline std::vector<double> uniform_grid(double lo, double hi, std::size_t brackets)
{
    if (brackets == 0 || !(hi > lo)) throw domain_error("uniform_grid: need brackets > 0 and hi > lo");
    std::vector<double> g(brackets + 1);
    const double step = (hi - lo) / static_cast<double>(brackets);
    for (std::size_t i = 0; i <= brackets; ++i) g[i] = lo + step * static_cast<double>(i);
    g.back() = hi;
    return g;
}

/// points nodes spaced geometrically from lo to hi (both > 0), endpoints exact.
inline std::vector<double> log_grid(double lo, double hi, std::size_t points)
{
    if (points < 2 || !(lo > 0.0) || !(hi > lo)) throw domain_error("log_grid: need points >= 2 and 0 < lo < hi");
    std::vector<double> g(points);
    const double ratio = std::log(hi / lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) g[i] = lo * std::exp(ratio * static_cast<double>(i));
    g.front() = lo;
    g.back() = hi;
    return g;
}

/// Sorted union of two grids with exact duplicates removed.
inline std::vector<double> merge_grids(std::vector<double> a, const std::vector<double>& b)
{
    std::vector<double> out;
    out.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    a = std::move(out);
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
}

/// Golden-section minimisation of a unimodal f on [lo, hi]. Returns the abscissa.
template <class F>
double golden_section(F&& f, double lo, double hi, double x_tol)
{
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > x_tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return fc < fd ? c : d;
}

}  // namespace qpo::roots
