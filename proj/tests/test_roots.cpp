#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numbers>

#include "qpo/roots.hpp"

using namespace qpo::roots;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("bisect to double resolution")
{
    auto f = [](double x) { return x * x - 2.0; };
    const double r = bisect(f, 0.0, 2.0, f(0.0));
    CHECK(std::abs(r - std::numbers::sqrt2) <= 2 * std::numeric_limits<double>::epsilon());

    // decreasing function, tolerance stop
    auto g = [](double x) { return std::cos(x); };
    CHECK_THAT(bisect(g, 0.0, 3.0, g(0.0), 1e-6), WithinAbs(std::numbers::pi / 2, 1e-6));
}

TEST_CASE("scan finds every sign change")
{
    const auto grid = uniform_grid(0.1, 10.0, 1000);
    const auto roots = scan([](double x) { return std::sin(x); }, grid);
    REQUIRE(roots.size() == 3);
    for (int k = 1; k <= 3; ++k) CHECK_THAT(roots[k - 1], WithinRel(k * std::numbers::pi, 1e-14));

    // exact zero on a node is reported once
    const auto on_node = scan([](double x) { return x - 1.0; }, uniform_grid(0.0, 2.0, 4));
    REQUIRE(on_node.size() == 1);
    CHECK(on_node[0] == 1.0);

    // non-finite samples do not create spurious roots
    const auto gap = scan([](double x) { return x < 1.0 ? -1.0 : (x < 2.0 ? NAN : 1.0); }, uniform_grid(0.0, 3.0, 30));
    CHECK(gap.empty());
}

TEST_CASE("grids")
{
    const auto u = uniform_grid(1.0, 2.0, 4);
    REQUIRE(u.size() == 5);
    CHECK(u.front() == 1.0);
    CHECK(u.back() == 2.0);
    CHECK_THAT(u[2], WithinRel(1.5, 1e-15));

    const auto l = log_grid(1e-3, 1e3, 7);
    REQUIRE(l.size() == 7);
    CHECK(l.front() == 1e-3);
    CHECK(l.back() == 1e3);
    CHECK_THAT(l[3], WithinRel(1.0, 1e-14));

    const auto m = merge_grids({1.0, 3.0}, {2.0, 3.0, 0.5});
    CHECK(m == std::vector<double>{0.5, 1.0, 2.0, 3.0});

    CHECK_THROWS_AS(uniform_grid(1.0, 1.0, 3), qpo::domain_error);
    CHECK_THROWS_AS(log_grid(0.0, 1.0, 3), qpo::domain_error);
    CHECK_THROWS_AS(log_grid(1.0, 2.0, 1), qpo::domain_error);
}

TEST_CASE("golden section")
{
    CHECK_THAT(golden_section([](double x) { return (x - 0.3) * (x - 0.3); }, -1.0, 2.0, 1e-9), WithinAbs(0.3, 1e-8));
    CHECK_THAT(golden_section([](double x) { return -std::sin(x); }, 0.0, 3.0, 1e-9),
               WithinAbs(std::numbers::pi / 2, 1e-7));
}
