#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "qpo/bounds.hpp"
#include "qpo/dynamics.hpp"
#include "qpo/extremal.hpp"
#include "support.hpp"

using namespace qpo;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using qpo_test::rel_err;
using qpo_test::uniform;

// coth(1) and coth(1/2)/2 from a 50-digit evaluation
constexpr double coth1 = 1.3130352854993313036;
constexpr double half_coth_half = 1.0819767068693264244;

TEST_CASE("thermal energy limits and closed form")
{
    // classical equipartition, E ~ T + w^2/(12 T)
    CHECK_THAT(thermal_energy(1.0, 1e6), WithinRel(1e6, 1e-12));
    // ground state
    CHECK_THAT(thermal_energy(1.0, 1e-6), WithinRel(0.5, 1e-15));
    CHECK_THAT(thermal_energy(2.0, 1.0), WithinRel(coth1, 1e-15));

    // coth x = 1/x + x/3 - x^3/45 + 2x^5/945 - x^7/4725 + ...
    const double x = 0.1;
    const double series = 1 / x + x / 3 - std::pow(x, 3) / 45 + 2 * std::pow(x, 5) / 945 - std::pow(x, 7) / 4725;
    CHECK_THAT(thermal_energy(0.2, 1.0), WithinRel(0.1 * series, 1e-12));

    // hbar, k_b enter only through hbar w / (2 k_b T)
    CHECK_THAT(thermal_energy(2.0, 3.0, 1.5, 4.5), WithinRel(1.5 / std::tanh(1.0 / 9.0), 1e-15));
}

TEST_CASE("initial moments")
{
    const PhysicalParams p{0.5, 2.0, 1.0};
    const ZState z = thermal_initial_z(p);
    CHECK_THAT(z.z1, WithinRel(coth1 / 4, 1e-15));
    CHECK_THAT(z.z2, WithinRel(coth1, 1e-15));
    CHECK(z.z3 == 0.0);
    CHECK_THAT(casimir(z), WithinRel(coth1 * coth1 / 4, 1e-15));

    const ZState unit = thermal_initial_z(qpo_test::unit_energy_params());
    CHECK_THAT(unit.z1, WithinRel(1.0, 1e-14));
    CHECK_THAT(unit.z2, WithinRel(1.0, 1e-14));
    CHECK(unit.z3 == 0.0);

    for (int i = 0; i < 50; ++i) {
        const double wh = qpo_test::log_uniform(1e-2, 1e2);
        const PhysicalParams q{wh * uniform(1e-3, 0.99), wh, qpo_test::log_uniform(1e-3, 1e3)};
        CHECK(thermal_initial_z(q).z3 == 0.0);
    }
}

TEST_CASE("casimir values")
{
    CHECK(casimir({1, 1, 0}) == 1.0);
    CHECK(casimir({2, 2, 4}) == 0.0);
}

TEST_CASE("x_from_z maps the thermal state to (1, 0)")
{
    for (int i = 0; i < 50; ++i) {
        const double wh = qpo_test::log_uniform(1e-2, 1e2);
        const PhysicalParams p{wh * uniform(1e-3, 0.99), wh, qpo_test::log_uniform(1e-3, 1e3)};
        const PhaseState x = x_from_z(thermal_initial_z(p), p);
        CHECK_THAT(x.x1, WithinRel(1.0, 1e-14));
        CHECK(x.x2 == 0.0);
    }
    const PhysicalParams p{0.5, 2.0, 1.0};
    const double e0 = initial_energy(p);
    const PhaseState x = x_from_z({4 * e0 / 4.0, 0.0, 0.0}, p);
    CHECK_THAT(x.x1, WithinRel(2.0, 1e-15));
    CHECK(x.x2 == 0.0);

    CHECK_THROWS_AS(x_from_z({0.0, 1.0, 0.0}, p), qpo::domain_error);
    CHECK_THROWS_AS(x_from_z({-1.0, 1.0, 0.0}, p), qpo::domain_error);
}

TEST_CASE("z_from_x")
{
    const auto p = qpo_test::unit_energy_params();
    const ZState z = z_from_x({2.0, 1.0}, p);
    CHECK_THAT(z.z1, WithinRel(4.0, 1e-14));
    CHECK_THAT(z.z2, WithinRel(1.25, 1e-14));
    CHECK_THAT(z.z3, WithinRel(4.0, 1e-14));
    CHECK_THAT(casimir(z), WithinRel(1.0, 1e-13));

    const ZState z0 = z_from_x({1.0, 0.0}, p);
    const ZState th = thermal_initial_z(p);
    CHECK_THAT(z0.z1, WithinRel(th.z1, 1e-15));
    CHECK_THAT(z0.z2, WithinRel(th.z2, 1e-15));
    CHECK(z0.z3 == 0.0);

    // the target (gamma, 0) is the thermal state at omega_c with E_f = E0 / gamma^2
    const PhysicalParams q{0.04, 1.0, 3.0};
    const double g = q.gamma();
    const double e0 = initial_energy(q);
    const ZState zf = z_from_x({g, 0.0}, q);
    CHECK_THAT(zf.z1, WithinRel(e0 / (q.omega_c * q.omega_c) / (g * g) * 1.0, 1e-14));
    CHECK_THAT(zf.z2, WithinRel(e0 / (g * g), 1e-14));
    CHECK_THAT(energy(zf, q.omega_c), WithinRel(e0 / (g * g), 1e-14));
}

TEST_CASE("round trip x -> z -> x")
{
    const PhysicalParams p{0.3, 1.7, 0.8};
    for (int i = 0; i < 2000; ++i) {
        const PhaseState x{qpo_test::log_uniform(0.1, 100.0), uniform(-100.0, 100.0)};
        const PhaseState back = x_from_z(z_from_x(x, p), p);
        REQUIRE(rel_err(back.x1, x.x1) < 1e-12);
        REQUIRE(std::abs(back.x2 - x.x2) <= 1e-12 * std::max(1.0, std::abs(x.x2)));
    }
}

TEST_CASE("effective temperature")
{
    const PhysicalParams p{0.04, 1.0, 3.0};
    // final energy of an exact protocol gives T_c = (omega_c / omega_h) T_h
    const double ef = initial_energy(p) * p.omega_c / p.omega_h;
    CHECK_THAT(effective_temperature(ef, p), WithinRel(p.T_h * p.omega_c / p.omega_h, 1e-12));

    const PhysicalParams unit_c{1.0, 2.0, 1.0};
    CHECK_THAT(effective_temperature(half_coth_half, unit_c), WithinRel(1.0, 1e-14));
    CHECK(effective_temperature(0.5, unit_c) == 0.0);
    CHECK_THROWS_AS(effective_temperature(0.49, unit_c), qpo::domain_error);

    for (int i = 0; i < 200; ++i) {
        const double T = qpo_test::log_uniform(1e-2, 1e3);
        REQUIRE(rel_err(effective_temperature(thermal_energy(p.omega_c, T), p), T) < 1e-10);
    }
}

TEST_CASE("physical parameter validation")
{
    CHECK_THROWS_AS(PhysicalParams({1.0, 1.0, 1.0}).validate(), qpo::domain_error);
    CHECK_THROWS_AS(PhysicalParams({2.0, 1.0, 1.0}).validate(), qpo::domain_error);
    CHECK_THROWS_AS(PhysicalParams({0.5, 1.0, 0.0}).validate(), qpo::domain_error);
    CHECK_NOTHROW(PhysicalParams({0.5, 1.0, 1.0}).validate());
    CHECK_THAT(NormalizedProblem::from_physical({0.25, 1.0, 1.0}).gamma(), WithinRel(2.0, 1e-15));

    CHECK_THROWS_AS(NormalizedProblem::from_gamma(1.0), qpo::domain_error);
    CHECK_THROWS_AS(NormalizedProblem::from_gamma(0.5), qpo::domain_error);
    CHECK_THROWS_AS(NormalizedProblem::from_gamma(2e3), qpo::domain_error);
    CHECK_NOTHROW(NormalizedProblem::from_gamma(1.0 + 1e-9));
    try {
        (void)NormalizedProblem::from_gamma(1.0);
    } catch (const qpo::domain_error& e) {
        CHECK_THAT(std::string(e.what()), Catch::Matchers::ContainsSubstring("gamma > 1"));
    }
}

TEST_CASE("propagate_segment fixed points")
{
    for (double t : {0.0, 0.3, 5.0, 1e3}) {
        const PhaseState x = propagate_segment({1.0, 0.0}, 1.0, t);
        CHECK_THAT(x.x1, WithinAbs(1.0, 1e-15));
        CHECK_THAT(x.x2, WithinAbs(0.0, 1e-15));
    }
    for (double u : {1e-12, 1e-4, 0.3, 1.0, 7.0}) {
        const double xs = std::pow(u, -0.25);
        const PhaseState x = propagate_segment({xs, 0.0}, u, 12.3);
        CHECK_THAT(x.x1, WithinRel(xs, 1e-14));
        CHECK_THAT(x.x2, WithinAbs(0.0, 1e-14 * xs));
    }
}

TEST_CASE("propagate_segment reaches the one-switch point at gamma 2")
{
    const auto prob = NormalizedProblem::from_gamma(2.0);
    const auto s = solve_switch_ratio(0, SignBranch::Plus, prob);
    REQUIRE(s);
    const double tau_i = segment_times(*s, SignBranch::Plus, prob).tau_i;
    const PhaseState x = propagate_segment({1.0, 0.0}, 1.0 / 16.0, tau_i);
    // independent 50-digit shooting
    CHECK_THAT(x.x1, WithinRel(1.8439088914585775, 1e-12));
    CHECK_THAT(x.x2, WithinRel(0.74557518262156263, 1e-12));
    // x1^2 = 3.4, x2^2 = 0.5559 from the invariant curves
    CHECK_THAT(x.x1 * x.x1, WithinRel(3.4, 1e-12));
    CHECK_THAT(x.x2 * x.x2, WithinRel(0.555882352941176, 1e-12));
}

TEST_CASE("propagate_segment periodicity")
{
    for (double u : {1.0 / 16.0, 1e-8, 1.0, 3.0}) {
        const double period = std::numbers::pi / std::sqrt(u);
        const PhaseState x = propagate_segment({1.0, 0.0}, u, period);
        CHECK_THAT(x.x1, WithinAbs(1.0, 1e-8));
        CHECK_THAT(x.x2, WithinAbs(0.0, 1e-8));
    }
}

TEST_CASE("propagate_segment rejects bad input")
{
    CHECK_THROWS_AS(propagate_segment({1.0, 0.0}, 1.0, -1.0), qpo::domain_error);
    CHECK_THROWS_AS(propagate_segment({1.0, 0.0}, 0.0, 1.0), qpo::domain_error);
    CHECK_THROWS_AS(propagate_segment({1.0, 0.0}, -1.0, 1.0), qpo::domain_error);
    CHECK_THROWS_AS(propagate_segment({0.0, 0.0}, 1.0, 1.0), qpo::domain_error);
}

TEST_CASE("segment invariant is conserved")
{
    for (int i = 0; i < 2000; ++i) {
        const PhaseState x{qpo_test::log_uniform(0.05, 50.0), uniform(-20.0, 20.0)};
        const double u = qpo_test::log_uniform(1e-12, 10.0);
        const double t = uniform(0.0, 3.0 * std::numbers::pi / std::sqrt(u));
        const PhaseState y = propagate_segment(x, u, t);
        REQUIRE(rel_err(segment_invariant(y, u), segment_invariant(x, u)) < 1e-12);
    }
}

TEST_CASE("propagator group property")
{
    for (int i = 0; i < 2000; ++i) {
        const PhaseState x{qpo_test::log_uniform(0.1, 20.0), uniform(-5.0, 5.0)};
        const double u = qpo_test::log_uniform(1e-8, 4.0);
        const double scale = 1.0 / std::sqrt(u);
        const double t1 = uniform(0.0, 2.0 * scale), t2 = uniform(0.0, 2.0 * scale);
        const PhaseState a = propagate_segment(x, u, t1 + t2);
        const PhaseState b = propagate_segment(propagate_segment(x, u, t1), u, t2);
        const double size = std::hypot(a.x1, a.x2);
        REQUIRE(std::hypot(a.x1 - b.x1, a.x2 - b.x2) <= 1e-10 * std::max(1.0, size));
    }
}

TEST_CASE("closed form agrees with RK4 at fourth order")
{
    int compared = 0;
    for (int i = 0; i < 1000; ++i) {
        const PhaseState x{uniform(0.5, 3.0), uniform(-2.0, 2.0)};
        const double u = qpo_test::log_uniform(1e-3, 1.0);
        const double t = uniform(0.1, 3.0);
        const PhaseState exact = propagate_segment(x, u, t);
        const PhaseState h1 = integrate_numeric(x, u, t, 2e-3);
        const PhaseState h2 = integrate_numeric(x, u, t, 1e-3);
        const double e1 = std::hypot(h1.x1 - exact.x1, h1.x2 - exact.x2);
        const double e2 = std::hypot(h2.x1 - exact.x1, h2.x2 - exact.x2);
        const double size = std::hypot(exact.x1, exact.x2);
        REQUIRE(e2 < 1e-6 * size);
        // halving dt cuts the error by ~16 while it is above rounding noise
        if (e1 > 1e-11 * size) {
            ++compared;
            REQUIRE(e2 < e1 / 10.0);
        }
    }
    CHECK(compared > 100);
}

TEST_CASE("integrate_numeric fixed point and guards")
{
    const PhaseState x = integrate_numeric({1.0, 0.0}, 1.0, 5.0, 1e-3);
    CHECK_THAT(x.x1, WithinAbs(1.0, 1e-10));
    CHECK_THAT(x.x2, WithinAbs(0.0, 1e-10));
    CHECK_THROWS_AS(integrate_numeric({1.0, 0.0}, 1.0, 1.0, 0.0), qpo::domain_error);
    // a violent inward start with a huge step crosses x1 = 0
    CHECK_THROWS_AS(integrate_numeric({1e-3, -1e3}, 1.0, 1.0, 0.5), qpo::numeric_error);
}

TEST_CASE("protocol validation")
{
    CHECK_THROWS_AS(Protocol::from_segments(2.0, {{0.5, -1.0}}), qpo::domain_error);
    Protocol bad{2.0, {{1.0, 1.0}}, 3.0};
    CHECK_THROWS_AS(bad.validate(), qpo::domain_error);
    const auto prob = NormalizedProblem::from_gamma(2.0);
    CHECK_THROWS_AS(Protocol::from_segments(2.0, {{2.0, 1.0}}).validate_bounds(prob), qpo::domain_error);
    CHECK_THROWS_AS(Protocol::from_segments(2.0, {{1e-3, 1.0}}).validate_bounds(prob), qpo::domain_error);
    CHECK_NOTHROW(Protocol::from_segments(2.0, {{1.0 / 16.0, 1.0}, {1.0, 1.0}}).validate_bounds(prob));
}

TEST_CASE("simulate_protocol sampling")
{
    const auto empty = simulate_protocol(Protocol::from_segments(2.0, {}), {1.0, 0.0}, 0.1);
    REQUIRE(empty.size() == 1);
    CHECK(empty[0].t == 0.0);
    CHECK(empty[0].state.x1 == 1.0);
    CHECK(empty[0].state.x2 == 0.0);

    const Protocol p = Protocol::from_segments(2.0, {{0.0625, 0.25}, {1.0, 0.1}});
    const auto samples = simulate_protocol(p, {1.0, 0.0}, 0.1);
    std::vector<double> times;
    for (const auto& s : samples) times.push_back(s.t);
    REQUIRE(times.size() == 6);  // 0, .1, .2, .25, .3, .35
    CHECK_THAT(times[3], WithinAbs(0.25, 1e-15));
    CHECK_THAT(times.back(), WithinAbs(0.35, 1e-15));
    CHECK(samples[2].u == 0.0625);
    CHECK(samples[3].u == 1.0);  // boundary reports the next control
    CHECK(samples.back().u == 1.0);
    for (std::size_t i = 1; i < samples.size(); ++i) CHECK(samples[i].t > samples[i - 1].t);

    CHECK_THROWS_AS(simulate_protocol(p, {1.0, 0.0}, 0.0), qpo::domain_error);
}

TEST_CASE("optimal protocol at gamma 2 lands on (2, 0)")
{
    const auto prob = NormalizedProblem::from_gamma(2.0);
    const auto syn = synthesize_optimal(prob);
    const auto samples = simulate_protocol(syn.protocol, {1.0, 0.0}, 0.01);
    CHECK_THAT(samples.back().state.x1, WithinAbs(2.0, 1e-6));
    CHECK_THAT(samples.back().state.x2, WithinAbs(0.0, 1e-6));
    CHECK_THAT(samples.back().t, WithinRel(syn.protocol.total_time, 1e-15));
}

TEST_CASE("one-switch baseline at omega_c/omega_h = 0.01 lands on (10, 0)")
{
    const Protocol base = salamon_protocol(0.01, 1.0);
    const PhaseState end = protocol_endpoint(base, {1.0, 0.0});
    CHECK_THAT(end.x1, WithinAbs(10.0, 1e-6));
    CHECK_THAT(end.x2, WithinAbs(0.0, 1e-6));
}

TEST_CASE("Casimir conservation along random protocols")
{
    const PhysicalParams p{0.01, 1.0, 2.0};
    const double u1 = 1e-4;
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<Segment> segs;
        const int k = 1 + static_cast<int>(uniform(0.0, 6.0));
        for (int i = 0; i < k; ++i) segs.push_back({i % 2 == 0 ? u1 : 1.0, uniform(0.05, 4.0)});
        const Protocol pr = Protocol::from_segments(10.0, segs);
        const auto closed = simulate_protocol(pr, {1.0, 0.0}, 0.01);
        REQUIRE(casimir_spread(closed, p) < 1e-9);

        // RK4 at dt = 1e-4 over the same segments
        std::vector<TrajectorySample> numeric{{0.0, {1.0, 0.0}, segs.front().u}};
        PhaseState x{1.0, 0.0};
        for (const auto& s : segs) {
            for (int j = 0; j < 4; ++j) {
                x = integrate_numeric(x, s.u, s.duration / 4, 1e-4);
                numeric.push_back({0.0, x, s.u});
            }
        }
        REQUIRE(casimir_spread(numeric, p) < 1e-6);
    }
}

TEST_CASE("energy bound along optimal trajectories")
{
    for (double g : {1.5, 2.0, 5.0, 10.0, 100.0}) {
        const auto prob = NormalizedProblem::from_gamma(g);
        const auto p = unit_params(g);
        const double e0 = initial_energy(p);
        const auto syn = synthesize_optimal(prob);
        for (const auto& s : simulate_protocol(syn.protocol, {1.0, 0.0}, 0.01)) {
            const double root_u = std::sqrt(s.u);
            const double e = energy(z_from_x(s.state, p), root_u * p.omega_h);
            const double bound = root_u * e0;
            REQUIRE(e >= bound * (1.0 - 1e-12));
            // the excess is a sum of squares vanishing only at (u^-1/4, 0)
            const double off = root_u * s.state.x1 - 1.0 / s.state.x1;
            const double excess = 0.5 * e0 * (s.state.x2 * s.state.x2 + off * off);
            REQUIRE(std::abs((e - bound) - excess) <= 1e-12 * e);
        }
    }
}

TEST_CASE("energy bound is attained only at the equilibrium")
{
    const auto p = unit_params(10.0);
    const double e0 = initial_energy(p);
    for (double u : {1e-4, 0.01, 0.5, 1.0}) {
        const double omega = std::sqrt(u) * p.omega_h;
        const double xs = std::pow(u, -0.25);
        CHECK_THAT(energy(z_from_x({xs, 0.0}, p), omega), WithinRel(std::sqrt(u) * e0, 1e-14));
        for (const PhaseState off : {PhaseState{xs, 1e-3}, PhaseState{xs * (1 + 1e-3), 0.0}})
            CHECK(energy(z_from_x(off, p), omega) > std::sqrt(u) * e0 * (1 + 1e-8));
    }
}
