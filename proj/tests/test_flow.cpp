#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hk/coords.hpp"
#include "hk/exact.hpp"
#include "hk/geometry.hpp"
#include "hk/integrate.hpp"
#include "hk/types.hpp"

using namespace hk;

namespace {

// Zero-energy start with mostly tangential horizontal velocity on a wide
// shell, so a 10-unit window stays clear of close approaches (which would
// dominate the drift budget). Deterministic via the caller's seeded engine.
PhaseState random_zero_energy_start(std::mt19937_64& rng) {
    const Params p;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double scale = 3.0;
    for (;;) {
        const double th = 2.0 * std::numbers::pi * u(rng);
        const double r = scale * (0.9 + 0.8 * u(rng));
        const ConfigPoint q{r * std::cos(th), r * std::sin(th),
                            scale * scale * 0.3 * (2.0 * u(rng) - 1.0)};
        const double U = potential(q, p);
        const double speed = std::sqrt(2.0 * U);
        const double dir = th + std::numbers::pi / 2.0 + 0.35 * (2.0 * u(rng) - 1.0);
        // momenta chosen so the horizontal momenta equal the desired velocity
        const double pz = 0.3 / (scale * scale) * (2.0 * u(rng) - 1.0);
        const double vx = speed * std::cos(dir), vy = speed * std::sin(dir);
        const PhaseState s{q, vx + 0.5 * q.y * pz, vy - 0.5 * q.x * pz, pz};
        if (std::fabs(hamiltonian(s, p)) < 1e-12) return s;
    }
}

}  // namespace

TEST_CASE("a zero step is the identity") {
    const PhaseState s{{1.2, -0.3, 0.4}, 0.2, 0.9, -0.1};
    const PhaseState out = step_implicit_midpoint(s, 0.0, Params{});
    const auto a = s.flat(), b = out.flat();
    for (int j = 0; j < 6; ++j) CHECK(a[j] == b[j]);
}

TEST_CASE("one free step matches the closed-form free flow to local order three") {
    const Params free{0.0};
    const PhaseState s0{{1, 0, 0}, 0, 1, 0.7};
    double prev_err = -1.0;
    for (const double dt : {1e-2, 5e-3, 2.5e-3}) {
        const PhaseState got = step_implicit_midpoint(s0, dt, free);
        const auto want = geodesic(s0, dt).flat();
        const auto have = got.flat();
        double err = 0.0;
        for (int j = 0; j < 6; ++j) err = std::max(err, std::fabs(have[j] - want[j]));
        CHECK(err <= 5.0 * dt * dt * dt);
        if (prev_err > 0.0) CHECK(prev_err / err > 6.0);  // ~8x per halving
        prev_err = err;
    }
}

TEST_CASE("angular momentum survives 1e5 steps to round-off") {
    std::mt19937_64 rng(211);
    const PhaseState s0 = random_zero_energy_start(rng);
    const double pt0 = angular_momentum(s0);
    PhaseState s = s0;
    for (int i = 0; i < 100000; ++i) s = step_implicit_midpoint(s, 1e-3, Params{});
    CHECK(std::fabs(angular_momentum(s) - pt0) <= 1e-12);
}

TEST_CASE("energy and invariant drifts over a long window") {
    std::mt19937_64 rng(223);
    IntegratorSpec spec;
    spec.step = 1e-3;
    const Params p;
    for (int k = 0; k < 3; ++k) {
        const PhaseState s0 = random_zero_energy_start(rng);
        const Trajectory traj = integrate(s0, 10.0, spec, p);
        if (traj.status != RunStatus::completed) continue;  // rare collision draw
        const double H0 = traj.samples.front().H;
        const double pt0 = traj.samples.front().ptheta;
        for (const Sample& smp : traj.samples) {
            CHECK(std::fabs(smp.H - H0) <= 1e-8);
            CHECK(std::fabs(smp.ptheta - pt0) <= 1e-12);
            CHECK(std::fabs(smp.Jres) <= 1e-6);
        }
    }
}

TEST_CASE("the flow is time reversible") {
    std::mt19937_64 rng(227);
    const PhaseState s0 = random_zero_energy_start(rng);
    PhaseState s = s0;
    for (int i = 0; i < 2000; ++i) s = step_implicit_midpoint(s, 1e-3, Params{});
    for (int i = 0; i < 2000; ++i) s = step_implicit_midpoint(s, -1e-3, Params{});
    const auto a = s0.flat(), b = s.flat();
    for (int j = 0; j < 6; ++j) CHECK(std::fabs(a[j] - b[j]) <= 1e-8);
}

TEST_CASE("the two integration methods agree on a benchmark run") {
    std::mt19937_64 rng(229);
    const PhaseState s0 = random_zero_energy_start(rng);
    IntegratorSpec mid;
    mid.step = 1e-3;
    IntegratorSpec rk;
    rk.method = Method::adaptive_rk;
    rk.tolerance = 1e-10;
    const Trajectory a = integrate(s0, 2.0, mid, Params{});
    const Trajectory b = integrate(s0, 2.0, rk, Params{});
    REQUIRE(a.status == RunStatus::completed);
    REQUIRE(b.status == RunStatus::completed);
    const auto fa = a.samples.back().s.flat();
    const auto fb = b.samples.back().s.flat();
    for (int j = 0; j < 6; ++j) CHECK(std::fabs(fa[j] - fb[j]) <= 1e-5);
}

TEST_CASE("radial infall ends in a collision event") {
    // Pure inward radial momentum on the plane, H < 0: reaches the origin.
    // The radial speed grows like 1/rho, so a fixed-step run needs the floor
    // raised to where its Newton solve is still healthy; the partial
    // trajectory up to the event is kept either way.
    const PhaseState s0{{1, 0, 0}, -0.5, 0, 0};
    IntegratorSpec spec;
    spec.step = 1e-5;
    spec.collision_floor = 1e-2;
    const Trajectory traj = integrate(s0, 10.0, spec, Params{});
    REQUIRE(!traj.samples.empty());
    CHECK(traj.status == RunStatus::collision);
    CHECK(rho(traj.samples.back().s.q) < 2e-2);
    CHECK(traj.samples.back().t < 10.0);
    CHECK(std::string(to_string(traj.status)) == "collision");
}

TEST_CASE("negative energy keeps the gauge radius under alpha over |H|") {
    const Params p;
    std::mt19937_64 rng(233);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    IntegratorSpec spec;
    spec.step = 1e-3;
    int tested = 0;
    while (tested < 5) {
        // Sample a bound state: kinetic energy a fraction of the potential.
        const double th = 2.0 * std::numbers::pi * u(rng);
        const double r = 1.0 + u(rng);
        const ConfigPoint q{r * std::cos(th), r * std::sin(th), 0.3 * (2.0 * u(rng) - 1.0)};
        const double speed = std::sqrt(2.0 * 0.7 * potential(q, p));
        const double dir = th + std::numbers::pi / 2.0;
        const PhaseState s0{q, speed * std::cos(dir), speed * std::sin(dir), 0.0};
        const double H = hamiltonian(s0, p);
        REQUIRE(H < 0.0);
        const Trajectory traj = integrate(s0, 5.0, spec, p);
        if (traj.status != RunStatus::completed) continue;
        ++tested;
        const double bound = p.alpha / std::fabs(H);
        for (const Sample& smp : traj.samples) CHECK(rho(smp.s.q) <= bound * (1.0 + 1e-9));
    }
}

TEST_CASE("axis equilibrium integrates as pure momentum fall") {
    const Params p;
    IntegratorSpec spec;
    spec.step = 1e-3;
    const PhaseState s0 = stationary_solution(1.0, 0.0, p);
    const Trajectory traj = integrate(s0, 1.0, spec, p);
    REQUIRE(traj.status == RunStatus::completed);
    for (const Sample& smp : traj.samples) {
        CHECK(std::fabs(smp.s.q.x) <= 1e-12);
        CHECK(std::fabs(smp.s.q.y) <= 1e-12);
        CHECK(smp.s.q.z == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(std::fabs(smp.s.pz - (-4.0 * p.alpha * smp.t)) <= 1e-8);
    }
}

TEST_CASE("planar conic starts stay on the conic relation") {
    const Params p;
    IntegratorSpec spec;
    spec.step = 2e-4;
    const ConicSpec ell{-1.0, p.alpha};
    const double t0 = 0.05;
    const PhaseState s0 = conic_state_on_N(ell, t0);
    const Trajectory traj = integrate(s0, 0.3, spec, p);
    REQUIRE(traj.status == RunStatus::completed);
    for (const Sample& smp : traj.samples) {
        const double t = t0 + smp.t;
        const double r2 = smp.s.q.x * smp.s.q.x + smp.s.q.y * smp.s.q.y;
        CHECK(std::fabs(r2 + 2.0 * t * t - p.alpha) <= 1e-6);
        CHECK(std::fabs(smp.s.q.z) <= 1e-12);  // the plane is invariant
        CHECK(std::fabs(smp.s.pz) <= 1e-12);
    }
}

TEST_CASE("dilation equivariance of the numeric flow") {
    std::mt19937_64 rng(239);
    const PhaseState s0 = random_zero_energy_start(rng);
    IntegratorSpec spec;
    spec.step = 1e-3;
    SUBCASE("identity dilation is exact") {
        const auto rep = check_dilation_equivariance(s0, 1.0, 1.0, spec, Params{});
        CHECK(rep.max_state_deviation == 0.0);
    }
    SUBCASE("doubling") {
        const auto rep = check_dilation_equivariance(s0, 2.0, 1.0, spec, Params{});
        REQUIRE(rep.base_status == RunStatus::completed);
        REQUIRE(rep.dilated_status == RunStatus::completed);
        CHECK(rep.max_state_deviation <= 1e-6);
        CHECK(rep.energy_scale_error <= 1e-10);
    }
    SUBCASE("halving") {
        const auto rep = check_dilation_equivariance(s0, 0.5, 0.5, spec, Params{});
        REQUIRE(rep.base_status == RunStatus::completed);
        REQUIRE(rep.dilated_status == RunStatus::completed);
        CHECK(rep.max_state_deviation <= 1e-6);
        CHECK(rep.energy_scale_error <= 1e-10);
    }
}

TEST_CASE("planar trajectories reduce to the origin of the v plane") {
    const Params p;
    IntegratorSpec spec;
    spec.step = 1e-3;
    const ConicSpec par{0.0, p.alpha};
    const Trajectory traj = integrate(conic_state_on_N(par, 0.5), 1.0, spec, p);
    REQUIRE(traj.status == RunStatus::completed);
    for (const ReducedState& r : reduced_projection(traj)) {
        CHECK(std::fabs(r.v) <= 1e-12);
        CHECK(std::fabs(r.pv) <= 1e-12);
    }
}

TEST_CASE("zero-energy runs stay on the unit level of the scale-free energy") {
    const Params p;
    std::mt19937_64 rng(241);
    IntegratorSpec spec;
    spec.step = 2.5e-4;
    int tested = 0;
    while (tested < 3) {
        const PhaseState s0 = random_zero_energy_start(rng);
        const Trajectory traj = integrate(s0, 1.0, spec, p);
        if (traj.status != RunStatus::completed) continue;
        ++tested;
        const double J0 = traj.samples.front().J;
        const double pt0 = traj.samples.front().ptheta;
        const auto reduced = reduced_projection(traj);
        for (size_t i = 0; i < reduced.size(); ++i) {
            ReducedState r = reduced[i];
            r.J = J0;       // frozen invariants label the level set
            r.ptheta = pt0;
            CHECK(std::fabs(htilde(r, p) - 1.0) <= 1e-6);
            CHECK(std::fabs(traj.samples[i].J - J0 - 2.0 * traj.samples.front().H *
                                                          traj.samples[i].t) <= 1e-6);
            CHECK(std::fabs(traj.samples[i].ptheta - pt0) <= 1e-8);
        }
    }
}
