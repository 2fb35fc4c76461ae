#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hk/coords.hpp"
#include "hk/geometry.hpp"
#include "hk/types.hpp"

using namespace hk;

namespace {

PhaseState random_offaxis_state(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    PhaseState s;
    do {
        s = {{1.0 + u(rng), u(rng), u(rng)}, u(rng), u(rng), u(rng)};
    } while (s.q.x * s.q.x + s.q.y * s.q.y < 0.04);
    return s;
}

}  // namespace

TEST_CASE("cylindrical chart at axis-aligned states") {
    const CylState a = to_cylindrical({{1, 0, 0}, 1, 0, 0});
    CHECK(a.r == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(a.theta == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(a.pr == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(a.ptheta == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(a.pz == doctest::Approx(0.0).epsilon(1e-15));

    const CylState b = to_cylindrical({{0, 2, 0}, 0, 0, 0});
    CHECK(b.r == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(b.theta == doctest::Approx(std::numbers::pi / 2).epsilon(1e-15));

    CHECK_THROWS_AS(to_cylindrical({{0, 0, 1}, 0, 0, 0}), AxisSingular);
}

TEST_CASE("cylindrical round-trip is exact to round-off") {
    std::mt19937_64 rng(101);
    for (int i = 0; i < 100; ++i) {
        const PhaseState s = random_offaxis_state(rng);
        const PhaseState b = from_cylindrical(to_cylindrical(s));
        const auto f0 = s.flat(), f1 = b.flat();
        for (int j = 0; j < 6; ++j) CHECK(f1[j] == doctest::Approx(f0[j]).epsilon(1e-12));
    }
}

TEST_CASE("cylindrical momenta reproduce the Cartesian Hamiltonian") {
    // The chart is a point transformation, so H must agree chart-free.
    const Params p;
    std::mt19937_64 rng(103);
    for (int i = 0; i < 100; ++i) {
        const PhaseState s = random_offaxis_state(rng);
        const CylState c = to_cylindrical(s);
        const double r2 = c.r * c.r;
        const double K = 0.5 * c.pr * c.pr +
                         0.5 * std::pow(c.ptheta / c.r + 0.5 * c.r * c.pz, 2);
        const double g = r2 * r2 + c.z * c.z / 16.0;
        const double Hc = K - p.alpha / std::sqrt(g);
        CHECK(Hc == doctest::Approx(hamiltonian(s, p)).epsilon(1e-12));
    }
}

TEST_CASE("reduced record at reference states") {
    const ReducedState a = to_reduced({{1, 0, 0}, 0, 0, 0});
    CHECK(a.v == 0.0);
    CHECK(a.pv == 0.0);

    // r=2, z=4, p_r=0, p_z=1: v = z/r^2 = 1, p_v = r^2 p_z = 4,
    // J = r p_r + 2 z p_z = 8 (the dilation generator, chart-free).
    const PhaseState s{{2, 0, 4}, 0, 0, 1};
    const ReducedState b = to_reduced(s);
    CHECK(b.v == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(b.pv == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(b.J == doctest::Approx(8.0).epsilon(1e-15));
    CHECK(b.J == doctest::Approx(dilation_moment(s)).epsilon(1e-15));
}

TEST_CASE("reduced J equals the dilation moment at random states") {
    std::mt19937_64 rng(107);
    for (int i = 0; i < 100; ++i) {
        const PhaseState s = random_offaxis_state(rng);
        const ReducedState r = to_reduced(s);
        CHECK(r.J == doctest::Approx(dilation_moment(s)).epsilon(1e-12));
        CHECK(r.ptheta == doctest::Approx(angular_momentum(s)).epsilon(1e-12));
    }
}

TEST_CASE("htilde is the kinetic-to-potential ratio") {
    const Params p;
    // p = 0 makes K = 0.
    CHECK(htilde(to_reduced({{1, 0, 0}, 0, 0, 0}), p) == doctest::Approx(0.0).epsilon(1e-15));
    // K = U state: p_y = 2/sqrt(pi) at (1,0,0).
    const PhaseState z0{{1, 0, 0}, 0, 2.0 / std::sqrt(std::numbers::pi), 0};
    REQUIRE(hamiltonian(z0, p) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(htilde(to_reduced(z0), p) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("htilde agrees with K/U and is dilation invariant") {
    const Params p;
    std::mt19937_64 rng(109);
    for (int i = 0; i < 100; ++i) {
        const PhaseState s = random_offaxis_state(rng);
        const double want = kinetic(s) / potential(s.q, p);
        CHECK(htilde(to_reduced(s), p) == doctest::Approx(want).epsilon(1e-10));
        for (const double lam : {0.5, 2.0, 5.0}) {
            CHECK(htilde(to_reduced(dilate(s, lam)), p) ==
                  doctest::Approx(htilde(to_reduced(s), p)).epsilon(1e-10));
        }
    }
}

TEST_CASE("zero-energy states hit the requested invariants") {
    const Params p;
    std::mt19937_64 rng(113);
    std::uniform_real_distribution<double> uj(-1.0, 1.0), uv(-2.0, 2.0);
    int produced = 0;
    for (int i = 0; i < 200; ++i) {
        const double J = uj(rng), pt = uj(rng), v = uv(rng);
        for (const int branch : {+1, -1}) {
            const auto st = zero_energy_state(J, pt, v, p, branch);
            if (!st) continue;
            ++produced;
            CHECK(std::fabs(hamiltonian(*st, p)) <= 1e-12);
            CHECK(dilation_moment(*st) == doctest::Approx(J).epsilon(1e-10));
            CHECK(angular_momentum(*st) == doctest::Approx(pt).epsilon(1e-10));
            const ReducedState r = to_reduced(*st);
            CHECK(r.v == doctest::Approx(v).epsilon(1e-10));
            CHECK(htilde(r, p) == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
    CHECK(produced > 100);
}

TEST_CASE("zero-energy feasibility boundary") {
    const Params p;
    // |J + 4 v p_theta| must not exceed sqrt(2 alpha (1+16 v^2)/sqrt(1+v^2/16)).
    auto bound = [&](double v) {
        return std::sqrt(2.0 * p.alpha * (1.0 + 16.0 * v * v) /
                         std::sqrt(1.0 + v * v / 16.0));
    };
    // v = 0: bound = sqrt(2 alpha) ~ 1.128. J = 3 with p_theta = 1 is infeasible there.
    CHECK(std::fabs(3.0 + 0.0) > bound(0.0));
    CHECK_FALSE(zero_energy_state(3.0, 1.0, 0.0, p).has_value());
    // The line J + 4 v p_theta shrinks as v -> -J/(4 p_theta) = -0.75; feasible nearby.
    CHECK(zero_energy_state(3.0, 1.0, -0.5, p).has_value());
    CHECK(zero_energy_state(0.0, 0.0, 0.0, p).has_value());
    // Just inside / just outside the boundary at v = 0, p_theta = 0.
    const double b0 = bound(0.0);
    CHECK(zero_energy_state(b0 - 1e-9, 0.0, 0.0, p).has_value());
    CHECK_FALSE(zero_energy_state(b0 + 1e-9, 0.0, 0.0, p).has_value());
}

TEST_CASE("zero-energy branches differ but share the invariants") {
    const Params p;
    const auto a = zero_energy_state(0.3, 0.4, 0.2, p, +1);
    const auto b = zero_energy_state(0.3, 0.4, 0.2, p, -1);
    REQUIRE(a.has_value());
    REQUIRE(b.has_value());
    CHECK(std::fabs(a->pz - b->pz) > 1e-8);
    CHECK(std::fabs(hamiltonian(*a, p)) <= 1e-12);
    CHECK(std::fabs(hamiltonian(*b, p)) <= 1e-12);
}
