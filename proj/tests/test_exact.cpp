#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "hk/exact.hpp"
#include "hk/geometry.hpp"
#include "hk/integrate.hpp"
#include "hk/types.hpp"

using namespace hk;

namespace {

constexpr double kAlpha = 2.0 / std::numbers::pi;

// Residual of the equations of motion along a curve given as c(t), by a
// five-point derivative at interior grid points.
double field_residual(const std::function<PhaseState(double)>& curve, double t,
                      const Params& p, double h = 1e-3) {
    const auto fm2 = curve(t - 2 * h).flat(), fm1 = curve(t - h).flat();
    const auto fp1 = curve(t + h).flat(), fp2 = curve(t + 2 * h).flat();
    const auto f = vector_field(curve(t), p);
    double worst = 0.0;
    for (int j = 0; j < 6; ++j) {
        const double d = (fm2[j] - 8.0 * fm1[j] + 8.0 * fp1[j] - fp2[j]) / (12.0 * h);
        worst = std::max(worst, std::fabs(d - f[j]));
    }
    return worst;
}

}  // namespace

TEST_CASE("ray solution solves the equations of motion at zero energy") {
    const Params p{kAlpha};
    auto curve = [&](double t) { return line_solution(1.0, 0.5, t, p); };
    // The family is self-similar in t, so the stencil step scales with t;
    // a fixed step loses the O(h^4) budget to the t^{-11/2} fifth derivative.
    for (double t = 0.1; t <= 10.0; t += 0.37) {
        CHECK(field_residual(curve, t, p, 1e-3 * t) <= 1e-10);
        const PhaseState s = curve(t);
        CHECK(std::fabs(hamiltonian(s, p)) <= 1e-12);
        CHECK(s.q.z == 0.0);
        CHECK(std::fabs(angular_momentum(s)) <= 1e-14);
    }
    CHECK_THROWS_AS(line_solution(1.0, 0.0, 0.0, p), NonPositiveTime);
    CHECK_THROWS_AS(line_solution(1.0, 0.0, -1.0, p), NonPositiveTime);
}

TEST_CASE("ray solution is calibrated to |c| = (8 alpha)^{1/4}") {
    const Params p{kAlpha};
    // Only the direction of (c1, c2) survives construction; the radial
    // profile must be r(t) = (8 alpha)^{1/4} sqrt(t) regardless of scale.
    const double want = std::pow(8.0 * kAlpha, 0.25);
    for (const double mag : {0.2, 1.0, 50.0}) {
        const PhaseState s = line_solution(mag, 0.0, 1.0, p);
        CHECK(std::hypot(s.q.x, s.q.y) == doctest::Approx(want).epsilon(1e-13));
    }
}

TEST_CASE("axis equilibria fall with constant force") {
    const Params p{kAlpha};
    for (const double k : {1.0, -2.0}) {
        for (double t = 0.0; t <= 2.0; t += 0.5) {
            const PhaseState s = stationary_solution(k, t, p);
            CHECK(s.q.x == 0.0);
            CHECK(s.q.y == 0.0);
            CHECK(s.q.z == k);
            const auto f = vector_field(s, p);
            for (int j = 0; j < 5; ++j) CHECK(std::fabs(f[j]) <= 1e-15);
            const double sgn = k > 0 ? 1.0 : -1.0;
            CHECK(f[5] == doctest::Approx(-4.0 * kAlpha * sgn / (k * k)).epsilon(1e-14));
            CHECK(s.pz == doctest::Approx(-4.0 * kAlpha * sgn * t / (k * k)).epsilon(1e-14));
            CHECK(hamiltonian(s, p) ==
                  doctest::Approx(-4.0 * kAlpha / std::fabs(k)).epsilon(1e-13));
        }
    }
    CHECK_THROWS_AS(stationary_solution(0.0, 1.0, p), ZeroK);
}

TEST_CASE("planar radial motion follows the conic relations") {
    SUBCASE("parabola at h = 0") {
        const ConicSpec spec{0.0, kAlpha};
        for (double t = 0.1; t <= 3.0; t += 0.3) {
            const ConicSample c = conic_on_N(spec, t);
            CHECK(c.kind == ConicKind::parabola);
            CHECK(c.r * c.r == doctest::Approx(std::sqrt(8.0 * kAlpha) * t).epsilon(1e-13));
        }
    }
    SUBCASE("ellipse at h = -1") {
        const ConicSpec spec{-1.0, kAlpha};
        const ConicSample at0 = conic_on_N(spec, 0.0);
        CHECK(at0.kind == ConicKind::ellipse);
        CHECK(at0.r == doctest::Approx(std::sqrt(kAlpha)).epsilon(1e-14));
        for (double t = -0.5; t <= 0.5; t += 0.1) {
            const ConicSample c = conic_on_N(spec, t);
            CHECK(c.r * c.r + 2.0 * t * t == doctest::Approx(kAlpha).epsilon(1e-13));
        }
        // |t| >= sqrt(alpha/2) leaves the ellipse.
        CHECK_THROWS_AS(conic_on_N(spec, std::sqrt(kAlpha / 2.0) + 1e-6), DomainExceeded);
    }
    SUBCASE("hyperbola at h = +1") {
        const ConicSpec spec{1.0, kAlpha};
        for (double t = 0.7; t <= 3.0; t += 0.3) {
            const ConicSample c = conic_on_N(spec, t);
            CHECK(c.kind == ConicKind::hyperbola);
            CHECK(c.r * c.r - 2.0 * t * t == doctest::Approx(-kAlpha).epsilon(1e-12));
        }
        // Inside t < sqrt(alpha/2) the relation gives r^2 <= 0.
        CHECK_THROWS_AS(conic_on_N(spec, 0.1), DomainExceeded);
    }
}

TEST_CASE("conic phase states carry the stated energy") {
    for (const double h : {-1.0, 0.0, 1.0}) {
        const ConicSpec spec{h, kAlpha};
        const double t0 = h > 0 ? 1.0 : 0.1;
        for (double t = t0; t <= t0 + 0.4; t += 0.1) {
            const PhaseState s = conic_state_on_N(spec, t);
            CHECK(s.q.z == 0.0);
            CHECK(s.pz == 0.0);
            CHECK(std::fabs(angular_momentum(s)) <= 1e-14);
            CHECK(hamiltonian(s, Params{kAlpha}) == doctest::Approx(h).epsilon(1e-11));
        }
    }
}

TEST_CASE("free flow with zero curvature is a straight line") {
    const PhaseState s0{{0.3, -0.2, 0.1}, 0.7, 0.4, 0.0};
    const auto pxy = horizontal_momenta(s0);
    for (double t = 0.0; t <= 2.0; t += 0.25) {
        const PhaseState s = geodesic(s0, t);
        CHECK(s.q.x == doctest::Approx(s0.q.x + pxy[0] * t).epsilon(1e-13));
        CHECK(s.q.y == doctest::Approx(s0.q.y + pxy[1] * t).epsilon(1e-13));
        CHECK(kinetic(s) == doctest::Approx(kinetic(s0)).epsilon(1e-12));
    }
}

TEST_CASE("free flow with curvature closes a circle of period 2 pi / |pz|") {
    const PhaseState s0{{0, 0, 0}, 1.0, 0.0, 0.8};
    const double T = 2.0 * std::numbers::pi / 0.8;
    const PhaseState back = geodesic(s0, T);
    CHECK(back.q.x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(back.q.y == doctest::Approx(0.0).epsilon(1e-12));
    // z advances by the enclosed area of the circle of radius |P|/|pz|.
    const double R = 1.0 / 0.8;
    CHECK(std::fabs(back.q.z) == doctest::Approx(std::numbers::pi * R * R).epsilon(1e-10));
    CHECK(kinetic(back) == doctest::Approx(kinetic(s0)).epsilon(1e-12));
}

TEST_CASE("free flow matches free numeric integration over unit time") {
    const Params free{0.0};
    const PhaseState s0{{0.5, 0.1, -0.2}, 0.4, 1.1, 1.3};
    IntegratorSpec spec;
    spec.step = 1e-4;
    const Trajectory traj = integrate(s0, 1.0, spec, free);
    for (const Sample& smp : traj.samples) {
        const auto want = geodesic(s0, smp.t).flat();
        const auto got = smp.s.flat();
        for (int j = 0; j < 6; ++j) CHECK(std::fabs(got[j] - want[j]) <= 1e-8);
    }
}

TEST_CASE("difference of two free helices is not a free motion") {
    const std::vector<double> grid = unit_grid();
    REQUIRE(grid.size() == 101);
    CHECK(grid.front() == 0.0);
    CHECK(grid.back() == 1.0);

    const PhaseState s1{{0, 0, 0}, 1.0, 0.0, 1.0};
    const PhaseState s2{{0.5, 0.2, 0}, 0.0, 0.9, -0.7};

    SUBCASE("equal inputs cancel exactly") {
        const auto rep = geodesic_difference_demo(s1, s1, grid);
        CHECK(rep.sup_deviation <= 1e-14);
    }
    SUBCASE("parallel straight lines difference to a straight line") {
        // The planar parts commute exactly when they are parallel; then the
        // group difference picks up no vertical term and stays a geodesic.
        const PhaseState a{{0, 0, 0}, 1.0, 0.0, 0.0};
        const PhaseState b{{0.3, 0, 0}, 0.7, 0.0, 0.0};
        const auto rep = geodesic_difference_demo(a, b, grid);
        CHECK(rep.sup_deviation <= 1e-10);
    }
    SUBCASE("non-parallel lines through the origin already fail") {
        // Even with zero curvature the difference acquires a quadratic
        // vertical drift z(t) = t^2 (p2 x p1) / 2, so it cannot be horizontal.
        const PhaseState a{{0, 0, 0}, 1.0, 0.0, 0.0};
        const PhaseState b{{0, 0, 0}, 0.3, 0.8, 0.0};
        const auto rep = geodesic_difference_demo(a, b, grid);
        CHECK(rep.sup_deviation > 1e-3);
    }
    SUBCASE("generic helical pair deviates by a robust margin") {
        const auto rep = geodesic_difference_demo(s1, s2, grid);
        CHECK(rep.sup_deviation > 1e-3);
    }
}
