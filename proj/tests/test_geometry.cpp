#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hk/brackets.hpp"
#include "hk/geometry.hpp"
#include "hk/types.hpp"

using namespace hk;

namespace {

constexpr double kAlpha = 2.0 / std::numbers::pi;

PhaseState random_state(std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    PhaseState s;
    do {
        s = {{scale * (1.0 + u(rng)), scale * u(rng), scale * u(rng)},
             u(rng), u(rng), u(rng)};
    } while (rho(s.q) < 0.3 * scale);
    return s;
}

}  // namespace

TEST_CASE("gauge takes its reference values") {
    CHECK(rho({1, 0, 0}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(rho({0, 0, 4}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(rho({1, 1, 0}) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(rho({0, 0, 0}) == 0.0);
}

TEST_CASE("gauge is degree-one homogeneous under dilation") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 50; ++i) {
        const PhaseState s = random_state(rng);
        for (const double lam : {0.5, 2.0, 5.0, 0.037}) {
            const PhaseState d = dilate(s, lam);
            CHECK(rho(d.q) == doctest::Approx(lam * rho(s.q)).epsilon(1e-13));
        }
    }
}

TEST_CASE("potential reference values and homogeneity") {
    const Params p{kAlpha};
    CHECK(potential({1, 0, 0}, p) == doctest::Approx(kAlpha).epsilon(1e-15));
    CHECK(potential({0, 0, 4}, p) == doctest::Approx(kAlpha).epsilon(1e-15));
    CHECK(potential({2, 0, 0}, p) == doctest::Approx(kAlpha / 4.0).epsilon(1e-15));
    CHECK_THROWS_AS(potential({0, 0, 0}, p), SingularOrigin);
}

TEST_CASE("potential gradient matches finite differences") {
    const Params p{kAlpha};
    std::mt19937_64 rng(11);
    for (int i = 0; i < 30; ++i) {
        const PhaseState s = random_state(rng);
        const auto g = potential_grad(s.q, p);
        const double h = 1e-6;
        for (int j = 0; j < 3; ++j) {
            ConfigPoint qp = s.q, qm = s.q;
            (j == 0 ? qp.x : j == 1 ? qp.y : qp.z) += h;
            (j == 0 ? qm.x : j == 1 ? qm.y : qm.z) -= h;
            const double fd = (potential(qp, p) - potential(qm, p)) / (2.0 * h);
            CHECK(g[j] == doctest::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("horizontal momenta at axis-aligned configurations") {
    CHECK(horizontal_momenta({{0, 0, 0}, 1, 2, 5})[0] == 1.0);
    CHECK(horizontal_momenta({{0, 0, 0}, 1, 2, 5})[1] == 2.0);
    const auto py = horizontal_momenta({{1, 0, 0}, 0, 0, 2});
    CHECK(py[0] == 0.0);
    CHECK(py[1] == 1.0);
    const auto px = horizontal_momenta({{0, 1, 0}, 0, 0, 2});
    CHECK(px[0] == -1.0);
    CHECK(px[1] == 0.0);
}

TEST_CASE("hamiltonian reference values") {
    const Params p{kAlpha};
    CHECK(hamiltonian({{1, 0, 0}, 0, 0, 0}, p) == doctest::Approx(-kAlpha).epsilon(1e-15));
    // K = U by construction: p_y = sqrt(2 alpha) = 2/sqrt(pi) at (1,0,0)
    const double py = 2.0 / std::sqrt(std::numbers::pi);
    CHECK(hamiltonian({{1, 0, 0}, 0, py, 0}, p) == doctest::Approx(0.0).epsilon(1e-15));
    // axis states: K = 0, rho^2 = |k|/4, any p_z
    for (const double k : {1.0, -2.0, 0.5}) {
        for (const double pz : {0.0, 3.0, -1.0}) {
            CHECK(hamiltonian({{0, 0, k}, 0, 0, pz}, p) ==
                  doctest::Approx(-4.0 * kAlpha / std::fabs(k)).epsilon(1e-14));
        }
    }
}

TEST_CASE("hamiltonian scales as lambda^-2 under dilation") {
    const Params p{kAlpha};
    std::mt19937_64 rng(13);
    for (int i = 0; i < 50; ++i) {
        const PhaseState s = random_state(rng);
        const double H = hamiltonian(s, p);
        for (const double lam : {0.5, 2.0, 3.7}) {
            CHECK(hamiltonian(dilate(s, lam), p) ==
                  doctest::Approx(H / (lam * lam)).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(dilate(random_state(rng), 0.0), NonPositiveLambda);
    CHECK_THROWS_AS(dilate(random_state(rng), -1.0), NonPositiveLambda);
}

TEST_CASE("dilation acts componentwise and composes") {
    const PhaseState s{{1, 1, 1}, 1, 1, 1};
    const PhaseState d = dilate(s, 2.0);
    CHECK(d.q.x == 2.0);
    CHECK(d.q.y == 2.0);
    CHECK(d.q.z == 4.0);
    CHECK(d.px == 0.5);
    CHECK(d.py == 0.5);
    CHECK(d.pz == 0.25);
    std::mt19937_64 rng(17);
    const PhaseState r = random_state(rng);
    const PhaseState a = dilate(dilate(r, 1.5), 2.0);
    const PhaseState b = dilate(r, 3.0);
    for (int j = 0; j < 6; ++j) CHECK(a.flat()[j] == doctest::Approx(b.flat()[j]).epsilon(1e-14));
}

TEST_CASE("invariant generators take their reference values") {
    CHECK(dilation_moment({{1, 0, 0}, 0, 0, 0}) == 0.0);
    CHECK(dilation_moment({{1, 0, 0}, 1, 0, 0}) == 1.0);
    CHECK(angular_momentum({{1, 0, 0}, 0, 0, 0}) == 0.0);
    CHECK(angular_momentum({{1, 0, 0}, 0, 1, 0}) == 1.0);
}

TEST_CASE("angular momentum is a rotation scalar") {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 30; ++i) {
        const PhaseState s = random_state(rng);
        const double a = u(rng);
        const double c = std::cos(a), sn = std::sin(a);
        const PhaseState r{{c * s.q.x - sn * s.q.y, sn * s.q.x + c * s.q.y, s.q.z},
                           c * s.px - sn * s.py, sn * s.px + c * s.py, s.pz};
        CHECK(angular_momentum(r) == doctest::Approx(angular_momentum(s)).epsilon(1e-12));
        CHECK(hamiltonian(r, Params{}) ==
              doctest::Approx(hamiltonian(s, Params{})).epsilon(1e-12));
    }
}

TEST_CASE("vector field matches Hamilton's equations by finite differences") {
    const Params p{kAlpha};
    std::mt19937_64 rng(23);
    for (int i = 0; i < 100; ++i) {
        const PhaseState s = random_state(rng);
        const auto f = vector_field(s, p);
        const double h = 1e-6;
        auto H_at = [&](int j, double d) {
            auto a = s.flat();
            a[j] += d;
            return hamiltonian(PhaseState::from_flat(a), p);
        };
        for (int j = 0; j < 3; ++j) {
            const double dHdp = (H_at(j + 3, h) - H_at(j + 3, -h)) / (2.0 * h);
            const double dHdq = (H_at(j, h) - H_at(j, -h)) / (2.0 * h);
            const double scale = std::max(1.0, std::fabs(f[j]));
            CHECK(std::fabs(f[j] - dHdp) / scale <= 1e-6);
            CHECK(std::fabs(f[j + 3] + dHdq) / std::max(1.0, std::fabs(f[j + 3])) <= 1e-6);
        }
    }
}

TEST_CASE("vector field respects the horizontal constraint identically") {
    const Params p{kAlpha};
    std::mt19937_64 rng(29);
    for (int i = 0; i < 100; ++i) {
        const PhaseState s = random_state(rng);
        const auto f = vector_field(s, p);
        CHECK(f[2] == doctest::Approx(0.5 * (s.q.x * f[1] - s.q.y * f[0])).epsilon(1e-14));
    }
}

TEST_CASE("vector field on the vertical axis gives the constant-configuration family") {
    const Params p{kAlpha};
    for (const double k : {1.0, 2.0, -1.5}) {
        const auto f = vector_field({{0, 0, k}, 0, 0, 0.3}, p);
        for (int j = 0; j < 5; ++j) CHECK(f[j] == doctest::Approx(0.0).epsilon(1e-15));
        const double want = -4.0 * kAlpha * (k > 0 ? 1.0 : -1.0) / (k * k);
        CHECK(f[5] == doctest::Approx(want).epsilon(1e-14));
    }
    const auto free = vector_field({{1, 0, 0}, 0, 1, 0}, Params{0.0});
    CHECK(free[0] == 0.0);
    CHECK(free[1] == 1.0);
    CHECK(free[2] == 0.5);
    CHECK(free[3] == 0.0);
    CHECK(free[4] == 0.0);
    CHECK(free[5] == 0.0);
}

TEST_CASE("field jacobian matches finite differences of the field") {
    const Params p{kAlpha};
    std::mt19937_64 rng(31);
    for (int i = 0; i < 20; ++i) {
        const PhaseState s = random_state(rng);
        const Mat6 Jm = vector_field_jacobian(s, p);
        const double h = 1e-6;
        for (int j = 0; j < 6; ++j) {
            auto ap = s.flat(), am = s.flat();
            ap[j] += h;
            am[j] -= h;
            const auto fp = vector_field(PhaseState::from_flat(ap), p);
            const auto fm = vector_field(PhaseState::from_flat(am), p);
            for (int i2 = 0; i2 < 6; ++i2) {
                const double fd = (fp[i2] - fm[i2]) / (2.0 * h);
                CHECK(Jm[i2][j] == doctest::Approx(fd).epsilon(5e-5));
            }
        }
    }
}

TEST_CASE("group law, inverse, associativity") {
    const ConfigPoint ab = group_mul({1, 0, 0}, {0, 1, 0});
    CHECK(ab.x == 1.0);
    CHECK(ab.y == 1.0);
    CHECK(ab.z == 0.5);
    const ConfigPoint ba = group_mul({0, 1, 0}, {1, 0, 0});
    CHECK(ba.z == -0.5);

    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        const ConfigPoint a{u(rng), u(rng), u(rng)};
        const ConfigPoint b{u(rng), u(rng), u(rng)};
        const ConfigPoint c{u(rng), u(rng), u(rng)};
        const ConfigPoint e = group_mul(a, group_inv(a));
        CHECK(std::fabs(e.x) <= 1e-15);
        CHECK(std::fabs(e.y) <= 1e-15);
        CHECK(std::fabs(e.z) <= 1e-15);
        const ConfigPoint l = group_mul(group_mul(a, b), c);
        const ConfigPoint r = group_mul(a, group_mul(b, c));
        CHECK(l.x == doctest::Approx(r.x).epsilon(1e-12));
        CHECK(l.y == doctest::Approx(r.y).epsilon(1e-12));
        CHECK(l.z == doctest::Approx(r.z).epsilon(1e-12));
        CHECK(group_inv(a).x == -a.x);
        CHECK(group_inv(a).y == -a.y);
        CHECK(group_inv(a).z == -a.z);
    }
}

TEST_CASE("left translation preserves the horizontal momenta and kinetic energy") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        const PhaseState s = random_state(rng);
        const ConfigPoint g{u(rng), u(rng), u(rng)};
        const PhaseState t = left_translate(g, s);
        const ConfigPoint want = group_mul(g, s.q);
        CHECK(t.q.x == doctest::Approx(want.x).epsilon(1e-14));
        CHECK(t.q.y == doctest::Approx(want.y).epsilon(1e-14));
        CHECK(t.q.z == doctest::Approx(want.z).epsilon(1e-14));
        const auto hm0 = horizontal_momenta(s);
        const auto hm1 = horizontal_momenta(t);
        CHECK(hm1[0] == doctest::Approx(hm0[0]).epsilon(1e-12));
        CHECK(hm1[1] == doctest::Approx(hm0[1]).epsilon(1e-12));
        CHECK(kinetic(t) == doctest::Approx(kinetic(s)).epsilon(1e-12));
    }
}

TEST_CASE("numeric Poisson brackets reproduce the conservation algebra") {
    const Params p{kAlpha};
    const Observable H = [&](const PhaseState& s) { return hamiltonian(s, p); };
    const Observable J = [](const PhaseState& s) { return dilation_moment(s); };
    const Observable Pt = [](const PhaseState& s) { return angular_momentum(s); };
    std::mt19937_64 rng(43);
    for (int i = 0; i < 25; ++i) {
        const PhaseState s = random_state(rng);
        CHECK(std::fabs(poisson_bracket_numeric(Pt, H, s)) <= 1e-6);
        CHECK(poisson_bracket_numeric(H, J, s) ==
              doctest::Approx(2.0 * hamiltonian(s, p)).epsilon(1e-6));
    }
}
