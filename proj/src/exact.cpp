#include "hk/exact.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "hk/geometry.hpp"

namespace hk {
namespace {

using cplx = std::complex<double>;

// (e^{iu} - 1) / (iu), stable near u = 0.
cplx expm1_over(double u) {
    if (std::fabs(u) < 1e-4) {
        const double u2 = u * u;
        return {1.0 - u2 / 6.0 + u2 * u2 / 120.0, u / 2.0 - u2 * u / 24.0};
    }
    return (std::polar(1.0, u) - 1.0) / cplx(0.0, u);
}

// (u - sin u) / u^3, stable near u = 0.
double one_minus_sinc(double u) {
    if (std::fabs(u) < 1e-4) {
        const double u2 = u * u;
        return 1.0 / 6.0 - u2 / 120.0 + u2 * u2 / 5040.0;
    }
    return (u - std::sin(u)) / (u * u * u);
}

}  // namespace

ConicSample conic_on_N(const ConicSpec& spec, double t) {
    double r2;
    ConicKind kind;
    if (spec.h == 0.0) {
        r2 = std::sqrt(8.0 * spec.alpha) * t;
        kind = ConicKind::parabola;
    } else {
        r2 = 2.0 * spec.h * t * t - spec.alpha / spec.h;
        kind = spec.h < 0.0 ? ConicKind::ellipse : ConicKind::hyperbola;
    }
    if (!(r2 > 0.0)) throw DomainExceeded{};
    return {std::sqrt(r2), kind};
}

PhaseState conic_state_on_N(const ConicSpec& spec, double t) {
    const auto [r, kind] = conic_on_N(spec, t);
    const double dg = spec.h == 0.0 ? std::sqrt(8.0 * spec.alpha) : 4.0 * spec.h * t;
    PhaseState s;
    s.q = {r, 0.0, 0.0};
    s.px = dg / (2.0 * r);
    return s;
}

PhaseState line_solution(double c1, double c2, double t, const Params& p) {
    if (!(t > 0.0)) throw NonPositiveTime{};
    const double n = std::hypot(c1, c2);
    if (n == 0.0) throw std::invalid_argument("line_solution: zero direction");
    const double scale = std::sqrt(std::sqrt(8.0 * p.alpha)) / n;
    const double a = c1 * scale, b = c2 * scale;  // (a^2+b^2)^2 = 8 alpha
    const double st = std::sqrt(t);
    return {{a * st, b * st, 0.0}, 0.5 * a / st, 0.5 * b / st, 0.0};
}

PhaseState stationary_solution(double k, double t, const Params& p) {
    if (k == 0.0) throw ZeroK{};
    const double slope = -4.0 * p.alpha * (k > 0.0 ? 1.0 : -1.0) / (k * k);
    return {{0.0, 0.0, k}, 0.0, 0.0, slope * t};
}

PhaseState geodesic(const PhaseState& s0, double t) {
    const double w = s0.pz;
    const auto [PX, PY] = horizontal_momenta(s0);
    const cplx V0{PX, PY};
    const cplx z0{s0.q.x, s0.q.y};
    const double u = w * t;

    const cplx E = expm1_over(u);           // (e^{iu}-1)/(iu)
    const cplx zeta = z0 + V0 * t * E;
    const cplx V = V0 * std::polar(1.0, u);

    // dz/dt = Im(conj(zeta) V)/2; both terms integrate in closed form.
    const double area = 0.5 * (std::imag(std::conj(z0) * V0 * t * E) +
                               std::norm(V0) * w * t * t * t * one_minus_sinc(u));

    PhaseState s;
    s.q = {zeta.real(), zeta.imag(), s0.q.z + area};
    s.px = V.real() + 0.5 * s.q.y * w;
    s.py = V.imag() - 0.5 * s.q.x * w;
    s.pz = w;
    return s;
}

std::vector<double> unit_grid(int n) {
    std::vector<double> g(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) g[static_cast<size_t>(i)] = double(i) / double(n - 1);
    return g;
}

GeodesicDifferenceReport geodesic_difference_demo(const PhaseState& s1,
                                                  const PhaseState& s2,
                                                  const std::vector<double>& tgrid) {
    // Difference curve and its initial data. The planar parts subtract; the
    // vertical part picks up the group cocycle.
    std::vector<ConfigPoint> c(tgrid.size());
    for (size_t i = 0; i < tgrid.size(); ++i) {
        const ConfigPoint a = geodesic(s1, tgrid[i]).q;
        const ConfigPoint b = geodesic(s2, tgrid[i]).q;
        c[i] = group_mul(group_inv(a), b);
    }
    const auto [PX1, PY1] = horizontal_momenta(s1);
    const auto [PX2, PY2] = horizontal_momenta(s2);
    const double vx = PX2 - PX1, vy = PY2 - PY1;  // d/dt of the planar difference

    const auto deviation = [&](double beta, bool want_sup) {
        // Geodesic through c(0) with planar velocity (vx, vy) and curvature beta.
        PhaseState g;
        g.q = c[0];
        g.px = vx + 0.5 * c[0].y * beta;
        g.py = vy - 0.5 * c[0].x * beta;
        g.pz = beta;
        double l2 = 0.0, sup = 0.0;
        for (size_t i = 0; i < tgrid.size(); ++i) {
            const ConfigPoint q = geodesic(g, tgrid[i]).q;
            const double dx = q.x - c[i].x, dy = q.y - c[i].y, dz = q.z - c[i].z;
            const double d2 = dx * dx + dy * dy + dz * dz;
            l2 += d2;
            sup = std::max(sup, std::sqrt(d2));
        }
        return want_sup ? sup : l2;
    };

    // Golden-section fit of the curvature; the bracket comfortably covers the
    // rotation rates of the inputs.
    const double B = 4.0 * std::max({1.0, std::fabs(s1.pz), std::fabs(s2.pz)});
    double a = -B, b = B;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    double f1 = deviation(x1, false), f2 = deviation(x2, false);
    for (int it = 0; it < 200 && b - a > 1e-12 * B; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = deviation(x1, false);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = deviation(x2, false);
        }
    }
    const double beta = 0.5 * (a + b);
    return {deviation(beta, true), beta};
}

}  // namespace hk
