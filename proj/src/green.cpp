#include "hk/green.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>

#include "hk/quadrature.hpp"

namespace hk {

namespace {

std::size_t octant_index(int m, int n) {
    // valid for 0 <= n <= m
    return static_cast<std::size_t>(m) * (m + 1) / 2 + static_cast<std::size_t>(n);
}

double quadrature_value(int m, int n) {
    // normalise into the octant; a is invariant under the dihedral group
    int am = std::abs(m), an = std::abs(n);
    if (am < an) std::swap(am, an);
    if (am == 0) return 0.0;

    const double dm = am, dn = an;
    auto integrand = [dm, dn](double theta) {
        const double u = 2.0 * std::pow(std::sin(0.5 * theta), 2);  // 1 - cos(theta)
        if (u == 0.0) return dm;  // limit theta -> 0 of the full expression
        const double s = std::sqrt(u * (2.0 + u));       // sinh t, cosh t = 1 + u
        const double t = std::log1p(u + s);              // t >= 0
        const double sn = std::sin(0.5 * dn * theta);
        // 1 - e^{-mt} cos(n theta) = 2 sin^2(n theta/2) + cos(n theta)(1 - e^{-mt})
        const double num = 2.0 * sn * sn - std::cos(dn * theta) * std::expm1(-dm * t);
        return num / s;
    };
    const double integral = adaptive_simpson(integrand, 0.0, std::numbers::pi, 5e-14);
    return 2.0 / std::numbers::pi * integral;
}

}  // namespace

GreenTable::GreenTable(int radius) : radius_(radius) {
    if (radius < 1) throw std::invalid_argument("GreenTable: radius must be >= 1");
    const int R = radius;
    std::vector<long double> oct(octant_index(R, R) + 1);

    constexpr long double pi_l = 3.14159265358979323846264338327950288L;
    // diagonal closed form
    long double diag_sum = 0.0L;
    oct[octant_index(0, 0)] = 0.0L;
    for (int k = 1; k <= R; ++k) {
        diag_sum += 1.0L / (2 * k - 1);
        oct[octant_index(k, k)] = 4.0L / pi_l * diag_sum;
    }
    oct[octant_index(1, 0)] = 1.0L;  // forced by the stencil at the origin

    // column m+1 from columns m and m-1; every right-hand side is already known
    for (int m = 1; m < R; ++m) {
        oct[octant_index(m + 1, m)] =
            2.0L * oct[octant_index(m, m)] - oct[octant_index(m, m - 1)];
        for (int n = m - 1; n >= 1; --n) {
            oct[octant_index(m + 1, n)] = 4.0L * oct[octant_index(m, n)] -
                                          oct[octant_index(m - 1, n)] -
                                          oct[octant_index(m, n + 1)] -
                                          oct[octant_index(m, n - 1)];
        }
        oct[octant_index(m + 1, 0)] = 4.0L * oct[octant_index(m, 0)] -
                                      oct[octant_index(m - 1, 0)] -
                                      2.0L * oct[octant_index(m, 1)];
    }

    octant_.resize(oct.size());
    for (std::size_t i = 0; i < oct.size(); ++i)
        octant_[i] = static_cast<double>(oct[i]);
}

double GreenTable::at(int m, int n) const {
    int am = std::abs(m), an = std::abs(n);
    if (am < an) std::swap(am, an);
    if (am > radius_) throw RadiusExceeded();
    return octant_[octant_index(am, an)];
}

double green2d(int m, int n, GreenMethod method) {
    if (method == GreenMethod::quadrature) return quadrature_value(m, n);
    const int r = std::max(std::abs(m), std::abs(n));
    if (r == 0) return 0.0;
    return GreenTable(r).at(m, n);
}

double laplacian2d(const std::function<double(int, int)>& f, int m, int n) {
    return f(m + 1, n) + f(m - 1, n) + f(m, n + 1) + f(m, n - 1) - 4.0 * f(m, n);
}

double laplacian2d(const GreenTable& table, int m, int n) {
    return laplacian2d(
        [&table](int a, int b) { return table.at(a, b); }, m, n);
}

}  // namespace hk
