#include "hk/geometry.hpp"

#include <cmath>

namespace hk {

double gauge_quartic(const ConfigPoint& q) {
    const double w = q.x * q.x + q.y * q.y;
    return w * w + q.z * q.z / 16.0;
}

double rho(const ConfigPoint& q) { return std::sqrt(std::sqrt(gauge_quartic(q))); }

double potential(const ConfigPoint& q, const Params& p) {
    const double g = gauge_quartic(q);
    if (g == 0.0) throw SingularOrigin{};
    return p.alpha / std::sqrt(g);
}

std::array<double, 3> potential_grad(const ConfigPoint& q, const Params& p) {
    const double g = gauge_quartic(q);
    if (g == 0.0) throw SingularOrigin{};
    const double w = q.x * q.x + q.y * q.y;
    const double c = -0.5 * p.alpha / (g * std::sqrt(g));  // -alpha/2 g^{-3/2}
    return {c * 4.0 * q.x * w, c * 4.0 * q.y * w, c * q.z / 8.0};
}

std::array<double, 2> horizontal_momenta(const PhaseState& s) {
    return {s.px - 0.5 * s.q.y * s.pz, s.py + 0.5 * s.q.x * s.pz};
}

double kinetic(const PhaseState& s) {
    const auto [PX, PY] = horizontal_momenta(s);
    return 0.5 * (PX * PX + PY * PY);
}

double hamiltonian(const PhaseState& s, const Params& p) {
    return kinetic(s) - potential(s.q, p);
}

Vec6 vector_field(const PhaseState& s, const Params& p) {
    const auto [PX, PY] = horizontal_momenta(s);
    const auto dU = potential_grad(s.q, p);
    return {PX,
            PY,
            0.5 * (s.q.x * PY - s.q.y * PX),
            -0.5 * s.pz * PY + dU[0],
            0.5 * s.pz * PX + dU[1],
            dU[2]};
}

Mat6 vector_field_jacobian(const PhaseState& s, const Params& p) {
    const double x = s.q.x, y = s.q.y, z = s.q.z, pz = s.pz;
    const auto [PX, PY] = horizontal_momenta(s);

    const double g = gauge_quartic(s.q);
    if (g == 0.0) throw SingularOrigin{};
    const double w = x * x + y * y;
    const double g32 = g * std::sqrt(g);
    const double c1 = -0.5 * p.alpha / g32;              // grad coefficient
    const double c2 = 0.75 * p.alpha / (g32 * g);        // +3 alpha / 4 g^{-5/2}
    const double gx = 4.0 * x * w, gy = 4.0 * y * w, gz = z / 8.0;
    // Hessian of U: U_ij = c2 g_i g_j + c1 g_ij.
    const double Uxx = c2 * gx * gx + c1 * (4.0 * w + 8.0 * x * x);
    const double Uxy = c2 * gx * gy + c1 * (8.0 * x * y);
    const double Uxz = c2 * gx * gz;
    const double Uyy = c2 * gy * gy + c1 * (4.0 * w + 8.0 * y * y);
    const double Uyz = c2 * gy * gz;
    const double Uzz = c2 * gz * gz + c1 / 8.0;

    Mat6 J{};
    // d(PX)
    J[0] = {0.0, -0.5 * pz, 0.0, 1.0, 0.0, -0.5 * y};
    // d(PY)
    J[1] = {0.5 * pz, 0.0, 0.0, 0.0, 1.0, 0.5 * x};
    // d( (x PY - y PX)/2 )
    J[2] = {0.5 * (PY + 0.5 * x * pz), 0.5 * (-PX + 0.5 * y * pz), 0.0,
            -0.5 * y, 0.5 * x, 0.25 * w};
    // d( -pz PY / 2 + U_x )
    J[3] = {-0.25 * pz * pz + Uxx, Uxy, Uxz, 0.0, -0.5 * pz,
            -0.5 * PY - 0.25 * x * pz};
    // d( pz PX / 2 + U_y )
    J[4] = {Uxy, -0.25 * pz * pz + Uyy, Uyz, 0.5 * pz, 0.0,
            0.5 * PX - 0.25 * y * pz};
    // d( U_z )
    J[5] = {Uxz, Uyz, Uzz, 0.0, 0.0, 0.0};
    return J;
}

PhaseState dilate(const PhaseState& s, double lambda) {
    if (!(lambda > 0.0)) throw NonPositiveLambda{};
    return {{lambda * s.q.x, lambda * s.q.y, lambda * lambda * s.q.z},
            s.px / lambda,
            s.py / lambda,
            s.pz / (lambda * lambda)};
}

double dilation_moment(const PhaseState& s) {
    return s.q.x * s.px + s.q.y * s.py + 2.0 * s.q.z * s.pz;
}

double angular_momentum(const PhaseState& s) {
    return s.q.x * s.py - s.q.y * s.px;
}

ConfigPoint group_mul(const ConfigPoint& a, const ConfigPoint& b) {
    return {a.x + b.x, a.y + b.y, a.z + b.z + 0.5 * (a.x * b.y - b.x * a.y)};
}

ConfigPoint group_inv(const ConfigPoint& a) { return {-a.x, -a.y, -a.z}; }

PhaseState left_translate(const ConfigPoint& g, const PhaseState& s) {
    PhaseState out;
    out.q = group_mul(g, s.q);
    out.px = s.px + 0.5 * g.y * s.pz;
    out.py = s.py - 0.5 * g.x * s.pz;
    out.pz = s.pz;
    return out;
}

}  // namespace hk
