#include "hk/coords.hpp"

#include <cmath>

#include "hk/geometry.hpp"

namespace hk {

CylState to_cylindrical(const PhaseState& s) {
    const double r = std::hypot(s.q.x, s.q.y);
    if (r == 0.0) throw AxisSingular{};
    CylState c;
    c.r = r;
    c.theta = std::atan2(s.q.y, s.q.x);
    c.z = s.q.z;
    c.pr = (s.q.x * s.px + s.q.y * s.py) / r;
    c.ptheta = s.q.x * s.py - s.q.y * s.px;
    c.pz = s.pz;
    return c;
}

PhaseState from_cylindrical(const CylState& c) {
    if (!(c.r > 0.0)) throw AxisSingular{};
    const double ct = std::cos(c.theta), st = std::sin(c.theta);
    PhaseState s;
    s.q = {c.r * ct, c.r * st, c.z};
    s.px = c.pr * ct - c.ptheta * st / c.r;
    s.py = c.pr * st + c.ptheta * ct / c.r;
    s.pz = c.pz;
    return s;
}

ReducedState to_reduced(const PhaseState& s) {
    const double r2 = s.q.x * s.q.x + s.q.y * s.q.y;
    if (r2 == 0.0) throw AxisSingular{};
    ReducedState r;
    r.v = s.q.z / r2;
    r.pv = r2 * s.pz;
    r.J = dilation_moment(s);
    r.ptheta = angular_momentum(s);
    return r;
}

double htilde(const ReducedState& r, const Params& p) {
    const double A = r.J - 2.0 * r.v * r.pv;
    const double B = r.ptheta + 0.5 * r.pv;
    return (A * A + B * B) * std::sqrt(1.0 + r.v * r.v / 16.0) / (2.0 * p.alpha);
}

std::optional<PhaseState> zero_energy_state(double J, double ptheta, double v,
                                            const Params& p, int branch) {
    // At r = 1 zero energy fixes A^2 + B^2 = R^2 with A = J - 2 v p_v,
    // B = p_theta + p_v / 2 and R^2 = 2 alpha / sqrt(1 + v^2/16).
    // Eliminating p_v = 2 (B - p_theta) leaves a quadratic in B.
    const double R2 = 2.0 * p.alpha / std::sqrt(1.0 + v * v / 16.0);
    const double m = J + 4.0 * v * ptheta;
    const double a = 1.0 + 16.0 * v * v;
    const double disc = a * R2 - m * m;
    if (disc < 0.0) return std::nullopt;
    const double B = (4.0 * v * m + (branch >= 0 ? 1.0 : -1.0) * std::sqrt(disc)) / a;
    const double pv = 2.0 * (B - ptheta);
    const double pr = J - 2.0 * v * pv;  // = A, since r = 1
    PhaseState s;
    s.q = {1.0, 0.0, v};
    s.px = pr;
    s.py = ptheta;
    s.pz = pv;
    return s;
}

}  // namespace hk
