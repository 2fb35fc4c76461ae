#include "hk/brackets.hpp"

#include <cmath>

namespace hk {
namespace {

Vec6 gradient(const Observable& f, const PhaseState& s, double h) {
    const Vec6 base = s.flat();
    Vec6 g{};
    for (int i = 0; i < 6; ++i) {
        const double hi = h * std::max(1.0, std::fabs(base[i]));
        Vec6 up = base, dn = base;
        up[i] += hi;
        dn[i] -= hi;
        g[i] = (f(PhaseState::from_flat(up)) - f(PhaseState::from_flat(dn))) / (2.0 * hi);
    }
    return g;
}

}  // namespace

double poisson_bracket_numeric(const Observable& f, const Observable& g,
                               const PhaseState& s, double h) {
    // Sign convention: {f, g} is the derivative of g along the flow of f,
    // so {H, g} = dg/dt and in particular {H, J} = 2H.
    const Vec6 df = gradient(f, s, h);
    const Vec6 dg = gradient(g, s, h);
    double acc = 0.0;
    for (int i = 0; i < 3; ++i) acc += df[i + 3] * dg[i] - df[i] * dg[i + 3];
    return acc;
}

}  // namespace hk
