#include "hk/zkepler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace hk {

namespace {

// sgn with the fixed convention sgn(0) = -1.
long long sgn_neg_at_zero(long long v) { return v > 0 ? 1 : -1; }

}  // namespace

LatticeState z_step(const LatticeState& s, ZVariant variant) {
    LatticeState out;
    if (variant == ZVariant::drift_kick) {
        out.n = s.n + s.p;
        out.p = s.p - sgn_neg_at_zero(out.n);
    } else {
        out.n = s.n + s.p;
        out.p = s.p - sgn_neg_at_zero(s.n);
    }
    return out;
}

LatticeState z_step_inverse(const LatticeState& s) {
    LatticeState out;
    out.p = s.p + sgn_neg_at_zero(s.n);  // the kick used sgn of the new n
    out.n = s.n - out.p;
    return out;
}

double z_energy(const LatticeState& s) {
    return 0.5 * static_cast<double>(s.p) * static_cast<double>(s.p) +
           static_cast<double>(std::llabs(s.n));
}

ZOrbitReport z_orbit(const LatticeState& s0, long long max_steps, ZVariant variant,
                     bool collect) {
    if (max_steps < 1) throw std::invalid_argument("z_orbit: max_steps must be >= 1");
    ZOrbitReport rep;
    rep.max_abs_n = std::llabs(s0.n);
    rep.max_abs_p = std::llabs(s0.p);
    rep.energy_min = rep.energy_max = z_energy(s0);
    if (collect) rep.states.push_back(s0);

    LatticeState s = s0;
    for (long long j = 1; j <= max_steps; ++j) {
        s = z_step(s, variant);
        rep.max_abs_n = std::max(rep.max_abs_n, std::llabs(s.n));
        rep.max_abs_p = std::max(rep.max_abs_p, std::llabs(s.p));
        const double h = z_energy(s);
        rep.energy_min = std::min(rep.energy_min, h);
        rep.energy_max = std::max(rep.energy_max, h);
        if (collect) rep.states.push_back(s);
        if (s == s0) {
            rep.period = j;
            return rep;
        }
    }
    throw NoRecurrence();
}

ZFundamentalReport z_fundamental_check(long long N) {
    if (N < 1) throw std::invalid_argument("z_fundamental_check: N must be >= 1");
    ZFundamentalReport rep;
    rep.exact = true;
    for (long long n = -N; n <= N; ++n) {
        // 2 * (U(n+1) - 2U(n) + U(n-1)) with U(n) = -|n|/2, all integers.
        const long long twice_defect =
            -std::llabs(n + 1) + 2 * std::llabs(n) - std::llabs(n - 1);
        const long long expected = (n == 0) ? -2 : 0;
        ++rep.n_checked;
        if (twice_defect != expected && rep.exact) {
            rep.exact = false;
            rep.first_defect_n = n;
        }
    }
    return rep;
}

}  // namespace hk
