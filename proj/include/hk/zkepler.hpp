#pragma once

#include <vector>

#include "hk/types.hpp"

// Kepler-style dynamics on the integer line: states (n, p) in Z^2 with
// energy H(n, p) = p^2/2 + |n|. The force is the unit kick -sgn(n) with the
// convention sgn(0) = -1, so the origin is never a fixed point of the kick.

namespace hk {

struct LatticeState {
    long long n = 0;
    long long p = 0;

    friend bool operator==(const LatticeState& a, const LatticeState& b) {
        return a.n == b.n && a.p == b.p;
    }
};

// drift_kick: n' = n + p, then p' = p - sgn(n'). Composition of two shears,
// hence a bijection of Z^2. explicit_update kicks with the old n instead;
// it is kept only to demonstrate the secular energy growth that rules it out.
enum class ZVariant { drift_kick, explicit_update };

LatticeState z_step(const LatticeState& s, ZVariant variant = ZVariant::drift_kick);

// Inverse of the drift-kick step (un-kick, then un-drift). Round-tripping
// z_step_inverse(z_step(s)) == s is exact for all integer states.
LatticeState z_step_inverse(const LatticeState& s);

double z_energy(const LatticeState& s);  // p^2/2 + |n|, exact in doubles

struct ZOrbitReport {
    long long period = 0;     // steps until the initial state recurs
    long long max_abs_n = 0;  // visited extent
    long long max_abs_p = 0;
    double energy_min = 0;    // range of H over the orbit (H is not conserved
    double energy_max = 0;    // exactly; it oscillates within this band)
    std::vector<LatticeState> states;  // filled only when collect is set;
                                       // period+1 entries, first == last
};

// Iterates until s0 recurs. Throws NoRecurrence after max_steps.
ZOrbitReport z_orbit(const LatticeState& s0, long long max_steps,
                     ZVariant variant = ZVariant::drift_kick, bool collect = false);

struct ZFundamentalReport {
    long long n_checked = 0;
    bool exact = false;
    long long first_defect_n = 0;  // meaningful only when !exact
};

// Verifies, in integer arithmetic, that U(n) = -|n|/2 satisfies
// U(n+1) - 2 U(n) + U(n-1) = -delta_0(n) for all |n| <= N.
ZFundamentalReport z_fundamental_check(long long N);

}  // namespace hk
