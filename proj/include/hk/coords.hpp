#pragma once

#include <optional>

#include "hk/types.hpp"

namespace hk {

// Cylindrical chart away from the z-axis. theta comes out of atan2 in
// (-pi, pi]; trajectory projections unwrap it separately.
// Throws AxisSingular when x = y = 0.
CylState to_cylindrical(const PhaseState& s);
PhaseState from_cylindrical(const CylState& c);

// v = z / r^2, p_v = r^2 p_z, together with the two invariants
// J = r p_r + 2 z p_z and p_theta that label the reduced level set.
ReducedState to_reduced(const PhaseState& s);

// Rescaled reduced Hamiltonian
//   Htilde = [ (J - 2 v p_v)^2 + (p_theta + p_v / 2)^2 ] sqrt(1 + v^2/16) / (2 alpha).
// The zero-energy locus of the full problem is exactly { Htilde = 1 }.
double htilde(const ReducedState& r, const Params& p);

// A zero-energy state at r = 1, theta = 0 with prescribed (J, p_theta) and
// height ratio v. Empty when no such state exists, i.e. when
// |J + 4 v p_theta| > sqrt( 2 alpha (1 + 16 v^2) / sqrt(1 + v^2/16) ).
// branch picks one of the two momentum solutions.
std::optional<PhaseState> zero_energy_state(double J, double ptheta, double v,
                                            const Params& p, int branch = +1);

}  // namespace hk
