#pragma once

#include "hk/types.hpp"

// Gauge, potential, Hamiltonian and symmetries of the sub-Riemannian Kepler
// problem on the Heisenberg group. Everything is phrased through the quartic
//
//   g(x, y, z) = (x^2 + y^2)^2 + z^2 / 16,   rho = g^(1/4),
//
// because g is a polynomial: derivatives are exact rational expressions and
// g scales by lambda^4 without rounding when lambda is a power of two, which
// the dilation tests rely on.

namespace hk {

double gauge_quartic(const ConfigPoint& q);  // rho^4
double rho(const ConfigPoint& q);

// U = alpha / rho^2. Throws SingularOrigin on the gauge singularity.
double potential(const ConfigPoint& q, const Params& p);
std::array<double, 3> potential_grad(const ConfigPoint& q, const Params& p);

// Horizontal frame momenta P_X = px - y pz / 2, P_Y = py + x pz / 2. Both
// are preserved by the cotangent lift of left translation (left_translate).
std::array<double, 2> horizontal_momenta(const PhaseState& s);

double kinetic(const PhaseState& s);
double hamiltonian(const PhaseState& s, const Params& p);  // K - U

// Hamiltonian vector field as a flat 6-vector in (x, y, z, px, py, pz) order,
// and its Jacobian (used by the implicit midpoint Newton solve).
Vec6 vector_field(const PhaseState& s, const Params& p);
Mat6 vector_field_jacobian(const PhaseState& s, const Params& p);

// delta_lambda: (x, y, z, px, py, pz) ->
//   (lambda x, lambda y, lambda^2 z, px/lambda, py/lambda, pz/lambda^2).
// Scales H by lambda^{-2}. Throws NonPositiveLambda unless lambda > 0.
PhaseState dilate(const PhaseState& s, double lambda);

// J = x px + y py + 2 z pz; dJ/dt = 2H along the flow.
double dilation_moment(const PhaseState& s);

// p_theta = x py - y px, conserved by the rotational symmetry.
double angular_momentum(const PhaseState& s);

ConfigPoint group_mul(const ConfigPoint& a, const ConfigPoint& b);
ConfigPoint group_inv(const ConfigPoint& a);

// Cotangent lift of left translation by g. Leaves P_X, P_Y (hence K)
// unchanged; the potential is not left-invariant, so H moves with the
// base point.
PhaseState left_translate(const ConfigPoint& g, const PhaseState& s);

}  // namespace hk
