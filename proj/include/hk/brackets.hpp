#pragma once

#include <functional>

#include "hk/types.hpp"

namespace hk {

using Observable = std::function<double(const PhaseState&)>;

// Poisson bracket {f, g} by central differences, with steps scaled per
// component. {f, g} is the derivative of g along the Hamiltonian flow of
// f, so {H, g} = dg/dt. Good to roughly 1e-9 for smooth observables of
// order-one size, which is plenty for checking that a bracket vanishes.
double poisson_bracket_numeric(const Observable& f, const Observable& g,
                               const PhaseState& s, double h = 1e-5);

}  // namespace hk
