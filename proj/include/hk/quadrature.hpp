#pragma once

#include <functional>

namespace hk {

// Adaptive Simpson on [a, b] with absolute tolerance tol.
// Throws QuadratureNonconvergence if the recursion depth limit is reached
// before the local error estimate drops below the budget for that panel.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 60);

}  // namespace hk
