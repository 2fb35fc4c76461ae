#pragma once

#include <functional>
#include <vector>

#include "hk/loop.hpp"
#include "hk/types.hpp"

namespace hk {

struct MinimizeOptions {
    double gtol = 1e-8;          // projected-gradient 2-norm target
    int max_iters = 20000;
    int quadrature_nodes = 512;  // action grid during the search
    int certificate_nodes = 4096;  // rounded up to a power of two internally
    double barrier_rho = 1e-3;   // collapse guard: barrier activates below this
    double barrier_strength = 1.0;
    int lbfgs_memory = 20;
    // optional progress hook, called once per accepted iterate
    std::function<void(int iter, double f, double gnorm)> trace;
};

// Independent a-posteriori checks of a candidate loop. The multiplier
// lambda(t) = p_z(t) is reconstructed from its own equation
// dlambda/dt = -(alpha/16) z rho^-6 (spectral antiderivative; constant part
// by least squares), then the planar equations
//   x'' = -lambda y' - (1/2) lambda' y - 2 alpha x (x^2+y^2) rho^-6
//   y'' =  lambda x' + (1/2) lambda' x - 2 alpha y (x^2+y^2) rho^-6
// are evaluated pointwise. None of this reuses minimizer state.
struct OrbitCertificate {
    double action = 0.0;
    double grad_norm = 0.0;        // projected gradient at return (minimizer only)
    double el_residual_sup = 0.0;  // sup_t |planar equation residual|
    double sup_abs_H = 0.0;        // sup_t |K - U| along the loop
    double min_rho = 0.0;
    double multiplier_drift = 0.0;  // mean of dlambda/dt (zero for a true orbit)
    double multiplier_base = 0.0;   // least-squares constant part of lambda
};

struct MinimizeResult {
    LoopPath loop;
    OrbitCertificate certificate;
    int iterations = 0;
};

// Constrained minimization of the action over the coefficient space cut out
// by sym: vertical closure w_0 = 0 always, plus every even w-mode when S2 is
// requested (that is exactly z(t+T/2) = -z(t) at the series level). Projected
// L-BFGS with a Gauss-Newton retraction onto the constraint set; near the
// arithmetic noise floor the line search switches from decrease of the action
// to decrease of the projected gradient, which is what certifies criticality.
// Throws MaxIterations if gtol is not reached in the budget, and
// CollapseToSingularity if the loop dives through the barrier.
MinimizeResult minimize_action(const LoopPath& loop0, const SymmetryClass& sym,
                               const MinimizeOptions& opts, const Params& p);

OrbitCertificate certify_loop(const LoopPath& loop, const Params& p, int nodes = 4096);

// The minimizer's packed coordinates: interleaved (Re c_k, Im c_k) over the
// mode support selected by sym, plus a trailing z-offset slot when the
// half-period antisymmetry is off. packed_action evaluates the barrier-
// augmented action and, on request, its analytic gradient at such a packed
// point; `reference` fixes the period and mode support. Exposed so the
// gradient can be checked against finite differences from outside.
std::vector<double> pack_loop(const LoopPath& loop, const SymmetryClass& sym,
                              const MinimizeOptions& opts, const Params& p);
double packed_action(const std::vector<double>& x, const LoopPath& reference,
                     const SymmetryClass& sym, const MinimizeOptions& opts, const Params& p,
                     std::vector<double>* gradient = nullptr);

struct ThirdLawRow {
    double lambda = 1.0;
    double T = 0.0;      // period of the dilated loop
    double a = 0.0;      // size: sup rho over the dilated loop
    double ratio = 0.0;  // T^2 / a^4
    double el_residual = 0.0;
};

struct ThirdLawReport {
    std::vector<ThirdLawRow> rows;
    double ratio_spread = 0.0;  // max - min of ratio across the family
};

// Builds the dilated family gamma_lambda, re-certifies each member, and
// reports T^2/a^4 across the family. Sampling commutes with power-of-two
// dilations exactly, so the spread is zero to the last bit for such lambda.
ThirdLawReport third_law_check(const LoopPath& loop, const std::vector<double>& lambdas,
                               const Params& p);

}  // namespace hk
