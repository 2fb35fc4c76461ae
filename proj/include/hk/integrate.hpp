#pragma once

#include <vector>

#include "hk/types.hpp"

namespace hk {

enum class Method { implicit_midpoint, adaptive_rk };

struct IntegratorSpec {
    Method method = Method::implicit_midpoint;
    double step = 1e-3;          // fixed step (implicit midpoint)
    double tolerance = 1e-10;    // local error target per unit scale (adaptive rk)
    int max_newton_iters = 50;
    double newton_tol = 1e-13;   // inf-norm of the Newton update
    double collision_floor = 1e-8;
};

struct Sample {
    double t = 0.0;
    PhaseState s;
    // Diagnostics recomputed from s at sampling time, never accumulated.
    double H = 0.0, ptheta = 0.0, J = 0.0, Jres = 0.0;
};

enum class RunStatus { completed, collision, newton_divergence, step_underflow };

struct Trajectory {
    std::vector<Sample> samples;
    RunStatus status = RunStatus::completed;
};

const char* to_string(RunStatus st);

// One implicit midpoint step: solve m = s + (dt/2) f(m) by Newton with the
// analytic Jacobian (fixed-point sweep as fallback), return 2m - s.
// Symplectic; conserves p_theta to round-off. Throws NewtonDivergence when
// the midpoint solve stalls, SingularOrigin if the field is evaluated at
// the gauge singularity.
PhaseState step_implicit_midpoint(const PhaseState& s, double dt, const Params& p,
                                  int max_iters = 50, double tol = 1e-13);

// Integrates [0, t_final], sampling every accepted step. Stops early (keeping
// the partial trajectory) when rho drops below spec.collision_floor, when the
// midpoint solve diverges, or when the adaptive step underflows; the cause is
// reported in Trajectory::status rather than thrown, so callers always get
// the data that was computed. Jres = J(t) - J(0) - 2 H(0) t.
Trajectory integrate(const PhaseState& s0, double t_final, const IntegratorSpec& spec,
                     const Params& p);

struct EquivarianceReport {
    // sup over aligned samples of the component-wise gap between
    // dilate(base(t/lambda^2), lambda) and the run started at dilate(s0, lambda)
    double max_state_deviation = 0.0;
    // sup of |H_dilated(t) - lambda^{-2} H_base(t/lambda^2)|
    double energy_scale_error = 0.0;
    RunStatus base_status = RunStatus::completed;
    RunStatus dilated_status = RunStatus::completed;
};

// The dilated run covers [0, t_final] with spec.step; the base run covers
// [0, t_final/lambda^2] with step/lambda^2, so samples align exactly.
EquivarianceReport check_dilation_equivariance(const PhaseState& s0, double lambda,
                                               double t_final, const IntegratorSpec& spec,
                                               const Params& p);

// Per-sample reduction; throws AxisSingular if the trajectory touches r = 0.
std::vector<ReducedState> reduced_projection(const Trajectory& traj);

}  // namespace hk
