#pragma once

#include <array>
#include <numbers>
#include <stdexcept>

// Phase-space records and error types shared by every module.
// All records are plain value types; every operation on them is a pure
// function, so concurrent use needs no coordination.

namespace hk {

struct Params {
    double alpha = 2.0 / std::numbers::pi;  // Kepler coupling, > 0
};

struct ConfigPoint {
    double x = 0.0, y = 0.0, z = 0.0;
};

struct PhaseState {
    ConfigPoint q;
    double px = 0.0, py = 0.0, pz = 0.0;

    std::array<double, 6> flat() const { return {q.x, q.y, q.z, px, py, pz}; }
    static PhaseState from_flat(const std::array<double, 6>& a) {
        return {{a[0], a[1], a[2]}, a[3], a[4], a[5]};
    }
};

// r > 0 away from the z-axis; theta is kept unwrapped by trajectory
// projections so winding is observable.
struct CylState {
    double r = 0.0, theta = 0.0, z = 0.0;
    double pr = 0.0, ptheta = 0.0, pz = 0.0;
};

// Reduced record: v = z/r^2, p_v = r^2 p_z, plus the two first integrals
// carried along (J = r*(p_r + 2 z p_z / r), p_theta).
struct ReducedState {
    double v = 0.0, pv = 0.0;
    double J = 0.0, ptheta = 0.0;
};

using Vec6 = std::array<double, 6>;
using Mat6 = std::array<std::array<double, 6>, 6>;

// --- typed errors ---------------------------------------------------------

struct SingularOrigin : std::runtime_error {
    SingularOrigin() : std::runtime_error("configuration at the gauge singularity (rho = 0)") {}
};

struct NonPositiveLambda : std::runtime_error {
    NonPositiveLambda() : std::runtime_error("dilation parameter must be > 0") {}
};

struct AxisSingular : std::runtime_error {
    AxisSingular() : std::runtime_error("cylindrical change of coordinates needs r > 0") {}
};

struct ZeroK : std::runtime_error {
    ZeroK() : std::runtime_error("stationary solution needs k != 0") {}
};

struct NonPositiveTime : std::runtime_error {
    NonPositiveTime() : std::runtime_error("line solution is defined for t > 0 only") {}
};

struct DomainExceeded : std::runtime_error {
    DomainExceeded() : std::runtime_error("time outside the valid window of the conic relation") {}
};

struct NewtonDivergence : std::runtime_error {
    NewtonDivergence() : std::runtime_error("implicit step did not converge; reduce dt") {}
};

struct StepUnderflow : std::runtime_error {
    StepUnderflow() : std::runtime_error("adaptive step size shrank below the floor") {}
};

struct CollisionEvent : std::runtime_error {
    CollisionEvent() : std::runtime_error("trajectory reached the collision floor rho < 1e-8") {}
};

struct NonClosingZ : std::runtime_error {
    NonClosingZ() : std::runtime_error("vertical quadrature does not close: mean of x y' - y x' is nonzero") {}
};

struct MaxIterations : std::runtime_error {
    MaxIterations() : std::runtime_error("minimizer stopped before reaching gtol") {}
};

struct CollapseToSingularity : std::runtime_error {
    CollapseToSingularity() : std::runtime_error("loop collapsed onto the gauge singularity") {}
};

struct RadiusExceeded : std::runtime_error {
    RadiusExceeded() : std::runtime_error("lattice point outside the tabulated radius") {}
};

struct NoRecurrence : std::runtime_error {
    NoRecurrence() : std::runtime_error("initial state did not recur within the step budget") {}
};

struct Infeasible : std::runtime_error {
    Infeasible() : std::runtime_error("no lattice path joins the endpoints in the given time") {}
};

struct QuadratureNonconvergence : std::runtime_error {
    QuadratureNonconvergence() : std::runtime_error("adaptive quadrature failed to reach tolerance") {}
};

}  // namespace hk
