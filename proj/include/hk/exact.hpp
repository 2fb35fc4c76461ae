#pragma once

#include <vector>

#include "hk/types.hpp"

// Closed-form solution families. These never touch the integrator, so the
// two sides can be compared as independent witnesses.

namespace hk {

enum class ConicKind { ellipse, parabola, hyperbola };

struct ConicSpec {
    double h = 0.0;       // energy on the invariant plane z = p_z = 0
    double alpha = 1.0;   // > 0
};

struct ConicSample {
    double r = 0.0;
    ConicKind kind = ConicKind::parabola;
};

// Radial motion on the invariant plane: r^2 = 2 h t^2 - alpha/h for h != 0,
// r^2 = sqrt(8 alpha) t for h = 0 (time origin at the apsis resp. collision).
// Throws DomainExceeded where the relation gives r^2 <= 0.
ConicSample conic_on_N(const ConicSpec& spec, double t);

// Same family as a full phase point (r, 0, 0, p_r, 0, 0) with p_r = (r^2)'/(2r).
PhaseState conic_state_on_N(const ConicSpec& spec, double t);

// Zero-energy ray solution (c1 sqrt(t), c2 sqrt(t), 0, c1/(2 sqrt t), c2/(2 sqrt t), 0).
// Only the direction of (c1, c2) is kept: solving the equations of motion pins
// the magnitude to (c1^2+c2^2)^2 = 8 alpha, so it is renormalized here.
// Throws NonPositiveTime for t <= 0.
PhaseState line_solution(double c1, double c2, double t, const Params& p);

// Fixed configuration on the z-axis, momentum falling linearly:
// (0, 0, k, 0, 0, -4 alpha sgn(k) t / k^2). H = -4 alpha / |k|.
// Throws ZeroK when k = 0.
PhaseState stationary_solution(double k, double t, const Params& p);

// Exact alpha = 0 flow: (P_X, P_Y) rotates at rate p_z, the planar curve is a
// line (p_z = 0) or circle, z accumulates the swept area.
PhaseState geodesic(const PhaseState& s0, double t);

struct GeodesicDifferenceReport {
    double sup_deviation = 0.0;  // max pointwise |c(t) - fit(t)| over the grid
    double fitted_pz = 0.0;      // curvature of the best matching geodesic
};

// Forms the group difference c(t) = inv(g1(t)) * g2(t) of two geodesics and
// fits a geodesic through c(0) with the same initial planar velocity, tuning
// only p_z (golden section on the grid L2 error). A large reported deviation
// certifies that the difference of geodesics is not a geodesic.
GeodesicDifferenceReport geodesic_difference_demo(const PhaseState& s1,
                                                  const PhaseState& s2,
                                                  const std::vector<double>& tgrid);

// Convenience: the n-point uniform grid on [0, 1] used by the demo.
std::vector<double> unit_grid(int n = 101);

}  // namespace hk
