#pragma once

#include <array>
#include <functional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "hk/types.hpp"

// Discrete action minimisation over lattice paths gamma : {0..T} -> Z^2,
//
//   A(gamma) = sum_{t<T} (|gamma(t+1)-gamma(t)|_1)^2 / 2
//            + alpha * sum_{t<=T} U(gamma(t)),       U = -a/4,
//
// with a the potential kernel from green.hpp. V1 paths may jump anywhere in
// one step; V2 paths move to an L1 neighbour or stay put. The minimum, the
// exact number of minimisers, and one witness path are all returned: the DP
// is exact over the reachable window, so the count is exact too.

namespace hk {

using GridPoint = std::array<long long, 2>;
using PathCount = boost::multiprecision::cpp_int;

enum class PathVersion { V1, V2 };

struct LatticePath {
    std::vector<GridPoint> vertices;  // gamma(0), ..., gamma(T)
    PathVersion version = PathVersion::V2;
};

struct DpResult {
    double min_action = 0;
    PathCount count = 0;      // optimal paths, exact big-integer accumulation
    LatticePath witness;      // deterministic first-found minimiser
};

// Exact dynamic program. With alpha = 0 every action value is a half-integer
// represented exactly in doubles, so ties are decided exactly; with alpha > 0
// the potential values are irrational and ties use a 1e-12 relative band.
// Throws Infeasible when no path joins v0 to v1 in time T (V2 with T < L1
// distance, or T = 0 with distinct endpoints).
DpResult dp_min_action(const GridPoint& v0, const GridPoint& v1, long long T,
                       double alpha, PathVersion version);

// Momentum attached to the four incident edges of a cell.
struct EdgeMomentum {
    double up = 0, down = 0, right = 0, left = 0;
};

struct NewtonStep {
    GridPoint cell;
    EdgeMomentum p;
};

// EXPERIMENTAL. One step of a rounding-map dynamics on Z^2: the cell moves
// by the nearest lattice point to the averaged momentum
//
//   Pi(p) = ((p_right + p_left)/2, (p_up + p_down)/2)
//
// (x displacement from the horizontal edges, y from the vertical ones; ties
// round toward the origin), then each edge momentum absorbs the potential
// difference across its edge, p'_e = p_e - (V(cell + e) - V(cell)), using
// the cell before the move. No conservation law is claimed for this map.
NewtonStep newton_difference_step(const GridPoint& cell, const EdgeMomentum& p,
                                  const std::function<double(long long, long long)>& potential);

}  // namespace hk
