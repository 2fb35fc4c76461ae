#pragma once

#include <functional>
#include <vector>

#include "hk/types.hpp"

// Potential kernel a(m, n) of the square lattice: the unique function with
// a(0,0) = 0, full dihedral symmetry, and graph Laplacian
//
//   a(m+1,n) + a(m-1,n) + a(m,n+1) + a(m,n-1) - 4 a(m,n) = 4 delta_0
//
// so U = a/4 is a fundamental solution (Delta U = delta_0). Dynamics built on
// top of this use the attracting potential V = alpha * a / 4; the path action
// uses U_dp = -a/4. Keeping a itself as the primitive avoids juggling signs.

namespace hk {

enum class GreenMethod { recursion, quadrature };

// Table of a(m, n) for |m|, |n| <= radius, built once by the stencil
// recursion (closed-form diagonal a(k,k) = (4/pi) sum_{j=1..k} 1/(2j-1),
// then the Laplacian identity solved for the unknown value column by
// column). The sweep runs in long double: the stencil amplifies rounding
// roughly fourfold per column, and the extra mantissa bits keep radius-30
// tables comfortably below 1e-10 absolute error.
class GreenTable {
  public:
    explicit GreenTable(int radius);

    double at(int m, int n) const;  // throws RadiusExceeded outside the table
    int radius() const { return radius_; }

  private:
    int radius_;
    std::vector<double> octant_;  // packed 0 <= n <= m <= radius
};

// Single value by either method. The quadrature route integrates
//
//   a(m,n) = (2/pi) * Int_0^pi [1 - e^{-|m| t} cos(n theta)] / sinh t dtheta,
//   cosh t = 2 - cos theta,
//
// written in a cancellation-free form, and serves as the independent check
// on the recursion. Both agree to ~1e-12 for |m|, |n| <= 10.
double green2d(int m, int n, GreenMethod method = GreenMethod::recursion);

// Four-neighbour Laplacian sum_{|l'-l|=1} (f(l') - f(l)). The GreenTable
// overload throws RadiusExceeded when a neighbour falls off the table.
double laplacian2d(const std::function<double(int, int)>& f, int m, int n);
double laplacian2d(const GreenTable& table, int m, int n);

}  // namespace hk
