#pragma once

#include <vector>

#include "hk/types.hpp"

// Tiny dense solvers. Problem sizes here are 6x6 (implicit step) and the
// constraint Gram matrices of the loop minimizer (a few dozen rows), so a
// plain O(n^3) factorization is the right tool.

namespace hk {

// Solves A x = b in place with partial pivoting; b is overwritten by x.
// Returns false when a pivot is exactly zero.
bool lu_solve6(Mat6 A, Vec6& b);

// Solves the symmetric positive semi-definite system (A + ridge*I) x = b,
// A given row-major n x n. The ridge is scaled off the trace so exactly-zero
// rows (inactive constraints) stay harmless. b is overwritten by x.
// Returns false if the shifted matrix still fails to factor.
bool cholesky_solve(const std::vector<double>& A, int n, std::vector<double>& b,
                    double ridge_scale = 1e-14);

}  // namespace hk
