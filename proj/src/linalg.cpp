#include "hk/linalg.hpp"

#include <cmath>
#include <utility>

namespace hk {

bool lu_solve6(Mat6 A, Vec6& b) {
    constexpr int n = 6;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::fabs(A[k][k]);
        for (int i = k + 1; i < n; ++i) {
            const double v = std::fabs(A[i][k]);
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (best == 0.0) return false;
        if (piv != k) {
            std::swap(A[piv], A[k]);
            std::swap(b[piv], b[k]);
        }
        for (int i = k + 1; i < n; ++i) {
            const double m = A[i][k] / A[k][k];
            if (m == 0.0) continue;
            A[i][k] = 0.0;
            for (int j = k + 1; j < n; ++j) A[i][j] -= m * A[k][j];
            b[i] -= m * b[k];
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= A[i][j] * b[j];
        b[i] = s / A[i][i];
    }
    return true;
}

bool cholesky_solve(const std::vector<double>& A, int n, std::vector<double>& b,
                    double ridge_scale) {
    double trace = 0.0;
    for (int i = 0; i < n; ++i) trace += A[static_cast<size_t>(i) * n + i];
    // Trace can be zero when every constraint row vanishes (it happens at
    // symmetric seeds); fall back to an absolute floor so L stays SPD.
    const double ridge = ridge_scale * (trace > 0.0 ? trace : 1.0);

    std::vector<double> L(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = A[static_cast<size_t>(i) * n + j];
            if (i == j) s += ridge;
            for (int k = 0; k < j; ++k)
                s -= L[static_cast<size_t>(i) * n + k] * L[static_cast<size_t>(j) * n + k];
            if (i == j) {
                if (s <= 0.0) return false;
                L[static_cast<size_t>(i) * n + j] = std::sqrt(s);
            } else {
                L[static_cast<size_t>(i) * n + j] = s / L[static_cast<size_t>(j) * n + j];
            }
        }
    }
    // forward then back substitution, in place in b
    for (int i = 0; i < n; ++i) {
        double s = b[static_cast<size_t>(i)];
        for (int k = 0; k < i; ++k) s -= L[static_cast<size_t>(i) * n + k] * b[static_cast<size_t>(k)];
        b[static_cast<size_t>(i)] = s / L[static_cast<size_t>(i) * n + i];
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = b[static_cast<size_t>(i)];
        for (int k = i + 1; k < n; ++k) s -= L[static_cast<size_t>(k) * n + i] * b[static_cast<size_t>(k)];
        b[static_cast<size_t>(i)] = s / L[static_cast<size_t>(i) * n + i];
    }
    return true;
}

}  // namespace hk
