#pragma once

#include <complex>
#include <vector>

#include "hk/types.hpp"

// Trigonometric loops for the variational orbit search. A loop stores the
// complex Fourier coefficients of zeta(t) = x(t) + i y(t) on a chosen mode
// support; z is never a free curve: it is recovered from the horizontality
// relation dz/dt = (x y' - y x')/2, which is itself a trig polynomial, so the
// quadrature is exact term by term.

namespace hk {

struct LoopPath {
    double T = 0.0;                       // period, > 0
    std::vector<int> ks;                  // strictly increasing mode indices
    std::vector<std::complex<double>> c;  // same length as ks
    double z0 = 0.0;                      // mean of z over one period
};

struct SymmetryClass {
    bool enforce_S1 = true;  // gamma(t + T/3) = R_{2pi/3} gamma(t)
    bool enforce_S2 = true;  // z(t + T/2) = -z(t)
};

// Mode supports. The three-fold symmetry is equivalent to the support
// condition k = 1 (mod 3); without it every mode in [-n, n] participates.
std::vector<int> s1_mode_indices(int n_modes);
std::vector<int> full_mode_indices(int n_modes);

// Zeroes every coefficient outside the S1 support. Idempotent; acts as the
// identity on loops that already satisfy the symmetry.
LoopPath project_s1(const LoopPath& loop);

// The rotation by 2pi/3 about the z-axis, as it acts on configuration space.
std::array<std::array<double, 3>, 3> rotation_2pi3();

// Fourier mode m of dz/dt = Im(conj(zeta) zeta')/2:
//   w_m = (omega/4) sum_k (2k + m) conj(c_k) c_{k+m}.
std::complex<double> loop_wmode(const LoopPath& loop, int m);

// w_0; z closes iff this vanishes.
double closure_defect(const LoopPath& loop);

// Positive even m with both partner modes representable; S2 holds iff w_m = 0
// for all of these and w_0 = 0 and z0 = 0.
std::vector<int> even_wmode_indices(const LoopPath& loop);

// z(t) as a finite Fourier series, built once and cheap to evaluate.
class ZSeries {
  public:
    ZSeries() = default;
    ZSeries(double zbar, double omega,
            std::vector<std::pair<int, std::complex<double>>> terms)
        : zbar_(zbar), omega_(omega), terms_(std::move(terms)) {}
    double operator()(double t) const;
    double mean() const { return zbar_; }
    // d/dt of the series (= w(t) minus its mean, which is zero for a closing loop)
    double deriv(double t) const;

  private:
    double zbar_ = 0.0, omega_ = 0.0;
    std::vector<std::pair<int, std::complex<double>>> terms_;  // (m, w_m/(i m omega))
};

// Throws NonClosingZ when |w_0| > 1e-12 (nothing then closes the vertical
// component; symmetric loops have w_0 = 0 identically).
ZSeries reconstruct_z(const LoopPath& loop);

struct LoopPoint {
    double x, y, z;
    double dx, dy, dz;
    double ddx, ddy;
};

// Pointwise evaluation at arbitrary t (builds on a prepared ZSeries).
class LoopEvaluator {
  public:
    explicit LoopEvaluator(const LoopPath& loop);  // throws NonClosingZ
    LoopPoint operator()(double t) const;

  private:
    LoopPath loop_;
    ZSeries z_;
};

struct LoopSamples {
    std::vector<double> t, x, y, z, dx, dy, dz, ddx, ddy;
};

// M equispaced samples over one period (endpoint excluded).
LoopSamples sample_loop(const LoopPath& loop, int M);

// Size measure of the loop: sup over the sample grid of rho(gamma(t)).
// Dilation-homogeneous of degree one, which is what the period law needs.
double loop_sup_rho(const LoopPath& loop, int M = 1024);

// Action integral of L = K + U over one period: spectral (exact) kinetic
// term plus trapezoid potential term, which is spectrally accurate for
// periodic integrands. Throws SingularOrigin if a node sits at the gauge
// singularity; NonClosingZ propagates from the z reconstruction.
double action(const LoopPath& loop, const Params& p, int quadrature_nodes = 512);

// gamma_lambda(t) = delta_lambda gamma(t / lambda^2): coefficients scale by
// lambda, period by lambda^2, z0 by lambda^2. Action-invariant.
LoopPath dilate_loop(const LoopPath& loop, double lambda);

// Three-fold symmetric planar seed (a rounded deltoid) with modes k = 1 and
// k = -2; the reconstructed z is a small pure 3rd-harmonic odd wave, so the
// seed satisfies both symmetries exactly. size sets the k = 1 amplitude.
LoopPath deltoid_seed(int n_modes, double size = 1.0, double T = 0.0 /* 2*pi */);

}  // namespace hk
