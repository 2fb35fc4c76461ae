#include "hk/search.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "hk/geometry.hpp"
#include "hk/linalg.hpp"

namespace hk {
namespace {

using cplx = std::complex<double>;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

int next_pow2(int n) {
    int p = 1;
    while (p < n) p <<= 1;
    return p;
}

void fft_radix2(std::vector<cplx>& a, bool inverse) {
    const size_t n = a.size();
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 1.0 : -1.0) * kTwoPi / static_cast<double>(len);
        const cplx wl = std::polar(1.0, ang);
        for (size_t i = 0; i < n; i += len) {
            cplx w = 1.0;
            for (size_t k = 0; k < len / 2; ++k) {
                const cplx u = a[i + k], v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (auto& v : a) v /= static_cast<double>(n);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

// The search space: fixed mode support and quadrature grid, variables are the
// packed real coefficient pairs (plus the z mean when S2 is off).
class Space {
  public:
    Space(std::vector<int> modes, double T, int M, bool s2, const MinimizeOptions& opts,
          const Params& p)
        : ks_(std::move(modes)),
          T_(T),
          omega_(kTwoPi / T),
          M_(M),
          s2_(s2),
          prm_(p),
          opts_(opts) {
        K_ = static_cast<int>(ks_.size());
        if (K_ == 0) throw std::invalid_argument("empty mode support");
        kmin_ = ks_.front();
        kmax_ = ks_.back();
        const int span = kmax_ - kmin_;
        if (M_ <= 2 * span)
            throw std::invalid_argument("quadrature grid too coarse for the mode span");
        nvar_ = 2 * K_ + (s2_ ? 0 : 1);

        kidx_.assign(static_cast<size_t>(span) + 1, -1);
        for (int i = 0; i < K_; ++i) kidx_[static_cast<size_t>(ks_[i] - kmin_)] = i;

        roots_.resize(static_cast<size_t>(M_));
        for (int r = 0; r < M_; ++r)
            roots_[static_cast<size_t>(r)] = std::polar(1.0, kTwoPi * r / M_);

        for (int m = 1; m <= span; ++m) {
            bool rep = false;
            for (int k : ks_)
                if (index_of(k + m) >= 0) {
                    rep = true;
                    break;
                }
            if (!rep) continue;
            wms_.push_back(m);
            if (s2_ && m % 2 == 0) cms_.push_back(m);
        }
        nrows_ = 1 + 2 * static_cast<int>(cms_.size());
    }

    int nvar() const { return nvar_; }

    // Inverse of the kinetic curvature per packed variable: the action's
    // Hessian is dominated by the diagonal 4 pi^2 k^2 / T of the kinetic
    // term, which spans four decades across the mode ladder. Seeding the
    // L-BFGS initial metric with it removes that spread.
    std::vector<double> preconditioner() const {
        std::vector<double> d(static_cast<size_t>(nvar_), 1.0);
        for (int i = 0; i < K_; ++i) {
            const double w = 4.0 * std::numbers::pi * std::numbers::pi / T_ *
                             static_cast<double>(ks_[i]) * static_cast<double>(ks_[i]);
            d[static_cast<size_t>(2 * i)] = d[static_cast<size_t>(2 * i + 1)] =
                1.0 / std::max(w, 1.0);
        }
        return d;  // a trailing z-offset slot keeps weight 1
    }
    int nrows() const { return nrows_; }
    double period() const { return T_; }
    const std::vector<int>& modes() const { return ks_; }

    std::vector<double> pack(const LoopPath& loop) const {
        std::vector<double> x(static_cast<size_t>(nvar_), 0.0);
        for (size_t i = 0; i < loop.ks.size(); ++i) {
            const int j = index_of(loop.ks[i]);
            if (j < 0) {
                if (std::abs(loop.c[i]) != 0.0)
                    throw std::invalid_argument("loop has a mode outside the search support");
                continue;
            }
            x[static_cast<size_t>(2 * j)] = loop.c[i].real();
            x[static_cast<size_t>(2 * j) + 1] = loop.c[i].imag();
        }
        if (!s2_) x[static_cast<size_t>(2 * K_)] = loop.z0;
        return x;
    }

    LoopPath unpack(const std::vector<double>& x) const {
        LoopPath loop;
        loop.T = T_;
        loop.ks = ks_;
        loop.c.resize(static_cast<size_t>(K_));
        for (int i = 0; i < K_; ++i)
            loop.c[static_cast<size_t>(i)] = {x[static_cast<size_t>(2 * i)],
                                              x[static_cast<size_t>(2 * i) + 1]};
        loop.z0 = s2_ ? 0.0 : x[static_cast<size_t>(2 * K_)];
        return loop;
    }

    // Objective (action + collapse barrier) and its exact gradient.
    // Returns false -- with f = +inf -- when a node reaches the singular set,
    // so the line search simply rejects the trial point.
    bool eval(const std::vector<double>& x, double& f, std::vector<double>* grad,
              double* min_rho_out = nullptr, bool* barrier_active_out = nullptr) const {
        const double wt = T_ / M_;
        std::vector<cplx> c(static_cast<size_t>(K_));
        for (int i = 0; i < K_; ++i)
            c[static_cast<size_t>(i)] = {x[static_cast<size_t>(2 * i)],
                                         x[static_cast<size_t>(2 * i) + 1]};
        const double zbar = s2_ ? 0.0 : x[static_cast<size_t>(2 * K_)];

        double kin = 0.0;
        for (int i = 0; i < K_; ++i)
            kin += static_cast<double>(ks_[i]) * ks_[i] * std::norm(c[static_cast<size_t>(i)]);
        kin *= 2.0 * std::numbers::pi * std::numbers::pi / T_;

        // planar nodes (the kinetic term is summed spectrally above)
        std::vector<cplx> zeta(static_cast<size_t>(M_), 0.0);
        for (int i = 0; i < K_; ++i) {
            const cplx ci = c[static_cast<size_t>(i)];
            if (ci == 0.0) continue;
            for (int j = 0; j < M_; ++j)
                zeta[static_cast<size_t>(j)] += ci * root(ks_[i] * j);
        }

        // w modes and z nodes
        std::vector<cplx> wm(wms_.size(), 0.0);
        for (size_t mi = 0; mi < wms_.size(); ++mi) {
            const int m = wms_[mi];
            cplx acc = 0.0;
            for (int i = 0; i < K_; ++i) {
                const int j = index_of(ks_[i] + m);
                if (j < 0) continue;
                acc += (2.0 * ks_[i] + m) * std::conj(c[static_cast<size_t>(i)]) *
                       c[static_cast<size_t>(j)];
            }
            wm[mi] = 0.25 * omega_ * acc;
        }
        std::vector<double> z(static_cast<size_t>(M_), zbar);
        for (size_t mi = 0; mi < wms_.size(); ++mi) {
            const int m = wms_[mi];
            const cplx v = wm[mi] / cplx(0.0, m * omega_);
            for (int j = 0; j < M_; ++j) {
                const cplx e = root(m * j);
                z[static_cast<size_t>(j)] += 2.0 * (v.real() * e.real() - v.imag() * e.imag());
            }
        }

        // potential + barrier, and their partials at the nodes
        std::vector<double> fx, fy, fz;
        if (grad) {
            fx.assign(static_cast<size_t>(M_), 0.0);
            fy.assign(static_cast<size_t>(M_), 0.0);
            fz.assign(static_cast<size_t>(M_), 0.0);
        }
        double pot = 0.0;
        double min_rho = std::numeric_limits<double>::infinity();
        bool barrier_active = false;
        const double rho0 = opts_.barrier_rho;
        for (int j = 0; j < M_; ++j) {
            const double xx = zeta[static_cast<size_t>(j)].real();
            const double yy = zeta[static_cast<size_t>(j)].imag();
            const double zz = z[static_cast<size_t>(j)];
            const double pl = xx * xx + yy * yy;
            const double g = pl * pl + zz * zz / 16.0;
            if (g == 0.0) {
                f = std::numeric_limits<double>::infinity();
                return false;
            }
            const double sg = std::sqrt(g);
            const double rho = std::sqrt(std::sqrt(g));
            min_rho = std::min(min_rho, rho);
            pot += prm_.alpha / sg;
            double bx = 0.0, by = 0.0, bz = 0.0;  // barrier partials
            if (rho < rho0) {
                barrier_active = true;
                const double q = rho0 / rho - 1.0;
                pot += opts_.barrier_strength * q * q;
                if (grad) {
                    const double dbdrho = -2.0 * opts_.barrier_strength * q * rho0 / (rho * rho);
                    const double g34 = sg * rho;  // g^(3/4)
                    bx = dbdrho * xx * pl / g34;
                    by = dbdrho * yy * pl / g34;
                    bz = dbdrho * zz / (32.0 * g34);
                }
            }
            if (grad) {
                const double c1 = -0.5 * prm_.alpha / (g * sg);
                fx[static_cast<size_t>(j)] = c1 * 4.0 * xx * pl + bx;
                fy[static_cast<size_t>(j)] = c1 * 4.0 * yy * pl + by;
                fz[static_cast<size_t>(j)] = c1 * zz / 8.0 + bz;
            }
        }
        f = kin + wt * pot;
        if (min_rho_out) *min_rho_out = min_rho;
        if (barrier_active_out) *barrier_active_out = barrier_active;
        if (min_rho < 1e-2 * rho0) {
            // punched far through the barrier; never accept such a point
            f = std::numeric_limits<double>::infinity();
            return false;
        }
        if (!grad) return true;

        // Wirtinger derivative per mode, then the real pair gradient.
        std::vector<cplx> gw(static_cast<size_t>(K_), 0.0);
        for (int i = 0; i < K_; ++i)
            gw[static_cast<size_t>(i)] = 2.0 * std::numbers::pi * std::numbers::pi / T_ *
                                         static_cast<double>(ks_[i]) * ks_[i] *
                                         c[static_cast<size_t>(i)];
        // planar part: (wt/2) E^H (fx + i fy)
        for (int i = 0; i < K_; ++i) {
            cplx acc = 0.0;
            for (int j = 0; j < M_; ++j)
                acc += root(-ks_[i] * j) *
                       cplx(fx[static_cast<size_t>(j)], fy[static_cast<size_t>(j)]);
            gw[static_cast<size_t>(i)] += 0.5 * wt * acc;
        }
        // vertical part via S_m = wt sum_j fz_j e^{i m omega t_j}
        std::vector<cplx> Sm(wms_.size());
        for (size_t mi = 0; mi < wms_.size(); ++mi) {
            const int m = wms_[mi];
            cplx acc = 0.0;
            for (int j = 0; j < M_; ++j) acc += fz[static_cast<size_t>(j)] * root(m * j);
            Sm[mi] = wt * acc;
        }
        for (int i = 0; i < K_; ++i) {
            const int k = ks_[i];
            cplx acc = 0.0;
            for (size_t mi = 0; mi < wms_.size(); ++mi) {
                const int m = wms_[mi];
                const int jp = index_of(k + m);
                if (jp >= 0)
                    acc += Sm[mi] * (2.0 * k + m) * c[static_cast<size_t>(jp)] / cplx(0.0, 4.0 * m);
                const int jm = index_of(k - m);
                if (jm >= 0)
                    acc += std::conj(Sm[mi]) * (2.0 * k - m) * c[static_cast<size_t>(jm)] /
                           cplx(0.0, -4.0 * m);
            }
            gw[static_cast<size_t>(i)] += acc;
        }
        grad->assign(static_cast<size_t>(nvar_), 0.0);
        for (int i = 0; i < K_; ++i) {
            (*grad)[static_cast<size_t>(2 * i)] = 2.0 * gw[static_cast<size_t>(i)].real();
            (*grad)[static_cast<size_t>(2 * i) + 1] = 2.0 * gw[static_cast<size_t>(i)].imag();
        }
        if (!s2_) {
            double acc = 0.0;
            for (int j = 0; j < M_; ++j) acc += fz[static_cast<size_t>(j)];
            (*grad)[static_cast<size_t>(2 * K_)] = wt * acc;
        }
        return true;
    }

    // Exact Hessian-vector product of the smooth objective (kinetic plus
    // potential; the collapse barrier is left out, so callers must only use
    // this where the barrier is inactive). Mirrors eval's chain rule: the
    // direction enters through the planar nodes, through the quadratic
    // vertical modes, and through the pointwise curvature of the potential.
    void hessvec(const std::vector<double>& x, const std::vector<double>& v,
                 std::vector<double>& Hv) const {
        const double wt = T_ / M_;
        std::vector<cplx> c(static_cast<size_t>(K_)), dc(static_cast<size_t>(K_));
        for (int i = 0; i < K_; ++i) {
            c[static_cast<size_t>(i)] = {x[static_cast<size_t>(2 * i)],
                                         x[static_cast<size_t>(2 * i) + 1]};
            dc[static_cast<size_t>(i)] = {v[static_cast<size_t>(2 * i)],
                                          v[static_cast<size_t>(2 * i) + 1]};
        }
        const double zbar = s2_ ? 0.0 : x[static_cast<size_t>(2 * K_)];
        const double dzbar = s2_ ? 0.0 : v[static_cast<size_t>(2 * K_)];

        std::vector<cplx> zeta(static_cast<size_t>(M_), 0.0);
        std::vector<cplx> dnode(static_cast<size_t>(M_), 0.0);  // node displacement
        for (int i = 0; i < K_; ++i) {
            const cplx ci = c[static_cast<size_t>(i)];
            const cplx di = dc[static_cast<size_t>(i)];
            for (int j = 0; j < M_; ++j) {
                const cplx e = root(ks_[i] * j);
                zeta[static_cast<size_t>(j)] += ci * e;
                dnode[static_cast<size_t>(j)] += di * e;
            }
        }

        std::vector<cplx> wm(wms_.size(), 0.0), dwm(wms_.size(), 0.0);
        for (size_t mi = 0; mi < wms_.size(); ++mi) {
            const int m = wms_[mi];
            cplx acc = 0.0, dacc = 0.0;
            for (int i = 0; i < K_; ++i) {
                const int j = index_of(ks_[i] + m);
                if (j < 0) continue;
                const double w = 2.0 * ks_[i] + m;
                acc += w * std::conj(c[static_cast<size_t>(i)]) * c[static_cast<size_t>(j)];
                dacc += w * (std::conj(dc[static_cast<size_t>(i)]) * c[static_cast<size_t>(j)] +
                             std::conj(c[static_cast<size_t>(i)]) * dc[static_cast<size_t>(j)]);
            }
            wm[mi] = 0.25 * omega_ * acc;
            dwm[mi] = 0.25 * omega_ * dacc;
        }
        std::vector<double> z(static_cast<size_t>(M_), zbar);
        std::vector<double> dz(static_cast<size_t>(M_), dzbar);
        for (size_t mi = 0; mi < wms_.size(); ++mi) {
            const int m = wms_[mi];
            const cplx u = wm[mi] / cplx(0.0, m * omega_);
            const cplx du = dwm[mi] / cplx(0.0, m * omega_);
            for (int j = 0; j < M_; ++j) {
                const cplx e = root(m * j);
                z[static_cast<size_t>(j)] += 2.0 * (u.real() * e.real() - u.imag() * e.imag());
                dz[static_cast<size_t>(j)] += 2.0 * (du.real() * e.real() - du.imag() * e.imag());
            }
        }

        // pointwise: first partial fz (feeds the S_m terms) and the
        // curvature of alpha g^(-1/2) applied to the node displacement
        std::vector<double> fz(static_cast<size_t>(M_));
        std::vector<double> dfx(static_cast<size_t>(M_)), dfy(static_cast<size_t>(M_)),
            dfz(static_cast<size_t>(M_));
        for (int j = 0; j < M_; ++j) {
            const double xx = zeta[static_cast<size_t>(j)].real();
            const double yy = zeta[static_cast<size_t>(j)].imag();
            const double zz = z[static_cast<size_t>(j)];
            const double pl = xx * xx + yy * yy;
            const double g = pl * pl + zz * zz / 16.0;
            const double sg = std::sqrt(g);
            const double c1 = -0.5 * prm_.alpha / (g * sg);
            const double c2 = 0.75 * prm_.alpha / (g * g * sg);
            const double gx = 4.0 * xx * pl, gy = 4.0 * yy * pl, gz = zz / 8.0;
            fz[static_cast<size_t>(j)] = c1 * gz;
            const double vxx = c2 * gx * gx + c1 * (4.0 * pl + 8.0 * xx * xx);
            const double vxy = c2 * gx * gy + c1 * 8.0 * xx * yy;
            const double vyy = c2 * gy * gy + c1 * (4.0 * pl + 8.0 * yy * yy);
            const double vxz = c2 * gx * gz;
            const double vyz = c2 * gy * gz;
            const double vzz = c2 * gz * gz + c1 * 0.125;
            const double ddx = dnode[static_cast<size_t>(j)].real();
            const double ddy = dnode[static_cast<size_t>(j)].imag();
            const double ddz = dz[static_cast<size_t>(j)];
            dfx[static_cast<size_t>(j)] = vxx * ddx + vxy * ddy + vxz * ddz;
            dfy[static_cast<size_t>(j)] = vxy * ddx + vyy * ddy + vyz * ddz;
            dfz[static_cast<size_t>(j)] = vxz * ddx + vyz * ddy + vzz * ddz;
        }

        std::vector<cplx> Sm(wms_.size()), dSm(wms_.size());
        for (size_t mi = 0; mi < wms_.size(); ++mi) {
            const int m = wms_[mi];
            cplx acc = 0.0, dacc = 0.0;
            for (int j = 0; j < M_; ++j) {
                const cplx e = root(m * j);
                acc += fz[static_cast<size_t>(j)] * e;
                dacc += dfz[static_cast<size_t>(j)] * e;
            }
            Sm[mi] = wt * acc;
            dSm[mi] = wt * dacc;
        }

        std::vector<cplx> dgw(static_cast<size_t>(K_));
        for (int i = 0; i < K_; ++i)
            dgw[static_cast<size_t>(i)] = 2.0 * std::numbers::pi * std::numbers::pi / T_ *
                                          static_cast<double>(ks_[i]) * ks_[i] *
                                          dc[static_cast<size_t>(i)];
        for (int i = 0; i < K_; ++i) {
            cplx acc = 0.0;
            for (int j = 0; j < M_; ++j)
                acc += root(-ks_[i] * j) *
                       cplx(dfx[static_cast<size_t>(j)], dfy[static_cast<size_t>(j)]);
            dgw[static_cast<size_t>(i)] += 0.5 * wt * acc;
        }
        for (int i = 0; i < K_; ++i) {
            const int k = ks_[i];
            cplx acc = 0.0;
            for (size_t mi = 0; mi < wms_.size(); ++mi) {
                const int m = wms_[mi];
                const int jp = index_of(k + m);
                if (jp >= 0)
                    acc += (dSm[mi] * c[static_cast<size_t>(jp)] +
                            Sm[mi] * dc[static_cast<size_t>(jp)]) *
                           (2.0 * k + m) / cplx(0.0, 4.0 * m);
                const int jm = index_of(k - m);
                if (jm >= 0)
                    acc += (std::conj(dSm[mi]) * c[static_cast<size_t>(jm)] +
                            std::conj(Sm[mi]) * dc[static_cast<size_t>(jm)]) *
                           (2.0 * k - m) / cplx(0.0, -4.0 * m);
            }
            dgw[static_cast<size_t>(i)] += acc;
        }
        Hv.assign(static_cast<size_t>(nvar_), 0.0);
        for (int i = 0; i < K_; ++i) {
            Hv[static_cast<size_t>(2 * i)] = 2.0 * dgw[static_cast<size_t>(i)].real();
            Hv[static_cast<size_t>(2 * i) + 1] = 2.0 * dgw[static_cast<size_t>(i)].imag();
        }
        if (!s2_) {
            double acc = 0.0;
            for (int j = 0; j < M_; ++j) acc += dfz[static_cast<size_t>(j)];
            Hv[static_cast<size_t>(2 * K_)] = wt * acc;
        }
    }

    void constraints(const std::vector<double>& x, std::vector<double>& h) const {
        h.assign(static_cast<size_t>(nrows_), 0.0);
        std::vector<cplx> c(static_cast<size_t>(K_));
        for (int i = 0; i < K_; ++i)
            c[static_cast<size_t>(i)] = {x[static_cast<size_t>(2 * i)],
                                         x[static_cast<size_t>(2 * i) + 1]};
        double w0 = 0.0;
        for (int i = 0; i < K_; ++i)
            w0 += ks_[i] * std::norm(c[static_cast<size_t>(i)]);
        h[0] = 0.5 * omega_ * w0;
        for (size_t r = 0; r < cms_.size(); ++r) {
            const int m = cms_[r];
            cplx acc = 0.0;
            for (int i = 0; i < K_; ++i) {
                const int j = index_of(ks_[i] + m);
                if (j < 0) continue;
                acc += (2.0 * ks_[i] + m) * std::conj(c[static_cast<size_t>(i)]) *
                       c[static_cast<size_t>(j)];
            }
            acc *= 0.25 * omega_;
            h[1 + 2 * r] = acc.real();
            h[2 + 2 * r] = acc.imag();
        }
    }

    // Row-major nrows x nvar Jacobian of the constraints.
    void cjac(const std::vector<double>& x, std::vector<double>& C) const {
        C.assign(static_cast<size_t>(nrows_) * nvar_, 0.0);
        std::vector<cplx> c(static_cast<size_t>(K_));
        for (int i = 0; i < K_; ++i)
            c[static_cast<size_t>(i)] = {x[static_cast<size_t>(2 * i)],
                                         x[static_cast<size_t>(2 * i) + 1]};
        for (int i = 0; i < K_; ++i) {
            C[static_cast<size_t>(2 * i)] = omega_ * ks_[i] * c[static_cast<size_t>(i)].real();
            C[static_cast<size_t>(2 * i) + 1] = omega_ * ks_[i] * c[static_cast<size_t>(i)].imag();
        }
        for (size_t r = 0; r < cms_.size(); ++r) {
            const int m = cms_[r];
            double* rowRe = &C[(1 + 2 * r) * static_cast<size_t>(nvar_)];
            double* rowIm = &C[(2 + 2 * r) * static_cast<size_t>(nvar_)];
            for (int i = 0; i < K_; ++i) {
                const int k = ks_[i];
                const int jp = index_of(k + m);
                const int jm = index_of(k - m);
                const cplx cp = jp >= 0 ? c[static_cast<size_t>(jp)] : cplx(0.0);
                const cplx cmj = jm >= 0 ? std::conj(c[static_cast<size_t>(jm)]) : cplx(0.0);
                const cplx P = 0.25 * omega_ * ((2.0 * k + m) * cp + (2.0 * k - m) * cmj);
                const cplx Q = cplx(0.0, 0.25 * omega_) * ((2.0 * k - m) * cmj - (2.0 * k + m) * cp);
                rowRe[2 * i] = P.real();
                rowRe[2 * i + 1] = Q.real();
                rowIm[2 * i] = P.imag();
                rowIm[2 * i + 1] = Q.imag();
            }
        }
    }

    // Orthonormalized constraint rows, C = R Q with Q Q^T = I on the live
    // rows (modified Gram-Schmidt, one reorthogonalization pass, extended
    // precision so the defect subtraction does not re-round per row).
    //
    // Near a converged loop the rows coupling only high Fourier modes lose
    // their gradient weight exponentially, and the row set turns nearly
    // dependent. A row that keeps no stable direction must be dropped, not
    // orthonormalized: its normalized gradient rotates at rate |Hess h|/|grad
    // h|, which diverges as the norm vanishes, so projecting along it makes
    // the projected gradient field discontinuous on the scale of the steps
    // the minimizer takes and the line search can never settle. Two cuts
    // remove exactly those rows. A row whose whole norm is negligible
    // against the largest row is spectral tail noise and is cut outright;
    // the residual it can leave in the gradient is bounded by the physical
    // multiplier times the cut, far under gtol. A row whose defect after
    // orthogonalization against earlier rows falls under theta relative to
    // its own size is cut for the same reason: the defect direction is
    // curvature-dominated. Dropped rows fall back to the retraction's slack
    // tier, which checks their values instead of correcting along them.
    struct RowBasis {
        std::vector<long double> Q;     // nrows x nvar
        std::vector<long double> R;     // nrows x nrows, lower triangular
        std::vector<char> live;
        std::vector<long double> orig;  // input row norms, for rank decisions
    };

    static constexpr long double kRowDropTheta = 1e-5L;  // relative defect cut
    static constexpr long double kRowAbsTheta = 1e-10L;  // whole-row cut

    RowBasis factor_rows(const std::vector<double>& C) const {
        RowBasis B;
        B.Q.assign(C.begin(), C.end());
        B.R.assign(static_cast<size_t>(nrows_) * nrows_, 0.0L);
        B.live.assign(static_cast<size_t>(nrows_), 1);
        B.orig.assign(static_cast<size_t>(nrows_), 0.0L);
        long double maxorig = 0.0L;
        for (int r = 0; r < nrows_; ++r) {
            const long double* q = &B.Q[static_cast<size_t>(r) * nvar_];
            long double s = 0.0L;
            for (int i = 0; i < nvar_; ++i) s += q[i] * q[i];
            B.orig[static_cast<size_t>(r)] = std::sqrt(s);
            maxorig = std::max(maxorig, B.orig[static_cast<size_t>(r)]);
        }
        const long double abs_cut = kRowAbsTheta * maxorig;
        for (int r = 0; r < nrows_; ++r) {
            long double* q = &B.Q[static_cast<size_t>(r) * nvar_];
            const long double orig = B.orig[static_cast<size_t>(r)];
            if (orig <= abs_cut) {
                B.live[static_cast<size_t>(r)] = 0;
                for (int i = 0; i < nvar_; ++i) q[i] = 0.0L;
                continue;
            }
            for (int pass = 0; pass < 2; ++pass) {
                for (int s = 0; s < r; ++s) {
                    if (!B.live[static_cast<size_t>(s)]) continue;
                    const long double* qs = &B.Q[static_cast<size_t>(s) * nvar_];
                    long double dp = 0.0L;
                    for (int i = 0; i < nvar_; ++i) dp += q[i] * qs[i];
                    B.R[static_cast<size_t>(r) * nrows_ + s] += dp;
                    for (int i = 0; i < nvar_; ++i) q[i] -= dp * qs[i];
                }
            }
            long double nn = 0.0L;
            for (int i = 0; i < nvar_; ++i) nn += q[i] * q[i];
            nn = std::sqrt(nn);
            B.R[static_cast<size_t>(r) * nrows_ + r] = nn;
            if (nn <= kRowDropTheta * orig) {
                B.live[static_cast<size_t>(r)] = 0;
                for (int i = 0; i < nvar_; ++i) q[i] = 0.0L;
            } else {
                for (int i = 0; i < nvar_; ++i) q[i] /= nn;
            }
        }
        return B;
    }

    // Constraint multipliers for a raw gradient. High-m constraint rows have
    // exponentially small gradients at a converged loop, so the plain least
    // squares attribution of the normal component is wildly ill-posed (exact
    // back-substitution produces multipliers ~1e11 where the physical ones
    // are O(1)). Tikhonov damping keeps the attribution on the well-scaled
    // rows; the residual mis-fit only perturbs a curvature correction, never
    // feasibility, so a damped fit is exactly what the Newton solve needs.
    std::vector<double> multipliers(const RowBasis& B, const std::vector<double>& g) const {
        const size_t nr = static_cast<size_t>(nrows_);
        std::vector<long double> qg(nr, 0.0L);
        long double scale = 0.0L;
        for (size_t r = 0; r < nr; ++r) scale = std::max(scale, B.orig[r]);
        for (int r = 0; r < nrows_; ++r) {
            if (!B.live[static_cast<size_t>(r)]) continue;
            const long double* q = &B.Q[static_cast<size_t>(r) * nvar_];
            long double s = 0.0L;
            for (int i = 0; i < nvar_; ++i) s += q[i] * g[static_cast<size_t>(i)];
            qg[static_cast<size_t>(r)] = s;
        }
        // (R R^T + tau^2) mu = R qg, by Cholesky in extended precision
        const long double tau2 = 1e-12L * scale * scale;
        std::vector<long double> G(nr * nr, 0.0L);
        std::vector<long double> mu(nr, 0.0L);
        for (size_t r = 0; r < nr; ++r) {
            const long double* Rr = &B.R[r * nr];
            for (size_t s = 0; s <= r; ++s) {
                const long double* Rs = &B.R[s * nr];
                long double acc = 0.0L;
                for (size_t t = 0; t <= s; ++t) acc += Rr[t] * Rs[t];
                G[r * nr + s] = acc;
            }
            G[r * nr + r] += tau2;
            long double b = 0.0L;
            for (size_t t = 0; t <= r; ++t) b += Rr[t] * qg[t];
            mu[r] = b;
        }
        for (size_t k = 0; k < nr; ++k) {  // lower Cholesky, in place
            long double diag = G[k * nr + k];
            for (size_t t = 0; t < k; ++t) diag -= G[k * nr + t] * G[k * nr + t];
            if (!(diag > 0.0L)) return std::vector<double>(nr, 0.0);
            diag = std::sqrt(diag);
            G[k * nr + k] = diag;
            for (size_t r = k + 1; r < nr; ++r) {
                long double acc = G[r * nr + k];
                for (size_t t = 0; t < k; ++t) acc -= G[r * nr + t] * G[k * nr + t];
                G[r * nr + k] = acc / diag;
            }
        }
        for (size_t r = 0; r < nr; ++r) {
            long double s = mu[r];
            for (size_t t = 0; t < r; ++t) s -= G[r * nr + t] * mu[t];
            mu[r] = s / G[r * nr + r];
        }
        for (size_t r = nr; r-- > 0;) {
            long double s = mu[r];
            for (size_t t = r + 1; t < nr; ++t) s -= G[t * nr + r] * mu[t];
            mu[r] = s / G[r * nr + r];
        }
        return std::vector<double>(mu.begin(), mu.end());
    }

    // v <- v - Q^T Q v  (orthogonal projection onto the tangent space).
    // The sweep runs on an extended-precision copy so the subtraction of
    // large normal components does not re-round per row.
    void project_tangent(const std::vector<double>& C, std::vector<double>& v) const {
        const RowBasis B = factor_rows(C);
        std::vector<long double> vl(v.begin(), v.end());
        for (int pass = 0; pass < 2; ++pass) {
            for (int r = 0; r < nrows_; ++r) {
                if (!B.live[static_cast<size_t>(r)]) continue;
                const long double* q = &B.Q[static_cast<size_t>(r) * nvar_];
                long double dp = 0.0L;
                for (int i = 0; i < nvar_; ++i) dp += q[i] * vl[static_cast<size_t>(i)];
                for (int i = 0; i < nvar_; ++i) vl[static_cast<size_t>(i)] -= dp * q[i];
            }
        }
        for (size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(vl[i]);
    }

    // Rows the factorization keeps are solvable to rounding; excluded rows
    // are within the drop threshold of the kept span and get a proportional
    // slack instead. Their values near a converged loop are products of
    // exponentially small coefficients, far below even the slack.
    bool feasible(const RowBasis& B, const std::vector<double>& h) const {
        for (int r = 0; r < nrows_; ++r) {
            const double tol = B.live[static_cast<size_t>(r)] ? 1e-13 : 1e-9;
            if (std::fabs(h[static_cast<size_t>(r)]) > tol) return false;
        }
        return true;
    }

    // Gauss-Newton steps back onto {h = 0}; the constraints are quadratic, so
    // this converges in a few sweeps from anywhere the line search visits.
    // The minimum-norm update solves R w = h, then x -= Q^T w.
    bool retract(std::vector<double>& x) const {
        std::vector<double> h, C;
        std::vector<long double> w(static_cast<size_t>(nrows_));
        for (int it = 0; it < 25; ++it) {
            constraints(x, h);
            double hn = 0.0;
            for (double v : h) hn = std::max(hn, std::fabs(v));
            if (hn <= 1e-13) return true;
            cjac(x, C);
            const RowBasis B = factor_rows(C);
            if (feasible(B, h)) return true;
            for (int r = 0; r < nrows_; ++r) {
                if (!B.live[static_cast<size_t>(r)]) {
                    w[static_cast<size_t>(r)] = 0.0L;
                    continue;
                }
                long double s = h[static_cast<size_t>(r)];
                for (int t = 0; t < r; ++t)
                    s -= B.R[static_cast<size_t>(r) * nrows_ + t] * w[static_cast<size_t>(t)];
                w[static_cast<size_t>(r)] = s / B.R[static_cast<size_t>(r) * nrows_ + r];
            }
            for (int r = 0; r < nrows_; ++r) {
                if (!B.live[static_cast<size_t>(r)]) continue;
                const long double* q = &B.Q[static_cast<size_t>(r) * nvar_];
                const long double wr = w[static_cast<size_t>(r)];
                for (int i = 0; i < nvar_; ++i)
                    x[static_cast<size_t>(i)] =
                        static_cast<double>(x[static_cast<size_t>(i)] - wr * q[i]);
            }
        }
        constraints(x, h);
        double hn = 0.0;
        for (double v : h) hn = std::max(hn, std::fabs(v));
        if (hn <= 1e-13) return true;
        cjac(x, C);
        return feasible(factor_rows(C), h);
    }

  private:
    int index_of(int k) const {
        if (k < kmin_ || k > kmax_) return -1;
        return kidx_[static_cast<size_t>(k - kmin_)];
    }

    cplx root(long r) const {
        long m = r % M_;
        if (m < 0) m += M_;
        return roots_[static_cast<size_t>(m)];
    }

    std::vector<int> ks_;
    double T_, omega_;
    int M_;
    bool s2_;
    Params prm_;
    MinimizeOptions opts_;
    int K_ = 0, nvar_ = 0, nrows_ = 0;
    int kmin_ = 0, kmax_ = 0;
    std::vector<int> kidx_;
    std::vector<int> wms_, cms_;
    std::vector<cplx> roots_;
};

}  // namespace

OrbitCertificate certify_loop(const LoopPath& loop, const Params& p, int nodes) {
    const int M = next_pow2(std::max(nodes, 64));
    const LoopSamples smp = sample_loop(loop, M);
    const double omega = kTwoPi / loop.T;

    OrbitCertificate cert;
    cert.action = action(loop, p, M);
    cert.min_rho = std::numeric_limits<double>::infinity();

    // multiplier rate lam' = -(alpha/16) z rho^-6 at the nodes
    std::vector<double> lamdot(static_cast<size_t>(M));
    double mean = 0.0;
    for (int j = 0; j < M; ++j) {
        const auto u = static_cast<size_t>(j);
        const double pl = smp.x[u] * smp.x[u] + smp.y[u] * smp.y[u];
        const double g = pl * pl + smp.z[u] * smp.z[u] / 16.0;
        if (g == 0.0) throw SingularOrigin{};
        lamdot[u] = -(p.alpha / 16.0) * smp.z[u] / (g * std::sqrt(g));
        mean += lamdot[u];
        cert.min_rho = std::min(cert.min_rho, std::sqrt(std::sqrt(g)));
        const double K = 0.5 * (smp.dx[u] * smp.dx[u] + smp.dy[u] * smp.dy[u]);
        cert.sup_abs_H = std::max(cert.sup_abs_H, std::fabs(K - p.alpha / std::sqrt(g)));
    }
    mean /= M;
    cert.multiplier_drift = mean;

    // zero-mean spectral antiderivative of (lam' - mean)
    std::vector<cplx> buf(static_cast<size_t>(M));
    for (int j = 0; j < M; ++j) buf[static_cast<size_t>(j)] = lamdot[static_cast<size_t>(j)] - mean;
    fft_radix2(buf, false);
    buf[0] = 0.0;
    for (int r = 1; r < M; ++r) {
        const int m = r <= M / 2 ? r : r - M;
        if (m == M / 2 || m == -M / 2) {
            buf[static_cast<size_t>(r)] = 0.0;  // unpaired Nyquist mode
            continue;
        }
        buf[static_cast<size_t>(r)] /= cplx(0.0, m * omega);
    }
    fft_radix2(buf, true);

    // Planar residual split: the constant part of the multiplier enters
    // linearly, so it has a closed-form least-squares value.
    double num = 0.0, den = 0.0;
    std::vector<double> uj(static_cast<size_t>(M)), sj(static_cast<size_t>(M));
    for (int j = 0; j < M; ++j) {
        const auto k = static_cast<size_t>(j);
        const double lam = buf[k].real();
        const double pl = smp.x[k] * smp.x[k] + smp.y[k] * smp.y[k];
        const double g = pl * pl + smp.z[k] * smp.z[k] / 16.0;
        const double forcing = 2.0 * p.alpha * pl / (g * std::sqrt(g));
        uj[k] = smp.ddx[k] + lam * smp.dy[k] + 0.5 * lamdot[k] * smp.y[k] + forcing * smp.x[k];
        sj[k] = smp.ddy[k] - lam * smp.dx[k] - 0.5 * lamdot[k] * smp.x[k] + forcing * smp.y[k];
        num += smp.dx[k] * sj[k] - smp.dy[k] * uj[k];
        den += smp.dx[k] * smp.dx[k] + smp.dy[k] * smp.dy[k];
    }
    const double C = den > 0.0 ? num / den : 0.0;
    cert.multiplier_base = C;
    for (int j = 0; j < M; ++j) {
        const auto k = static_cast<size_t>(j);
        const double Rx = uj[k] + C * smp.dy[k];
        const double Ry = sj[k] - C * smp.dx[k];
        cert.el_residual_sup = std::max(cert.el_residual_sup, std::hypot(Rx, Ry));
    }
    return cert;
}

MinimizeResult minimize_action(const LoopPath& loop0, const SymmetryClass& sym,
                               const MinimizeOptions& opts, const Params& p) {
    // Respecting S1 means: no energy outside the k = 1 (mod 3) modes.
    std::vector<int> support;
    if (sym.enforce_S1) {
        for (size_t i = 0; i < loop0.ks.size(); ++i) {
            const bool in = ((loop0.ks[i] % 3) + 3) % 3 == 1;
            if (in)
                support.push_back(loop0.ks[i]);
            else if (std::abs(loop0.c[i]) != 0.0)
                throw std::invalid_argument("seed loop breaks the three-fold symmetry");
        }
    } else {
        support = loop0.ks;
    }
    if (sym.enforce_S2 && loop0.z0 != 0.0)
        throw std::invalid_argument("seed loop breaks the half-period antisymmetry (z0 != 0)");

    Space sp(support, loop0.T, opts.quadrature_nodes, sym.enforce_S2, opts, p);

    std::vector<double> x = sp.pack(loop0);
    if (!sp.retract(x)) throw std::invalid_argument("could not project the seed onto the constraint set");

    std::vector<double> C;
    double f;
    std::vector<double> g;
    double min_rho = 0.0;
    if (!sp.eval(x, f, &g, &min_rho)) throw CollapseToSingularity{};
    sp.cjac(x, C);
    sp.project_tangent(C, g);

    // L-BFGS memory (projected pairs)
    std::vector<std::vector<double>> S, Y;
    std::vector<double> rho_lb;

    const std::vector<double> precond = sp.preconditioner();
    const auto two_loop = [&](const std::vector<double>& gp) {
        std::vector<double> q = gp;
        const int mem = static_cast<int>(S.size());
        std::vector<double> alpha(static_cast<size_t>(mem));
        for (int i = mem - 1; i >= 0; --i) {
            alpha[static_cast<size_t>(i)] = rho_lb[static_cast<size_t>(i)] * dot(S[static_cast<size_t>(i)], q);
            for (size_t j = 0; j < q.size(); ++j)
                q[j] -= alpha[static_cast<size_t>(i)] * Y[static_cast<size_t>(i)][j];
        }
        // initial metric: kinetic diagonal, rescaled by the latest pair
        double gamma = 1.0;
        if (mem > 0) {
            double den = 0.0;
            const auto& y = Y.back();
            for (size_t j = 0; j < y.size(); ++j) den += y[j] * precond[j] * y[j];
            if (den > 0.0) gamma = dot(S.back(), y) / den;
        }
        for (size_t j = 0; j < q.size(); ++j) q[j] *= gamma * precond[j];
        for (int i = 0; i < mem; ++i) {
            const double beta = rho_lb[static_cast<size_t>(i)] * dot(Y[static_cast<size_t>(i)], q);
            for (size_t j = 0; j < q.size(); ++j)
                q[j] += (alpha[static_cast<size_t>(i)] - beta) * S[static_cast<size_t>(i)][j];
        }
        for (auto& v : q) v = -v;
        return q;
    };

    // Terminal Newton refinement. Close to the minimum the remaining gradient
    // lies along nearly flat directions of the preconditioned Hessian, where
    // first-order steps cannot shrink its norm by a measurable factor per
    // iteration. A few projected-CG Newton solves on the Lagrangian Hessian
    // finish the job; the constraint curvature correction is exact because the
    // constraints are quadratic (their Hessian-vector product is cjac at v).
    int it = 0;
    double gnorm = norm2(g);
    const auto newton_phase = [&]() -> bool {
        std::vector<double> graw, Hw, Cw;
        for (int round = 0; round < 60 && it < opts.max_iters; ++round) {
            if (gnorm <= opts.gtol) return true;
            double fr, mr;
            bool barrier = false;
            if (!sp.eval(x, fr, &graw, &mr, &barrier)) return false;
            if (barrier) return false;  // curvature model excludes the barrier
            sp.cjac(x, C);
            const auto B = sp.factor_rows(C);
            const std::vector<double> mu = sp.multipliers(B, graw);
            g = graw;
            sp.project_tangent(C, g);
            gnorm = norm2(g);
            f = fr;
            if (gnorm <= opts.gtol) return true;

            const auto apply = [&](const std::vector<double>& w, std::vector<double>& out) {
                sp.hessvec(x, w, out);
                sp.cjac(w, Cw);
                for (int r = 0; r < sp.nrows(); ++r) {
                    const double m = mu[static_cast<size_t>(r)];
                    if (m == 0.0) continue;
                    const double* row = &Cw[static_cast<size_t>(r) * out.size()];
                    for (size_t i = 0; i < out.size(); ++i) out[i] -= m * row[i];
                }
                sp.project_tangent(C, out);
            };

            // projected preconditioned CG on H d = -g
            const size_t n = g.size();
            std::vector<double> d(n, 0.0), r_cg(n), zv(n), pv(n), Ap(n);
            for (size_t i = 0; i < n; ++i) r_cg[i] = -g[i];
            for (size_t i = 0; i < n; ++i) zv[i] = precond[i] * r_cg[i];
            sp.project_tangent(C, zv);
            pv = zv;
            double rz = dot(r_cg, zv);
            const double rtol = std::min(0.1, std::max(1e-4, std::sqrt(gnorm)));
            const double rstop = rtol * gnorm;
            for (int cg = 0; cg < sp.nvar(); ++cg) {
                apply(pv, Ap);
                const double pAp = dot(pv, Ap);
                if (pAp <= 0.0) {
                    if (cg == 0) d = zv;  // fall back to preconditioned descent
                    break;
                }
                const double step = rz / pAp;
                for (size_t i = 0; i < n; ++i) d[i] += step * pv[i];
                for (size_t i = 0; i < n; ++i) r_cg[i] -= step * Ap[i];
                if (norm2(r_cg) <= rstop) break;
                for (size_t i = 0; i < n; ++i) zv[i] = precond[i] * r_cg[i];
                sp.project_tangent(C, zv);
                const double rz_new = dot(r_cg, zv);
                const double beta = rz_new / rz;
                for (size_t i = 0; i < n; ++i) pv[i] = zv[i] + beta * pv[i];
                rz = rz_new;
            }
            double dg = dot(d, g);
            if (!(dg < 0.0)) {
                for (size_t i = 0; i < n; ++i) d[i] = -precond[i] * g[i];
                sp.project_tangent(C, d);
                dg = dot(d, g);
                if (!(dg < 0.0)) return false;
            }

            const double noise = 1e-13 * (1.0 + std::fabs(f));
            bool accepted = false;
            std::vector<double> xt, gt, Ct;
            double alpha = 1.0;
            for (int bt = 0; bt < 30; ++bt, alpha *= 0.5) {
                xt = x;
                for (size_t i = 0; i < n; ++i) xt[i] += alpha * d[i];
                if (!sp.retract(xt)) continue;
                double ft, mrt;
                if (!sp.eval(xt, ft, &gt, &mrt)) continue;
                sp.cjac(xt, Ct);
                sp.project_tangent(Ct, gt);
                const double gnt = norm2(gt);
                const bool f_ok = ft <= f + 10.0 * noise;
                if ((gnt <= gnorm * (1.0 - 1e-4) && f_ok) ||
                    ft <= f - std::max(noise, 1e-4 * alpha * (-dg))) {
                    x = std::move(xt);
                    f = ft;
                    g = std::move(gt);
                    C = std::move(Ct);
                    gnorm = gnt;
                    accepted = true;
                    break;
                }
            }
            if (!accepted) return false;
            ++it;
            if (opts.trace) opts.trace(it, f, gnorm);
        }
        return gnorm <= opts.gtol;
    };

    if (opts.trace) opts.trace(0, f, gnorm);
    for (; it < opts.max_iters && gnorm > opts.gtol; ++it) {
        bool used_fallback = false;
        std::vector<double> d = two_loop(g);
        sp.project_tangent(C, d);
        double dg = dot(d, g);
        if (!(dg < 0.0)) {
            S.clear();
            Y.clear();
            rho_lb.clear();
            d.resize(g.size());
            for (size_t i = 0; i < g.size(); ++i) d[i] = -precond[i] * g[i];
            sp.project_tangent(C, d);
            dg = dot(d, g);
            used_fallback = true;
        }

        const double noise = 1e-13 * (1.0 + std::fabs(f));
        bool accepted = false;
        std::vector<double> xt, gt, Ct;
        double ft = 0.0, gnt = 0.0;
        for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
            double alpha = 1.0;
            for (int bt = 0; bt < 45; ++bt, alpha *= 0.5) {
                xt = x;
                for (size_t i = 0; i < xt.size(); ++i) xt[i] += alpha * d[i];
                if (!sp.retract(xt)) continue;
                double mr;
                if (!sp.eval(xt, ft, &gt, &mr)) continue;
                sp.cjac(xt, Ct);
                sp.project_tangent(Ct, gt);
                gnt = norm2(gt);
                const double pred = 1e-4 * alpha * (-dg);
                if (pred >= noise) {
                    if (ft <= f - pred) {
                        accepted = true;
                        break;
                    }
                } else {
                    // Arithmetic noise floor: progress is now measured on the
                    // projected gradient, which still has headroom.
                    if (gnt <= gnorm * (1.0 - 1e-4) && ft <= f + 10.0 * noise) {
                        accepted = true;
                        break;
                    }
                }
            }
            if (!accepted && !used_fallback) {
                S.clear();
                Y.clear();
                rho_lb.clear();
                d.resize(g.size());
                for (size_t i = 0; i < g.size(); ++i) d[i] = -precond[i] * g[i];
                sp.project_tangent(C, d);
                dg = dot(d, g);
                used_fallback = true;
            } else if (!accepted) {
                break;
            }
        }
        if (!accepted) {
            if (gnorm <= 1e-3 && newton_phase()) break;
            throw MaxIterations{};
        }

        // curvature pair, transported to the new point by projection
        std::vector<double> s_vec(x.size()), y_vec(x.size());
        for (size_t i = 0; i < x.size(); ++i) {
            s_vec[i] = xt[i] - x[i];
            y_vec[i] = gt[i] - g[i];
        }
        sp.project_tangent(Ct, s_vec);
        sp.project_tangent(Ct, y_vec);
        const double sy = dot(s_vec, y_vec);
        if (sy > 1e-10 * norm2(s_vec) * norm2(y_vec)) {
            S.push_back(std::move(s_vec));
            Y.push_back(std::move(y_vec));
            rho_lb.push_back(1.0 / sy);
            if (static_cast<int>(S.size()) > opts.lbfgs_memory) {
                S.erase(S.begin());
                Y.erase(Y.begin());
                rho_lb.erase(rho_lb.begin());
            }
        }
        x = std::move(xt);
        f = ft;
        g = std::move(gt);
        C = std::move(Ct);
        gnorm = gnt;
        if (opts.trace) opts.trace(it + 1, f, gnorm);
    }
    if (gnorm > opts.gtol && !(gnorm <= 1e-3 && newton_phase())) throw MaxIterations{};

    MinimizeResult res;
    res.loop = sp.unpack(x);
    res.iterations = it;
    res.certificate = certify_loop(res.loop, p, opts.certificate_nodes);
    res.certificate.grad_norm = gnorm;
    if (res.certificate.min_rho < opts.barrier_rho) throw CollapseToSingularity{};
    return res;
}

namespace {

Space make_space(const LoopPath& reference, const SymmetryClass& sym,
                 const MinimizeOptions& opts, const Params& p) {
    std::vector<int> support;
    if (sym.enforce_S1) {
        for (int k : reference.ks)
            if (((k % 3) + 3) % 3 == 1) support.push_back(k);
    } else {
        support = reference.ks;
    }
    return Space(support, reference.T, opts.quadrature_nodes, sym.enforce_S2, opts, p);
}

}  // namespace

std::vector<double> pack_loop(const LoopPath& loop, const SymmetryClass& sym,
                              const MinimizeOptions& opts, const Params& p) {
    return make_space(loop, sym, opts, p).pack(loop);
}

double packed_action(const std::vector<double>& x, const LoopPath& reference,
                     const SymmetryClass& sym, const MinimizeOptions& opts, const Params& p,
                     std::vector<double>* gradient) {
    Space sp = make_space(reference, sym, opts, p);
    double f = 0;
    if (!sp.eval(x, f, gradient, nullptr)) throw CollapseToSingularity{};
    return f;
}

ThirdLawReport third_law_check(const LoopPath& loop, const std::vector<double>& lambdas,
                               const Params& p) {
    ThirdLawReport rep;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double lam : lambdas) {
        const LoopPath dl = dilate_loop(loop, lam);
        ThirdLawRow row;
        row.lambda = lam;
        row.T = dl.T;
        row.a = loop_sup_rho(dl, 1024);
        const double a2 = row.a * row.a;
        row.ratio = (dl.T * dl.T) / (a2 * a2);
        row.el_residual = certify_loop(dl, p, 4096).el_residual_sup;
        lo = std::min(lo, row.ratio);
        hi = std::max(hi, row.ratio);
        rep.rows.push_back(row);
    }
    rep.ratio_spread = rep.rows.empty() ? 0.0 : hi - lo;
    return rep;
}

}  // namespace hk
