#include "hk/loop.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hk/geometry.hpp"

namespace hk {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int index_of(const LoopPath& loop, int k) {
    const auto it = std::lower_bound(loop.ks.begin(), loop.ks.end(), k);
    if (it == loop.ks.end() || *it != k) return -1;
    return static_cast<int>(it - loop.ks.begin());
}

double omega_of(const LoopPath& loop) {
    if (!(loop.T > 0.0)) throw std::invalid_argument("loop period must be positive");
    return kTwoPi / loop.T;
}

}  // namespace

std::vector<int> s1_mode_indices(int n_modes) {
    std::vector<int> ks;
    for (int k = -n_modes; k <= n_modes; ++k)
        if (((k % 3) + 3) % 3 == 1) ks.push_back(k);
    return ks;
}

std::vector<int> full_mode_indices(int n_modes) {
    std::vector<int> ks;
    for (int k = -n_modes; k <= n_modes; ++k) ks.push_back(k);
    return ks;
}

LoopPath project_s1(const LoopPath& loop) {
    LoopPath out = loop;
    for (size_t i = 0; i < out.ks.size(); ++i)
        if (((out.ks[i] % 3) + 3) % 3 != 1) out.c[i] = 0.0;
    return out;
}

std::array<std::array<double, 3>, 3> rotation_2pi3() {
    const double c = -0.5, s = std::sqrt(3.0) / 2.0;
    return {{{c, -s, 0.0}, {s, c, 0.0}, {0.0, 0.0, 1.0}}};
}

std::complex<double> loop_wmode(const LoopPath& loop, int m) {
    const double omega = omega_of(loop);
    std::complex<double> acc = 0.0;
    for (size_t i = 0; i < loop.ks.size(); ++i) {
        const int k = loop.ks[i];
        const int j = index_of(loop, k + m);
        if (j < 0) continue;
        acc += (2.0 * k + m) * std::conj(loop.c[i]) * loop.c[static_cast<size_t>(j)];
    }
    return 0.25 * omega * acc;
}

double closure_defect(const LoopPath& loop) { return loop_wmode(loop, 0).real(); }

std::vector<int> even_wmode_indices(const LoopPath& loop) {
    std::vector<int> out;
    if (loop.ks.empty()) return out;
    const int mmax = loop.ks.back() - loop.ks.front();
    for (int m = 2; m <= mmax; m += 2) {
        bool representable = false;
        for (int k : loop.ks)
            if (index_of(loop, k + m) >= 0) {
                representable = true;
                break;
            }
        if (representable) out.push_back(m);
    }
    return out;
}

double ZSeries::operator()(double t) const {
    double z = zbar_;
    for (const auto& [m, v] : terms_) {
        const double ph = omega_ * m * t;
        // stored v = w_m / (i m omega) for m > 0; the conjugate pair is folded in
        z += 2.0 * (v.real() * std::cos(ph) - v.imag() * std::sin(ph));
    }
    return z;
}

double ZSeries::deriv(double t) const {
    double dz = 0.0;
    for (const auto& [m, v] : terms_) {
        const double ph = omega_ * m * t;
        const std::complex<double> w = v * std::complex<double>(0.0, m * omega_);
        dz += 2.0 * (w.real() * std::cos(ph) - w.imag() * std::sin(ph));
    }
    return dz;
}

ZSeries reconstruct_z(const LoopPath& loop) {
    const double omega = omega_of(loop);
    const double w0 = closure_defect(loop);
    if (std::fabs(w0) > 1e-12) throw NonClosingZ{};
    std::vector<std::pair<int, std::complex<double>>> terms;
    const int mmax = loop.ks.empty() ? 0 : loop.ks.back() - loop.ks.front();
    for (int m = 1; m <= mmax; ++m) {
        const std::complex<double> wm = loop_wmode(loop, m);
        if (wm == 0.0) continue;
        terms.emplace_back(m, wm / std::complex<double>(0.0, m * omega));
    }
    return ZSeries(loop.z0, omega, std::move(terms));
}

LoopEvaluator::LoopEvaluator(const LoopPath& loop) : loop_(loop), z_(reconstruct_z(loop)) {}

LoopPoint LoopEvaluator::operator()(double t) const {
    const double omega = kTwoPi / loop_.T;
    std::complex<double> zeta = 0.0, dzeta = 0.0, ddzeta = 0.0;
    for (size_t i = 0; i < loop_.ks.size(); ++i) {
        const double kw = loop_.ks[i] * omega;
        const std::complex<double> e = std::polar(1.0, kw * t) * loop_.c[i];
        zeta += e;
        dzeta += std::complex<double>(0.0, kw) * e;
        ddzeta += -kw * kw * e;
    }
    LoopPoint pt;
    pt.x = zeta.real();
    pt.y = zeta.imag();
    pt.z = z_(t);
    pt.dx = dzeta.real();
    pt.dy = dzeta.imag();
    pt.dz = z_.deriv(t);
    pt.ddx = ddzeta.real();
    pt.ddy = ddzeta.imag();
    return pt;
}

LoopSamples sample_loop(const LoopPath& loop, int M) {
    LoopEvaluator ev(loop);
    LoopSamples s;
    s.t.resize(static_cast<size_t>(M));
    s.x.resize(static_cast<size_t>(M));
    s.y.resize(static_cast<size_t>(M));
    s.z.resize(static_cast<size_t>(M));
    s.dx.resize(static_cast<size_t>(M));
    s.dy.resize(static_cast<size_t>(M));
    s.dz.resize(static_cast<size_t>(M));
    s.ddx.resize(static_cast<size_t>(M));
    s.ddy.resize(static_cast<size_t>(M));
    const double dt = loop.T / M;
    for (int j = 0; j < M; ++j) {
        const double t = dt * j;
        const LoopPoint pt = ev(t);
        const auto u = static_cast<size_t>(j);
        s.t[u] = t;
        s.x[u] = pt.x;
        s.y[u] = pt.y;
        s.z[u] = pt.z;
        s.dx[u] = pt.dx;
        s.dy[u] = pt.dy;
        s.dz[u] = pt.dz;
        s.ddx[u] = pt.ddx;
        s.ddy[u] = pt.ddy;
    }
    return s;
}

double loop_sup_rho(const LoopPath& loop, int M) {
    const LoopSamples s = sample_loop(loop, M);
    double sup = 0.0;
    for (size_t j = 0; j < s.t.size(); ++j)
        sup = std::max(sup, rho({s.x[j], s.y[j], s.z[j]}));
    return sup;
}

double action(const LoopPath& loop, const Params& p, int quadrature_nodes) {
    // Kinetic term in closed form: int |zeta'|^2/2 dt = (2 pi^2 / T) sum k^2 |c_k|^2.
    double kin = 0.0;
    for (size_t i = 0; i < loop.ks.size(); ++i)
        kin += static_cast<double>(loop.ks[i]) * loop.ks[i] * std::norm(loop.c[i]);
    kin *= 2.0 * std::numbers::pi * std::numbers::pi / loop.T;

    const LoopSamples s = sample_loop(loop, quadrature_nodes);
    double pot = 0.0;
    for (size_t j = 0; j < s.t.size(); ++j) pot += potential({s.x[j], s.y[j], s.z[j]}, p);
    pot *= loop.T / quadrature_nodes;
    return kin + pot;
}

LoopPath dilate_loop(const LoopPath& loop, double lambda) {
    if (!(lambda > 0.0)) throw NonPositiveLambda{};
    LoopPath out = loop;
    out.T = lambda * lambda * loop.T;
    out.z0 = lambda * lambda * loop.z0;
    for (auto& ck : out.c) ck *= lambda;
    return out;
}

LoopPath deltoid_seed(int n_modes, double size, double T) {
    if (n_modes < 2) throw std::invalid_argument("deltoid seed needs n_modes >= 2");
    LoopPath loop;
    loop.T = T > 0.0 ? T : kTwoPi;
    loop.ks = s1_mode_indices(n_modes);
    loop.c.assign(loop.ks.size(), 0.0);
    // Amplitude ratio 1/sqrt(2) makes w_0 = (omega/2)(|c_1|^2 - 2 |c_-2|^2)
    // vanish identically, so the seed closes without projection.
    const int i1 = index_of(loop, 1), i2 = index_of(loop, -2);
    loop.c[static_cast<size_t>(i1)] = size;
    loop.c[static_cast<size_t>(i2)] = size / std::sqrt(2.0);
    return loop;
}

}  // namespace hk
