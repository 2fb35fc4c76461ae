#include "hk/integrate.hpp"

#include <algorithm>
#include <cmath>

#include "hk/coords.hpp"
#include "hk/geometry.hpp"
#include "hk/linalg.hpp"

namespace hk {

const char* to_string(RunStatus st) {
    switch (st) {
        case RunStatus::completed: return "completed";
        case RunStatus::collision: return "collision";
        case RunStatus::newton_divergence: return "newton_divergence";
        case RunStatus::step_underflow: return "step_underflow";
    }
    return "unknown";
}

PhaseState step_implicit_midpoint(const PhaseState& s, double dt, const Params& p,
                                  int max_iters, double tol) {
    if (dt == 0.0) return s;
    const Vec6 s0 = s.flat();

    // Predictor: explicit half step lands close enough that Newton converges
    // in a handful of iterations at sane dt.
    Vec6 m = s0;
    {
        const Vec6 f = vector_field(s, p);
        for (int i = 0; i < 6; ++i) m[i] += 0.5 * dt * f[i];
    }

    for (int it = 0; it < max_iters; ++it) {
        const PhaseState ms = PhaseState::from_flat(m);
        const Vec6 f = vector_field(ms, p);
        Vec6 F;
        for (int i = 0; i < 6; ++i) F[i] = m[i] - s0[i] - 0.5 * dt * f[i];

        Mat6 JF = vector_field_jacobian(ms, p);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) JF[i][j] = (i == j ? 1.0 : 0.0) - 0.5 * dt * JF[i][j];

        Vec6 delta = F;
        double norm = 0.0;
        if (lu_solve6(JF, delta)) {
            for (int i = 0; i < 6; ++i) {
                m[i] -= delta[i];
                norm = std::max(norm, std::fabs(delta[i]));
            }
        } else {
            // Singular linearization: fall back to one fixed-point sweep.
            for (int i = 0; i < 6; ++i) {
                const double next = s0[i] + 0.5 * dt * f[i];
                norm = std::max(norm, std::fabs(next - m[i]));
                m[i] = next;
            }
        }
        if (norm <= tol) {
            Vec6 out;
            for (int i = 0; i < 6; ++i) out[i] = 2.0 * m[i] - s0[i];
            return PhaseState::from_flat(out);
        }
    }
    throw NewtonDivergence{};
}

namespace {

Sample make_sample(double t, const PhaseState& s, const Params& p, double H0, double J0) {
    Sample out;
    out.t = t;
    out.s = s;
    out.H = hamiltonian(s, p);
    out.ptheta = angular_momentum(s);
    out.J = dilation_moment(s);
    out.Jres = out.J - J0 - 2.0 * H0 * t;
    return out;
}

// Dormand-Prince 5(4) pair.
struct RkStage {
    Vec6 k[7];
};

Vec6 rk_combine(const Vec6& y, const RkStage& st, const double* w, double h) {
    Vec6 out = y;
    for (int i = 0; i < 6; ++i) {
        double acc = 0.0;
        for (int j = 0; j < 7; ++j) acc += w[j] * st.k[j][i];
        out[i] += h * acc;
    }
    return out;
}

}  // namespace

Trajectory integrate(const PhaseState& s0, double t_final, const IntegratorSpec& spec,
                     const Params& p) {
    Trajectory traj;
    const double H0 = hamiltonian(s0, p);
    const double J0 = dilation_moment(s0);
    traj.samples.push_back(make_sample(0.0, s0, p, H0, J0));
    if (t_final <= 0.0) return traj;
    if (rho(s0.q) < spec.collision_floor) {
        traj.status = RunStatus::collision;
        return traj;
    }

    if (spec.method == Method::implicit_midpoint) {
        PhaseState s = s0;
        const double dt = spec.step;
        const long nfull = static_cast<long>(std::floor(t_final / dt + 1e-9));
        const double rem = t_final - static_cast<double>(nfull) * dt;
        for (long k = 0; k < nfull + 1; ++k) {
            const bool last = (k == nfull);
            const double h = last ? rem : dt;
            if (last && h <= 1e-12 * dt) break;
            try {
                s = step_implicit_midpoint(s, h, p, spec.max_newton_iters, spec.newton_tol);
            } catch (const NewtonDivergence&) {
                traj.status = RunStatus::newton_divergence;
                return traj;
            } catch (const SingularOrigin&) {
                traj.status = RunStatus::collision;
                return traj;
            }
            const double t = last ? t_final : static_cast<double>(k + 1) * dt;
            traj.samples.push_back(make_sample(t, s, p, H0, J0));
            if (rho(s.q) < spec.collision_floor) {
                traj.status = RunStatus::collision;
                return traj;
            }
        }
        return traj;
    }

    // Adaptive Dormand-Prince 5(4). The field is autonomous, so only the
    // a-coefficients matter.
    static const double a[7][6] = {
        {},
        {1.0 / 5},
        {3.0 / 40, 9.0 / 40},
        {44.0 / 45, -56.0 / 15, 32.0 / 9},
        {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
        {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
        {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
    static const double b5[7] = {35.0 / 384,     0.0,         500.0 / 1113, 125.0 / 192,
                                 -2187.0 / 6784, 11.0 / 84,   0.0};
    static const double b4[7] = {5179.0 / 57600,    0.0,          7571.0 / 16695, 393.0 / 640,
                                 -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

    PhaseState s = s0;
    double t = 0.0;
    double h = std::min(spec.step, t_final);
    const double hmin = 1e-12 * std::max(1.0, t_final);
    while (t < t_final) {
        h = std::min(h, t_final - t);
        if (h < hmin) {
            traj.status = RunStatus::step_underflow;
            return traj;
        }
        RkStage st;
        bool singular = false;
        const Vec6 y = s.flat();
        try {
            st.k[0] = vector_field(s, p);
            for (int i = 1; i < 7; ++i) {
                Vec6 yi = y;
                for (int d = 0; d < 6; ++d) {
                    double acc = 0.0;
                    for (int j = 0; j < i; ++j) acc += a[i][j] * st.k[j][d];
                    yi[d] += h * acc;
                }
                st.k[i] = vector_field(PhaseState::from_flat(yi), p);
            }
        } catch (const SingularOrigin&) {
            singular = true;
        }
        if (singular) {
            h *= 0.5;
            continue;
        }
        const Vec6 y5 = rk_combine(y, st, b5, h);
        const Vec6 y4 = rk_combine(y, st, b4, h);
        double err = 0.0;
        for (int i = 0; i < 6; ++i) {
            const double scale =
                spec.tolerance * (1.0 + std::max(std::fabs(y[i]), std::fabs(y5[i])));
            err = std::max(err, std::fabs(y5[i] - y4[i]) / scale);
        }
        if (err <= 1.0) {
            t += h;
            s = PhaseState::from_flat(y5);
            traj.samples.push_back(make_sample(t, s, p, H0, J0));
            if (rho(s.q) < spec.collision_floor) {
                traj.status = RunStatus::collision;
                return traj;
            }
        }
        const double f = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
        h *= std::clamp(f, 0.2, 5.0);
    }
    return traj;
}

EquivarianceReport check_dilation_equivariance(const PhaseState& s0, double lambda,
                                               double t_final, const IntegratorSpec& spec,
                                               const Params& p) {
    if (!(lambda > 0.0)) throw NonPositiveLambda{};
    IntegratorSpec base_spec = spec;
    base_spec.step = spec.step / (lambda * lambda);
    // The integrator commutes with dilation when steps scale by lambda^2, so
    // any deviation seen here is pure arithmetic noise.
    const Trajectory base = integrate(s0, t_final / (lambda * lambda), base_spec, p);
    const Trajectory dil = integrate(dilate(s0, lambda), t_final, spec, p);

    EquivarianceReport rep;
    rep.base_status = base.status;
    rep.dilated_status = dil.status;
    const size_t n = std::min(base.samples.size(), dil.samples.size());
    const double il2 = 1.0 / (lambda * lambda);
    for (size_t k = 0; k < n; ++k) {
        const Vec6 a6 = dilate(base.samples[k].s, lambda).flat();
        const Vec6 b6 = dil.samples[k].s.flat();
        for (int i = 0; i < 6; ++i)
            rep.max_state_deviation = std::max(rep.max_state_deviation, std::fabs(a6[i] - b6[i]));
        rep.energy_scale_error =
            std::max(rep.energy_scale_error, std::fabs(dil.samples[k].H - il2 * base.samples[k].H));
    }
    return rep;
}

std::vector<ReducedState> reduced_projection(const Trajectory& traj) {
    std::vector<ReducedState> out;
    out.reserve(traj.samples.size());
    for (const auto& smp : traj.samples) out.push_back(to_reduced(smp.s));
    return out;
}

}  // namespace hk
