// hklab: command-line laboratory for the sub-Riemannian Kepler problem and
// its lattice cousins. Subcommands wrap the library modules one-to-one;
// every run prints a JSON summary on stdout and, when --out is given, writes
// CSV/SVG artifacts plus a manifest.json echoing the resolved configuration.
// Outputs carry no timestamps, so a rerun with the same flags diffs clean.
//
// Exit codes: 0 success, 1 numerical failure (error JSON on stdout),
// 2 usage error.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hk/brackets.hpp"
#include "hk/coords.hpp"
#include "hk/exact.hpp"
#include "hk/geometry.hpp"
#include "hk/green.hpp"
#include "hk/integrate.hpp"
#include "hk/io.hpp"
#include "hk/loop.hpp"
#include "hk/paths.hpp"
#include "hk/search.hpp"
#include "hk/types.hpp"
#include "hk/zkepler.hpp"

namespace {

using nlohmann::json;

// ---------------------------------------------------------------- parsing

hk::PhaseState parse_state(const std::string& text) {
    std::array<double, 6> a{};
    std::stringstream ss(text);
    std::string tok;
    size_t i = 0;
    while (std::getline(ss, tok, ',')) {
        if (i >= 6) throw CLI::ValidationError("--state", "expected 6 comma-separated numbers");
        size_t pos = 0;
        a[i++] = std::stod(tok, &pos);
        if (pos != tok.size())
            throw CLI::ValidationError("--state", "bad number '" + tok + "'");
    }
    if (i != 6) throw CLI::ValidationError("--state", "expected 6 comma-separated numbers");
    return hk::PhaseState::from_flat(a);
}

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        size_t pos = 0;
        out.push_back(std::stod(tok, &pos));
        if (pos != tok.size()) throw CLI::ValidationError(flag, "bad number '" + tok + "'");
    }
    if (out.empty()) throw CLI::ValidationError(flag, "empty list");
    return out;
}

hk::GridPoint parse_point(const std::string& text, const std::string& flag) {
    const auto v = parse_list(text, flag);
    if (v.size() != 2 || v[0] != std::floor(v[0]) || v[1] != std::floor(v[1]))
        throw CLI::ValidationError(flag, "expected two integers 'n,m'");
    return {static_cast<long long>(v[0]), static_cast<long long>(v[1])};
}

// ------------------------------------------------------------- summaries

json state_json(const hk::PhaseState& s) {
    const auto a = s.flat();
    return json(std::vector<double>(a.begin(), a.end()));
}

json trajectory_summary(const hk::Trajectory& tr) {
    double dh = 0.0, dpt = 0.0, jres = 0.0;
    const auto& first = tr.samples.front();
    for (const auto& smp : tr.samples) {
        dh = std::max(dh, std::fabs(smp.H - first.H));
        dpt = std::max(dpt, std::fabs(smp.ptheta - first.ptheta));
        jres = std::max(jres, std::fabs(smp.Jres));
    }
    const auto& last = tr.samples.back();
    return json{{"status", hk::to_string(tr.status)},
                {"samples", tr.samples.size()},
                {"t_end", last.t},
                {"H0", first.H},
                {"max_abs_dH", dh},
                {"max_abs_dptheta", dpt},
                {"max_abs_Jres", jres},
                {"final_state", state_json(last.s)}};
}

json certificate_json(const hk::OrbitCertificate& c) {
    return json{{"action", c.action},
                {"grad_norm", c.grad_norm},
                {"el_residual_sup", c.el_residual_sup},
                {"sup_abs_H", c.sup_abs_H},
                {"min_rho", c.min_rho},
                {"multiplier_drift", c.multiplier_drift},
                {"multiplier_base", c.multiplier_base}};
}

// --------------------------------------------------------------- outputs

struct OutDir {
    std::optional<std::filesystem::path> dir;

    explicit OutDir(const std::string& path) {
        if (path.empty()) return;
        dir = std::filesystem::path(path);
        std::filesystem::create_directories(*dir);
    }
    explicit operator bool() const { return dir.has_value(); }
    std::string file(const std::string& name) const { return (*dir / name).string(); }
};

void write_manifest(const OutDir& out, const json& cfg) {
    if (out) hk::write_text_file(out.file("manifest.json"), cfg.dump(2) + "\n");
}

void emit(const json& summary) { std::cout << summary.dump(2) << "\n"; }

hk::SvgSeries series_of(std::vector<double> xs, std::vector<double> ys,
                        const std::string& color = "#2c5f8a") {
    hk::SvgSeries s;
    s.xs = std::move(xs);
    s.ys = std::move(ys);
    s.color = color;
    return s;
}

void write_trajectory_svgs(const OutDir& out, const hk::Trajectory& tr) {
    std::vector<double> xs, ys, ts, zs;
    for (const auto& smp : tr.samples) {
        xs.push_back(smp.s.q.x);
        ys.push_back(smp.s.q.y);
        ts.push_back(smp.t);
        zs.push_back(smp.s.q.z);
    }
    hk::write_svg_plot(out.file("xy.svg"), {series_of(xs, ys)}, "planar projection", "x", "y");
    hk::write_svg_plot(out.file("z_t.svg"), {series_of(ts, zs, "#8a2c2c")}, "height", "t", "z");
}

// ------------------------------------------------------------ exceptions

const char* error_name(const std::exception& e) {
    if (dynamic_cast<const hk::SingularOrigin*>(&e)) return "singular_origin";
    if (dynamic_cast<const hk::AxisSingular*>(&e)) return "axis_singular";
    if (dynamic_cast<const hk::DomainExceeded*>(&e)) return "domain_exceeded";
    if (dynamic_cast<const hk::NewtonDivergence*>(&e)) return "newton_divergence";
    if (dynamic_cast<const hk::StepUnderflow*>(&e)) return "step_underflow";
    if (dynamic_cast<const hk::CollisionEvent*>(&e)) return "collision";
    if (dynamic_cast<const hk::NonClosingZ*>(&e)) return "non_closing_z";
    if (dynamic_cast<const hk::MaxIterations*>(&e)) return "max_iterations";
    if (dynamic_cast<const hk::CollapseToSingularity*>(&e)) return "collapse_to_singularity";
    if (dynamic_cast<const hk::RadiusExceeded*>(&e)) return "radius_exceeded";
    if (dynamic_cast<const hk::NoRecurrence*>(&e)) return "no_recurrence";
    if (dynamic_cast<const hk::Infeasible*>(&e)) return "infeasible";
    if (dynamic_cast<const hk::QuadratureNonconvergence*>(&e)) return "quadrature_nonconvergence";
    return "error";
}

int fail(const std::exception& e) {
    emit(json{{"error", {{"type", error_name(e)}, {"message", e.what()}}}});
    return 1;
}

// ------------------------------------------------------------- commands

struct SimulateCfg {
    std::string state, method = "implicit-midpoint", out;
    double alpha = 2.0 / std::numbers::pi, dt = 1e-3, t_final = 10.0, tolerance = 1e-10;
};

int cmd_simulate(const SimulateCfg& cfg) {
    const hk::Params p{cfg.alpha};
    const hk::PhaseState s0 = parse_state(cfg.state);
    hk::IntegratorSpec spec;
    spec.method = cfg.method == "adaptive-rk" ? hk::Method::adaptive_rk
                                              : hk::Method::implicit_midpoint;
    spec.step = cfg.dt;
    spec.tolerance = cfg.tolerance;
    const hk::Trajectory tr = hk::integrate(s0, cfg.t_final, spec, p);

    OutDir out(cfg.out);
    if (out) {
        hk::write_trajectory_csv(out.file("trajectory.csv"), tr);
        write_trajectory_svgs(out, tr);
        write_manifest(out, json{{"command", "simulate"},
                                 {"alpha", cfg.alpha},
                                 {"state", cfg.state},
                                 {"dt", cfg.dt},
                                 {"t_final", cfg.t_final},
                                 {"method", cfg.method},
                                 {"tolerance", cfg.tolerance}});
    }
    json summary = trajectory_summary(tr);
    summary["command"] = "simulate";
    emit(summary);
    return tr.status == hk::RunStatus::completed ? 0 : 1;
}

struct ReduceCfg {
    std::string state, out;
    double alpha = 2.0 / std::numbers::pi, J = 3.0, ptheta = 1.0, v0 = 0.0;
    // the reduced residual magnifies step error by 1/U; the default step is
    // kept small enough that the figure-parameter runs stay under 1e-6
    double dt = 2.5e-4, t_final = 10.0;
    int branch = +1;
};

int cmd_reduce(const ReduceCfg& cfg) {
    const hk::Params p{cfg.alpha};
    hk::PhaseState s0;
    double v_used = cfg.v0;
    if (!cfg.state.empty()) {
        s0 = parse_state(cfg.state);
    } else {
        // large |J| needs nonzero height ratio before a zero-energy state
        // exists on the r = 1 section; walk v outward until one does
        auto st = hk::zero_energy_state(cfg.J, cfg.ptheta, cfg.v0, p, cfg.branch);
        for (int k = 1; !st && k <= 64; ++k) {
            for (const double sgn : {+1.0, -1.0}) {
                v_used = cfg.v0 + sgn * 0.25 * k;
                st = hk::zero_energy_state(cfg.J, cfg.ptheta, v_used, p, cfg.branch);
                if (st) break;
            }
        }
        if (!st)
            throw CLI::ValidationError(
                "--J/--ptheta/--v0", "no zero-energy state carries these invariant labels");
        s0 = *st;
    }
    hk::IntegratorSpec spec;
    spec.step = cfg.dt;
    const hk::Trajectory tr = hk::integrate(s0, cfg.t_final, spec, p);
    const auto reduced = hk::reduced_projection(tr);

    double max_res = 0.0, dJ = 0.0, dpt = 0.0;
    for (const auto& r : reduced) {
        max_res = std::max(max_res, std::fabs(hk::htilde(r, p) - 1.0));
        dJ = std::max(dJ, std::fabs(r.J - reduced.front().J));
        dpt = std::max(dpt, std::fabs(r.ptheta - reduced.front().ptheta));
    }

    OutDir out(cfg.out);
    if (out) {
        hk::write_reduced_csv(out.file("reduced.csv"), tr, p);
        std::vector<double> vs, pvs;
        for (const auto& r : reduced) {
            vs.push_back(r.v);
            pvs.push_back(r.pv);
        }
        hk::write_svg_plot(out.file("v_pv.svg"), {series_of(vs, pvs)}, "reduced curve", "v",
                           "p_v");
        write_manifest(out, json{{"command", "reduce"},
                                 {"alpha", cfg.alpha},
                                 {"state", cfg.state},
                                 {"J", cfg.J},
                                 {"ptheta", cfg.ptheta},
                                 {"v0", cfg.v0},
                                 {"v0_used", v_used},
                                 {"branch", cfg.branch},
                                 {"dt", cfg.dt},
                                 {"t_final", cfg.t_final}});
    }
    emit(json{{"command", "reduce"},
              {"status", hk::to_string(tr.status)},
              {"samples", reduced.size()},
              {"v0_used", v_used},
              {"J", reduced.front().J},
              {"ptheta", reduced.front().ptheta},
              {"H0", tr.samples.front().H},
              {"max_abs_htilde_residual", max_res},
              {"max_abs_dJ", dJ},
              {"max_abs_dptheta", dpt}});
    return tr.status == hk::RunStatus::completed ? 0 : 1;
}

struct FindOrbitCfg {
    std::string out;
    double alpha = 2.0 / std::numbers::pi, gtol = 1e-8, size = 1.0, jitter = 0.1;
    int modes = 12, grid = 512, cert_grid = 4096, restarts = 1, max_iters = 20000;
    unsigned long long seed = 0;
    bool no_s1 = false, no_s2 = false;
};

hk::LoopPath jittered_seed(const FindOrbitCfg& cfg, std::mt19937_64& rng, bool first) {
    hk::LoopPath seed = hk::deltoid_seed(cfg.modes, cfg.size);
    if (first) return seed;  // restart 0 is always the unperturbed seed
    std::uniform_real_distribution<double> u(-cfg.jitter, cfg.jitter);
    for (auto& c : seed.c)
        c *= std::complex<double>(1.0 + u(rng), u(rng));
    return seed;
}

int cmd_find_orbit(const FindOrbitCfg& cfg) {
    const hk::Params p{cfg.alpha};
    hk::SymmetryClass sym;
    sym.enforce_S1 = !cfg.no_s1;
    sym.enforce_S2 = !cfg.no_s2;
    hk::MinimizeOptions opts;
    opts.gtol = cfg.gtol;
    opts.max_iters = cfg.max_iters;
    opts.quadrature_nodes = cfg.grid;
    opts.certificate_nodes = cfg.cert_grid;

    std::mt19937_64 rng(cfg.seed);
    std::optional<hk::MinimizeResult> best;
    int best_restart = -1;
    std::string last_error = "no restart attempted";
    for (int r = 0; r < std::max(1, cfg.restarts); ++r) {
        const hk::LoopPath seed = jittered_seed(cfg, rng, r == 0);
        try {
            hk::MinimizeResult res = hk::minimize_action(seed, sym, opts, p);
            if (!best || res.certificate.action < best->certificate.action) {
                best = std::move(res);
                best_restart = r;
            }
        } catch (const std::exception& e) {
            last_error = e.what();
        }
    }
    if (!best) throw hk::MaxIterations{};  // every restart failed; details in last_error

    OutDir out(cfg.out);
    if (out) {
        hk::save_loop(out.file("orbit.txt"), best->loop, &best->certificate);
        const auto smp = hk::sample_loop(best->loop, 1024);
        hk::write_svg_plot(out.file("orbit_xy.svg"), {series_of(smp.x, smp.y)}, "orbit", "x",
                           "y");
        hk::write_svg_plot(out.file("orbit_z.svg"), {series_of(smp.t, smp.z, "#8a2c2c")},
                           "orbit height", "t", "z");
        write_manifest(out, json{{"command", "find-orbit"},
                                 {"alpha", cfg.alpha},
                                 {"modes", cfg.modes},
                                 {"gtol", cfg.gtol},
                                 {"grid", cfg.grid},
                                 {"cert_grid", cfg.cert_grid},
                                 {"size", cfg.size},
                                 {"restarts", cfg.restarts},
                                 {"jitter", cfg.jitter},
                                 {"seed", cfg.seed},
                                 {"enforce_s1", sym.enforce_S1},
                                 {"enforce_s2", sym.enforce_S2}});
    }
    json summary{{"command", "find-orbit"},
                 {"iterations", best->iterations},
                 {"restart_used", best_restart},
                 {"modes", cfg.modes},
                 {"certificate", certificate_json(best->certificate)}};
    if (cfg.restarts > 1) summary["last_restart_error"] = last_error;
    emit(summary);
    return 0;
}

struct ThirdLawCfg {
    std::string lambdas = "0.5,1,2,4", out;
    double alpha = 2.0 / std::numbers::pi, gtol = 1e-8;
    int modes = 12, grid = 512, cert_grid = 4096;
};

int cmd_third_law(const ThirdLawCfg& cfg) {
    const hk::Params p{cfg.alpha};
    const auto lambdas = parse_list(cfg.lambdas, "--lambda-list");
    hk::MinimizeOptions opts;
    opts.gtol = cfg.gtol;
    opts.quadrature_nodes = cfg.grid;
    opts.certificate_nodes = cfg.cert_grid;
    const auto res = hk::minimize_action(hk::deltoid_seed(cfg.modes), {}, opts, p);
    const auto report = hk::third_law_check(res.loop, lambdas, p);

    json rows = json::array();
    std::string csv = "lambda,T,a,ratio,el_residual\n";
    for (const auto& row : report.rows) {
        rows.push_back(json{{"lambda", row.lambda},
                            {"T", row.T},
                            {"a", row.a},
                            {"ratio", row.ratio},
                            {"el_residual", row.el_residual}});
        csv += hk::format_g17(row.lambda) + "," + hk::format_g17(row.T) + "," +
               hk::format_g17(row.a) + "," + hk::format_g17(row.ratio) + "," +
               hk::format_g17(row.el_residual) + "\n";
    }
    OutDir out(cfg.out);
    if (out) {
        hk::write_text_file(out.file("third_law.csv"), csv);
        write_manifest(out, json{{"command", "third-law"},
                                 {"alpha", cfg.alpha},
                                 {"lambda_list", cfg.lambdas},
                                 {"modes", cfg.modes},
                                 {"gtol", cfg.gtol},
                                 {"grid", cfg.grid},
                                 {"cert_grid", cfg.cert_grid}});
    }
    emit(json{{"command", "third-law"},
              {"rows", rows},
              {"ratio_spread", report.ratio_spread},
              {"orbit_action", res.certificate.action}});
    return 0;
}

struct OraclesCfg {
    std::string out;
    double alpha = 2.0 / std::numbers::pi;
};

// Residual of a closed-form solution family against the Hamiltonian vector
// field, measured on a grid with a 5-point finite-difference time derivative
// (error O(h^4), far below the gates for these O(1) curves). Families with a
// power-law scale in t (the zero-energy ray) need the step scaled with t or
// the t^{-11/2} fifth derivative eats the budget near the left endpoint.
template <class Curve>
double field_residual(const Curve& curve, const hk::Params& p, double t0, double t1, int n,
                      bool scale_step_with_t = false) {
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = t0 + (t1 - t0) * i / (n - 1);
        const double h = scale_step_with_t ? 1e-3 * t : 1e-3;
        const auto fd = [&](int k) { return curve(t + k * h).flat(); };
        const auto m2 = fd(-2), m1 = fd(-1), p1 = fd(+1), p2 = fd(+2);
        const auto f = hk::vector_field(curve(t), p);
        for (int j = 0; j < 6; ++j) {
            const double dot = (m2[j] - 8.0 * m1[j] + 8.0 * p1[j] - p2[j]) / (12.0 * h);
            worst = std::max(worst, std::fabs(dot - f[j]));
        }
    }
    return worst;
}

int cmd_oracles(const OraclesCfg& cfg) {
    const hk::Params p{cfg.alpha};
    json checks = json::array();
    bool all_pass = true;
    const auto add = [&](const std::string& name, double value, double bound) {
        const bool pass = value <= bound;
        all_pass = all_pass && pass;
        checks.push_back(
            json{{"check", name}, {"value", value}, {"bound", bound}, {"pass", pass}});
    };

    add("line_solution_field_residual",
        field_residual([&](double t) { return hk::line_solution(1.0, 0.7, t, p); }, p, 0.1,
                       10.0, 101, true),
        1e-10);
    add("stationary_solution_field_residual",
        field_residual([&](double t) { return hk::stationary_solution(1.3, t, p); }, p, 0.0,
                       1.0, 101),
        1e-10);
    const hk::PhaseState helix0{{1.0, 0.0, 0.0}, 0.0, 1.0, 0.5};
    add("geodesic_field_residual",
        field_residual([&](double t) { return hk::geodesic(helix0, t); }, hk::Params{0.0},
                       0.0, 5.0, 101),
        1e-10);

    // conic relation r^2 = 2 h t^2 - alpha/h (r^2 = sqrt(8 alpha) t at h=0)
    // checked against the integrated flow started on the relation.
    for (const double h : {-1.0, 0.0, 1.0}) {
        const hk::ConicSpec spec{h, p.alpha};
        // valid windows: ellipse collides at t = sqrt(alpha/2), hyperbola
        // leaves the collision at t = sqrt(alpha/(2h))
        const double t0 = h < 0.0 ? 0.1 : (h == 0.0 ? 0.5 : 1.0);
        const double t1 = h < 0.0 ? 0.8 * std::sqrt(p.alpha / 2.0) : (h == 0.0 ? 2.0 : 3.0);
        const hk::PhaseState s0 = hk::conic_state_on_N(spec, t0);
        hk::IntegratorSpec ispec;
        ispec.step = 2e-4;  // the gate is on the flow itself; keep step error far below it
        const auto tr = hk::integrate(s0, t1 - t0, ispec, p);
        double worst = 0.0;
        for (const auto& smp : tr.samples) {
            const double r2 = smp.s.q.x * smp.s.q.x + smp.s.q.y * smp.s.q.y;
            const double t = t0 + smp.t;
            const double want = h == 0.0 ? std::sqrt(8.0 * p.alpha) * t
                                         : 2.0 * h * t * t - p.alpha / h;
            worst = std::max(worst, std::fabs(r2 - want));
        }
        add("conic_relation_h=" + hk::format_g17(h), worst, 1e-6);
    }

    // dilation equivariance of the integrated flow
    const hk::PhaseState gen{{1.1, 0.0, 0.2}, 0.1, 0.9, 0.3};
    for (const double lam : {0.5, 2.0}) {
        hk::IntegratorSpec ispec;
        ispec.step = 1e-3;
        const auto rep = hk::check_dilation_equivariance(gen, lam, 1.0, ispec, p);
        add("dilation_state_deviation_lambda=" + hk::format_g17(lam),
            rep.max_state_deviation, 1e-6);
        add("dilation_energy_scale_lambda=" + hk::format_g17(lam), rep.energy_scale_error,
            1e-10);
    }

    OutDir out(cfg.out);
    if (out) {
        std::string csv = "check,value,bound,pass\n";
        for (const auto& c : checks)
            csv += c["check"].get<std::string>() + "," +
                   hk::format_g17(c["value"].get<double>()) + "," +
                   hk::format_g17(c["bound"].get<double>()) + "," +
                   (c["pass"].get<bool>() ? "1" : "0") + "\n";
        hk::write_text_file(out.file("oracles.csv"), csv);
        write_manifest(out, json{{"command", "oracles"}, {"alpha", cfg.alpha}});
    }
    emit(json{{"command", "oracles"}, {"all_pass", all_pass}, {"checks", checks}});
    return all_pass ? 0 : 1;
}

struct LatticeZCfg {
    std::string variant = "drift-kick", out;
    long long n0 = 0, p0 = 0, max_steps = 1000000, fundamental = 1000;
    int grid = 0;
    bool single = false;
};

int cmd_lattice_z(const LatticeZCfg& cfg) {
    const hk::ZVariant variant = cfg.variant == "explicit" ? hk::ZVariant::explicit_update
                                                           : hk::ZVariant::drift_kick;
    OutDir out(cfg.out);
    if (cfg.grid <= 0) {
        // single orbit
        const auto rep =
            hk::z_orbit({cfg.n0, cfg.p0}, cfg.max_steps, variant, static_cast<bool>(out));
        if (out) {
            hk::write_zorbit_csv(out.file("z_orbit.csv"), rep.states);
            std::vector<double> js, ns;
            for (size_t j = 0; j < rep.states.size(); ++j) {
                js.push_back(static_cast<double>(j));
                ns.push_back(static_cast<double>(rep.states[j].n));
            }
            hk::write_svg_plot(out.file("z_orbit.svg"), {series_of(js, ns)}, "lattice orbit",
                               "step", "n");
            write_manifest(out, json{{"command", "lattice-z"},
                                     {"n0", cfg.n0},
                                     {"p0", cfg.p0},
                                     {"variant", cfg.variant},
                                     {"max_steps", cfg.max_steps}});
        }
        emit(json{{"command", "lattice-z"},
                  {"n0", cfg.n0},
                  {"p0", cfg.p0},
                  {"variant", cfg.variant},
                  {"period", rep.period},
                  {"max_abs_n", rep.max_abs_n},
                  {"max_abs_p", rep.max_abs_p},
                  {"energy_min", rep.energy_min},
                  {"energy_max", rep.energy_max}});
        return 0;
    }

    // grid scan: recurrence over |n|,|p| <= grid, plus the exact discrete
    // fundamental-solution identity
    long long total = 0, recurred = 0, max_period = 0, max_extent = 0;
    std::string csv = "n0,p0,period,max_abs_n,max_abs_p\n";
    for (long long n = -cfg.grid; n <= cfg.grid; ++n) {
        for (long long q = -cfg.grid; q <= cfg.grid; ++q) {
            ++total;
            try {
                const auto rep = hk::z_orbit({n, q}, cfg.max_steps, variant, false);
                ++recurred;
                max_period = std::max(max_period, rep.period);
                max_extent = std::max({max_extent, rep.max_abs_n, rep.max_abs_p});
                csv += std::to_string(n) + "," + std::to_string(q) + "," +
                       std::to_string(rep.period) + "," + std::to_string(rep.max_abs_n) +
                       "," + std::to_string(rep.max_abs_p) + "\n";
            } catch (const hk::NoRecurrence&) {
                csv += std::to_string(n) + "," + std::to_string(q) + ",-1,-1,-1\n";
            }
        }
    }
    const auto fund = hk::z_fundamental_check(cfg.fundamental);
    if (out) {
        hk::write_text_file(out.file("z_scan.csv"), csv);
        write_manifest(out, json{{"command", "lattice-z"},
                                 {"grid", cfg.grid},
                                 {"variant", cfg.variant},
                                 {"max_steps", cfg.max_steps},
                                 {"fundamental", cfg.fundamental}});
    }
    emit(json{{"command", "lattice-z"},
              {"variant", cfg.variant},
              {"grid", cfg.grid},
              {"orbits", total},
              {"recurred", recurred},
              {"recurrence_fraction", static_cast<double>(recurred) / total},
              {"max_period", max_period},
              {"max_extent", max_extent},
              {"fundamental_checked_n", fund.n_checked},
              {"fundamental_exact", fund.exact}});
    return 0;
}

struct Green2dCfg {
    std::string out;
    int radius = 10, check_radius = -1;
};

int cmd_green2d(const Green2dCfg& cfg) {
    const hk::GreenTable table(cfg.radius);
    const int cr = cfg.check_radius < 0 ? std::min(10, cfg.radius) : cfg.check_radius;

    double cross = 0.0;
    for (int m = 0; m <= cr; ++m)
        for (int n = 0; n <= m; ++n)
            cross = std::max(cross, std::fabs(table.at(m, n) -
                                              hk::green2d(m, n, hk::GreenMethod::quadrature)));
    double stencil = 0.0;
    for (int m = -(cfg.radius - 1); m <= cfg.radius - 1; ++m)
        for (int n = -(cfg.radius - 1); n <= cfg.radius - 1; ++n) {
            const double want = (m == 0 && n == 0) ? 4.0 : 0.0;
            stencil = std::max(stencil, std::fabs(hk::laplacian2d(table, m, n) - want));
        }
    const double a11_err = std::fabs(table.at(1, 1) - 4.0 / std::numbers::pi);

    OutDir out(cfg.out);
    if (out) {
        hk::write_green_csv(out.file("green.csv"), table);
        write_manifest(out, json{{"command", "green2d"},
                                 {"radius", cfg.radius},
                                 {"check_radius", cr}});
    }
    emit(json{{"command", "green2d"},
              {"radius", cfg.radius},
              {"check_radius", cr},
              {"max_cross_method_gap", cross},
              {"max_stencil_defect", stencil},
              {"a11_error", a11_err}});
    return 0;
}

struct LatticePathCfg {
    std::string from = "0,0", to, version = "v2", out;
    long long steps = 0;
    double alpha = 0.0;  // alpha = 0 keeps the combinatorics exact
};

int cmd_lattice_path(const LatticePathCfg& cfg) {
    const hk::GridPoint v0 = parse_point(cfg.from, "--from");
    const hk::GridPoint v1 = parse_point(cfg.to, "--to");
    const hk::PathVersion version =
        cfg.version == "v1" ? hk::PathVersion::V1 : hk::PathVersion::V2;
    const auto res = hk::dp_min_action(v0, v1, cfg.steps, cfg.alpha, version);

    OutDir out(cfg.out);
    if (out) {
        hk::write_text_file(out.file("path.txt"), hk::format_dp_result(res));
        std::vector<double> xs, ys;
        for (const auto& v : res.witness.vertices) {
            xs.push_back(static_cast<double>(v[0]));
            ys.push_back(static_cast<double>(v[1]));
        }
        hk::write_svg_plot(out.file("path.svg"), {series_of(xs, ys)}, "witness path", "x",
                           "y");
        write_manifest(out, json{{"command", "lattice-path"},
                                 {"from", cfg.from},
                                 {"to", cfg.to},
                                 {"steps", cfg.steps},
                                 {"alpha", cfg.alpha},
                                 {"version", cfg.version}});
    }
    emit(json{{"command", "lattice-path"},
              {"min_action", res.min_action},
              {"count", res.count.str()},
              {"witness_vertices", res.witness.vertices.size()}});
    return 0;
}

struct HelixCfg {
    std::string state = "4,0,0,0,1.2,0.05", out;
    double alpha = 2.0 / std::numbers::pi, dt = 1e-3, t_final = 40.0, window = 5.0;
    int checkpoints = 4;
};

// Exploratory, no pass/fail: how far is the late trajectory from the free
// geodesic (helix) seeded at successive checkpoints? A decreasing sequence
// is evidence for helix asymptotics; nothing is gated on it.
int cmd_helix_demo(const HelixCfg& cfg) {
    const hk::Params p{cfg.alpha};
    const hk::PhaseState s0 = parse_state(cfg.state);
    hk::IntegratorSpec spec;
    spec.step = cfg.dt;
    const auto tr = hk::integrate(s0, cfg.t_final + cfg.window, spec, p);
    if (tr.status != hk::RunStatus::completed)
        throw hk::CollisionEvent{};  // demo needs the full window

    const auto state_at = [&](double t) {
        const size_t i = std::min(
            tr.samples.size() - 1,
            static_cast<size_t>(std::llround(t / cfg.dt)));
        return tr.samples[i];
    };
    json rows = json::array();
    std::string csv = "t,sup_gap,rho\n";
    for (int k = 1; k <= cfg.checkpoints; ++k) {
        const double t = cfg.t_final * k / cfg.checkpoints;
        const auto base = state_at(t);
        double gap = 0.0;
        for (double tau = 0.0; tau <= cfg.window; tau += 10.0 * cfg.dt) {
            const auto truth = state_at(t + tau).s;
            const auto helix = hk::geodesic(base.s, tau);
            gap = std::max({gap, std::fabs(truth.q.x - helix.q.x),
                            std::fabs(truth.q.y - helix.q.y),
                            std::fabs(truth.q.z - helix.q.z)});
        }
        rows.push_back(json{{"t", base.t}, {"sup_gap", gap}, {"rho", hk::rho(base.s.q)}});
        csv += hk::format_g17(base.t) + "," + hk::format_g17(gap) + "," +
               hk::format_g17(hk::rho(base.s.q)) + "\n";
    }
    OutDir out(cfg.out);
    if (out) {
        hk::write_text_file(out.file("helix_gaps.csv"), csv);
        write_manifest(out, json{{"command", "helix-demo"},
                                 {"alpha", cfg.alpha},
                                 {"state", cfg.state},
                                 {"dt", cfg.dt},
                                 {"t_final", cfg.t_final},
                                 {"window", cfg.window},
                                 {"checkpoints", cfg.checkpoints}});
    }
    emit(json{{"command", "helix-demo"}, {"checkpoints", rows}});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"laboratory for the sub-Riemannian Kepler problem and its lattice cousins"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from an INI file");
    app.failure_message(CLI::FailureMessage::help);

    SimulateCfg sim;
    auto* c_sim = app.add_subcommand("simulate", "integrate the Hamiltonian flow");
    c_sim->add_option("--alpha", sim.alpha, "coupling constant");
    c_sim->add_option("--state", sim.state, "initial state x,y,z,px,py,pz")->required();
    c_sim->add_option("--dt", sim.dt, "time step");
    c_sim->add_option("--t-final", sim.t_final, "integration time");
    c_sim->add_option("--method", sim.method, "implicit-midpoint | adaptive-rk")
        ->check(CLI::IsMember({"implicit-midpoint", "adaptive-rk"}));
    c_sim->add_option("--tolerance", sim.tolerance, "adaptive-rk local error target");
    c_sim->add_option("--out", sim.out, "output directory");

    ReduceCfg red;
    auto* c_red = app.add_subcommand("reduce", "project a zero-energy run to the (v, p_v) plane");
    c_red->add_option("--alpha", red.alpha, "coupling constant");
    c_red->add_option("--J", red.J, "dilation moment label");
    c_red->add_option("--ptheta", red.ptheta, "angular momentum label");
    c_red->add_option("--v0", red.v0, "initial height ratio z/r^2");
    c_red->add_option("--branch", red.branch, "momentum branch +1 | -1");
    c_red->add_option("--state", red.state, "explicit initial state (overrides labels)");
    c_red->add_option("--dt", red.dt, "time step");
    c_red->add_option("--t-final", red.t_final, "integration time");
    c_red->add_option("--out", red.out, "output directory");

    FindOrbitCfg orb;
    auto* c_orb = app.add_subcommand("find-orbit", "minimize the action over symmetric loops");
    c_orb->add_option("--alpha", orb.alpha, "coupling constant");
    c_orb->add_option("--modes", orb.modes, "Fourier truncation");
    c_orb->add_option("--gtol", orb.gtol, "projected-gradient target");
    c_orb->add_option("--grid", orb.grid, "action quadrature nodes");
    c_orb->add_option("--cert-grid", orb.cert_grid, "certificate grid");
    c_orb->add_option("--size", orb.size, "seed amplitude");
    c_orb->add_option("--max-iters", orb.max_iters, "iteration budget");
    c_orb->add_option("--restarts", orb.restarts, "multi-start count");
    c_orb->add_option("--jitter", orb.jitter, "relative seed perturbation for restarts");
    c_orb->add_option("--seed", orb.seed, "RNG seed for restarts");
    c_orb->add_flag("--no-s1", orb.no_s1, "drop the three-fold symmetry");
    c_orb->add_flag("--no-s2", orb.no_s2, "drop the half-period antisymmetry");
    c_orb->add_option("--out", orb.out, "output directory");

    ThirdLawCfg law;
    auto* c_law = app.add_subcommand("third-law", "period-size law across a dilated family");
    c_law->add_option("--alpha", law.alpha, "coupling constant");
    c_law->add_option("--lambda-list", law.lambdas, "comma-separated dilation parameters");
    c_law->add_option("--modes", law.modes, "Fourier truncation");
    c_law->add_option("--gtol", law.gtol, "projected-gradient target");
    c_law->add_option("--grid", law.grid, "action quadrature nodes");
    c_law->add_option("--cert-grid", law.cert_grid, "certificate grid");
    c_law->add_option("--out", law.out, "output directory");

    OraclesCfg ora;
    auto* c_ora = app.add_subcommand("oracles", "closed-form families vs field and flow");
    c_ora->add_option("--alpha", ora.alpha, "coupling constant");
    c_ora->add_option("--out", ora.out, "output directory");

    LatticeZCfg lz;
    auto* c_lz = app.add_subcommand("lattice-z", "integer Kepler dynamics on the line");
    c_lz->add_option("--n0", lz.n0, "initial position");
    c_lz->add_option("--p0", lz.p0, "initial momentum");
    c_lz->add_option("--grid", lz.grid, "scan |n|,|p| <= grid instead of a single orbit");
    c_lz->add_option("--variant", lz.variant, "drift-kick | explicit")
        ->check(CLI::IsMember({"drift-kick", "explicit"}));
    c_lz->add_option("--max-steps", lz.max_steps, "recurrence budget");
    c_lz->add_option("--fundamental", lz.fundamental, "range for the DeltaU = -delta_0 check");
    c_lz->add_option("--out", lz.out, "output directory");

    Green2dCfg gr;
    auto* c_gr = app.add_subcommand("green2d", "potential kernel of the square lattice");
    c_gr->add_option("--radius", gr.radius, "table radius");
    c_gr->add_option("--check-radius", gr.check_radius,
                     "cross-check radius (default min(10, radius))");
    c_gr->add_option("--out", gr.out, "output directory");

    LatticePathCfg lp;
    auto* c_lp = app.add_subcommand("lattice-path", "discrete action minimization");
    c_lp->add_option("--from", lp.from, "start vertex n,m");
    c_lp->add_option("--to", lp.to, "end vertex n,m")->required();
    c_lp->add_option("--steps", lp.steps, "path length T")->required();
    c_lp->add_option("--alpha", lp.alpha, "coupling (0 keeps the combinatorics exact)");
    c_lp->add_option("--version", lp.version, "v1 (free jumps) | v2 (unit steps)")
        ->check(CLI::IsMember({"v1", "v2"}));
    c_lp->add_option("--out", lp.out, "output directory");

    HelixCfg hx;
    auto* c_hx = app.add_subcommand("helix-demo",
                                    "exploratory: distance from the free helix at late times");
    c_hx->add_option("--alpha", hx.alpha, "coupling constant");
    c_hx->add_option("--state", hx.state, "initial state x,y,z,px,py,pz");
    c_hx->add_option("--dt", hx.dt, "time step");
    c_hx->add_option("--t-final", hx.t_final, "last checkpoint time");
    c_hx->add_option("--window", hx.window, "comparison window after each checkpoint");
    c_hx->add_option("--checkpoints", hx.checkpoints, "number of checkpoints");
    c_hx->add_option("--out", hx.out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        app.exit(e);
        return 2;
    }

    try {
        if (c_sim->parsed()) return cmd_simulate(sim);
        if (c_red->parsed()) return cmd_reduce(red);
        if (c_orb->parsed()) return cmd_find_orbit(orb);
        if (c_law->parsed()) return cmd_third_law(law);
        if (c_ora->parsed()) return cmd_oracles(ora);
        if (c_lz->parsed()) return cmd_lattice_z(lz);
        if (c_gr->parsed()) return cmd_green2d(gr);
        if (c_lp->parsed()) return cmd_lattice_path(lp);
        if (c_hx->parsed()) return cmd_helix_demo(hx);
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        return fail(e);
    }
    return 2;
}
