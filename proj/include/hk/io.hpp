#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hk/green.hpp"
#include "hk/integrate.hpp"
#include "hk/paths.hpp"
#include "hk/search.hpp"
#include "hk/zkepler.hpp"

// File formats. CSV carries bulk samples, plain structured text carries orbit
// records and DP results, SVG is presentation only. Every floating-point
// value is printed with %.17g so that rereading a file reproduces the exact
// double and reruns diff clean.

namespace hk {

std::string format_g17(double v);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// header: t,x,y,z,px,py,pz,H,ptheta,J,Jres
void write_trajectory_csv(const std::string& path, const Trajectory& tr);

// header: t,v,pv,J,ptheta,htilde_residual  (residual = |Htilde - 1|)
void write_reduced_csv(const std::string& path, const Trajectory& tr, const Params& p);

// header: m,n,a  over the full square |m|,|n| <= radius
void write_green_csv(const std::string& path, const GreenTable& table);

// header: j,n,p
void write_zorbit_csv(const std::string& path, const std::vector<LatticeState>& states);

// Orbit record, round-trips bit-exactly. The certificate block is optional
// on write and ignored by load_loop (it documents the run, the loop data
// alone reconstructs the curve).
void save_loop(const std::string& path, const LoopPath& loop,
               const OrbitCertificate* certificate = nullptr);
LoopPath load_loop(const std::string& path);

// min_action, decimal count, witness vertex list
std::string format_dp_result(const DpResult& res);

// Minimal SVG scatter/line plot: polylines in data coordinates mapped to a
// fixed viewport, axes with min/max tick labels. No external dependencies.
struct SvgSeries {
    std::vector<double> xs, ys;
    std::string color = "#2c5f8a";
};
void write_svg_plot(const std::string& path, const std::vector<SvgSeries>& series,
                    const std::string& title, const std::string& xlabel,
                    const std::string& ylabel);

}  // namespace hk
