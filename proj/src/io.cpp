#include "hk/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "hk/coords.hpp"

namespace hk {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_trajectory_csv(const std::string& path, const Trajectory& tr) {
    std::ostringstream out;
    out << "t,x,y,z,px,py,pz,H,ptheta,J,Jres\n";
    for (const auto& s : tr.samples) {
        out << format_g17(s.t) << ',' << format_g17(s.s.q.x) << ',' << format_g17(s.s.q.y)
            << ',' << format_g17(s.s.q.z) << ',' << format_g17(s.s.px) << ','
            << format_g17(s.s.py) << ',' << format_g17(s.s.pz) << ',' << format_g17(s.H)
            << ',' << format_g17(s.ptheta) << ',' << format_g17(s.J) << ','
            << format_g17(s.Jres) << '\n';
    }
    write_text_file(path, out.str());
}

void write_reduced_csv(const std::string& path, const Trajectory& tr, const Params& p) {
    std::ostringstream out;
    out << "t,v,pv,J,ptheta,htilde_residual\n";
    for (const auto& s : tr.samples) {
        const ReducedState r = to_reduced(s.s);
        const double resid = std::fabs(htilde(r, p) - 1.0);
        out << format_g17(s.t) << ',' << format_g17(r.v) << ',' << format_g17(r.pv) << ','
            << format_g17(r.J) << ',' << format_g17(r.ptheta) << ',' << format_g17(resid)
            << '\n';
    }
    write_text_file(path, out.str());
}

void write_green_csv(const std::string& path, const GreenTable& table) {
    std::ostringstream out;
    out << "m,n,a\n";
    const int R = table.radius();
    for (int m = -R; m <= R; ++m)
        for (int n = -R; n <= R; ++n)
            out << m << ',' << n << ',' << format_g17(table.at(m, n)) << '\n';
    write_text_file(path, out.str());
}

void write_zorbit_csv(const std::string& path, const std::vector<LatticeState>& states) {
    std::ostringstream out;
    out << "j,n,p\n";
    for (std::size_t j = 0; j < states.size(); ++j)
        out << j << ',' << states[j].n << ',' << states[j].p << '\n';
    write_text_file(path, out.str());
}

void save_loop(const std::string& path, const LoopPath& loop,
               const OrbitCertificate* certificate) {
    std::ostringstream out;
    out << "loop-record 1\n";
    out << "period " << format_g17(loop.T) << '\n';
    out << "z0 " << format_g17(loop.z0) << '\n';
    out << "modes " << loop.ks.size() << '\n';
    for (std::size_t i = 0; i < loop.ks.size(); ++i)
        out << loop.ks[i] << ' ' << format_g17(loop.c[i].real()) << ' '
            << format_g17(loop.c[i].imag()) << '\n';
    if (certificate) {
        out << "certificate 1\n";
        out << "action " << format_g17(certificate->action) << '\n';
        out << "grad_norm " << format_g17(certificate->grad_norm) << '\n';
        out << "el_residual_sup " << format_g17(certificate->el_residual_sup) << '\n';
        out << "sup_abs_H " << format_g17(certificate->sup_abs_H) << '\n';
        out << "min_rho " << format_g17(certificate->min_rho) << '\n';
        out << "multiplier_drift " << format_g17(certificate->multiplier_drift) << '\n';
        out << "multiplier_base " << format_g17(certificate->multiplier_base) << '\n';
        out << "end\n";
    }
    write_text_file(path, out.str());
}

LoopPath load_loop(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::string word;
    int version = 0;
    in >> word >> version;
    if (word != "loop-record" || version != 1)
        throw std::runtime_error("not a loop record: " + path);
    LoopPath loop;
    std::size_t nmodes = 0;
    in >> word >> loop.T;
    if (word != "period") throw std::runtime_error("malformed loop record: " + path);
    in >> word >> loop.z0;
    if (word != "z0") throw std::runtime_error("malformed loop record: " + path);
    in >> word >> nmodes;
    if (word != "modes") throw std::runtime_error("malformed loop record: " + path);
    loop.ks.resize(nmodes);
    loop.c.resize(nmodes);
    for (std::size_t i = 0; i < nmodes; ++i) {
        double re = 0, im = 0;
        if (!(in >> loop.ks[i] >> re >> im))
            throw std::runtime_error("truncated loop record: " + path);
        loop.c[i] = {re, im};
    }
    return loop;  // any trailing certificate block is informational
}

std::string format_dp_result(const DpResult& res) {
    std::ostringstream out;
    out << "min_action " << format_g17(res.min_action) << '\n';
    out << "count " << res.count.str() << '\n';
    out << "witness " << res.witness.vertices.size() << '\n';
    for (const auto& v : res.witness.vertices) out << v[0] << ' ' << v[1] << '\n';
    return out.str();
}

void write_svg_plot(const std::string& path, const std::vector<SvgSeries>& series,
                    const std::string& title, const std::string& xlabel,
                    const std::string& ylabel) {
    double xlo = 0, xhi = 1, ylo = 0, yhi = 1;
    bool first = true;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.xs.size(); ++i) {
            if (!std::isfinite(s.xs[i]) || !std::isfinite(s.ys[i])) continue;
            if (first) {
                xlo = xhi = s.xs[i];
                ylo = yhi = s.ys[i];
                first = false;
            } else {
                xlo = std::min(xlo, s.xs[i]);
                xhi = std::max(xhi, s.xs[i]);
                ylo = std::min(ylo, s.ys[i]);
                yhi = std::max(yhi, s.ys[i]);
            }
        }
    auto widen = [](double& lo, double& hi) {
        const double pad = (hi > lo) ? 0.05 * (hi - lo) : std::max(1.0, std::fabs(hi));
        lo -= pad;
        hi += pad;
    };
    widen(xlo, xhi);
    widen(ylo, yhi);

    const double W = 720, H = 540, ml = 78, mr = 24, mt = 44, mb = 56;
    auto px = [&](double x) { return ml + (x - xlo) / (xhi - xlo) * (W - ml - mr); };
    auto py = [&](double y) { return H - mb - (y - ylo) / (yhi - ylo) * (H - mt - mb); };
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", v);
        return std::string(buf);
    };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\""
        << " text-anchor=\"middle\">" << title << "</text>\n";
    // axes
    out << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\""
        << H - mb << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << ml << "\" y=\"" << H - mb + 18
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" << fmt(xlo)
        << "</text>\n";
    out << "<text x=\"" << W - mr << "\" y=\"" << H - mb + 18
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" << fmt(xhi)
        << "</text>\n";
    out << "<text x=\"" << ml - 6 << "\" y=\"" << H - mb
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" << fmt(ylo)
        << "</text>\n";
    out << "<text x=\"" << ml - 6 << "\" y=\"" << mt + 4
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" << fmt(yhi)
        << "</text>\n";
    out << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 12
        << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">" << xlabel
        << "</text>\n";
    out << "<text x=\"16\" y=\"" << (mt + H - mb) / 2
        << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\""
        << " transform=\"rotate(-90 16 " << (mt + H - mb) / 2 << ")\">" << ylabel
        << "</text>\n";
    for (const auto& s : series) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color
            << "\" stroke-width=\"1.2\" points=\"";
        for (std::size_t i = 0; i < s.xs.size(); ++i) {
            if (!std::isfinite(s.xs[i]) || !std::isfinite(s.ys[i])) continue;
            out << fmt(px(s.xs[i])) << ',' << fmt(py(s.ys[i])) << ' ';
        }
        out << "\"/>\n";
    }
    out << "</svg>\n";
    write_text_file(path, out.str());
}

}  // namespace hk
