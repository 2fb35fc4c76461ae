#include "hk/paths.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>

#include "hk/green.hpp"

namespace hk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

long long l1(const GridPoint& a, const GridPoint& b) {
    return std::llabs(a[0] - b[0]) + std::llabs(a[1] - b[1]);
}

// L1 geodesic from a to b, x leg first; d+1 vertices
std::vector<GridPoint> staircase(const GridPoint& a, const GridPoint& b) {
    std::vector<GridPoint> out{a};
    GridPoint c = a;
    const long long sx = (b[0] > a[0]) - (b[0] < a[0]);
    while (c[0] != b[0]) {
        c[0] += sx;
        out.push_back(c);
    }
    const long long sy = (b[1] > a[1]) - (b[1] < a[1]);
    while (c[1] != b[1]) {
        c[1] += sy;
        out.push_back(c);
    }
    return out;
}

// Upper bound on the potential kernel: a(x) <= (2/pi) log|x| + 1.0526 with
// the worst case at (1,1); the 1.15 constant leaves slack at every radius.
// Used only to bound how far an action minimiser can wander before its
// kinetic cost provably exceeds the incumbent.
double kernel_upper_bound(double r) {
    return 2.0 / std::numbers::pi * std::log(std::max(1.0, r)) + 1.15;
}

struct Window {
    long long xlo = 0, xhi = 0, ylo = 0, yhi = 0;
    long long w = 0;
    std::vector<char> valid;
    std::vector<double> pot;  // alpha * U per cell, zero when alpha == 0

    long long index(long long x, long long y) const {
        return (x - xlo) + (y - ylo) * w;
    }
    GridPoint coords(long long idx) const {
        return {xlo + idx % w, ylo + idx / w};
    }
    bool contains(long long x, long long y) const {
        return x >= xlo && x <= xhi && y >= ylo && y <= yhi;
    }
    long long size() const { return w * (yhi - ylo + 1); }
};

}  // namespace

DpResult dp_min_action(const GridPoint& v0, const GridPoint& v1, long long T,
                       double alpha, PathVersion version) {
    if (T < 0) throw std::invalid_argument("dp_min_action: T must be >= 0");
    if (!(alpha >= 0)) throw std::invalid_argument("dp_min_action: alpha must be >= 0");
    const long long d = l1(v0, v1);
    if (version == PathVersion::V2 && T < d) throw Infeasible();
    if (T == 0 && d != 0) throw Infeasible();

    auto kernel_one = [&](const GridPoint& g) {
        const long long r = std::max(std::llabs(g[0]), std::llabs(g[1]));
        if (r > (1 << 20)) throw std::invalid_argument("dp_min_action: endpoint too far from the origin");
        if (r == 0) return 0.0;
        GreenTable t(static_cast<int>(r));
        return t.at(static_cast<int>(g[0]), static_cast<int>(g[1]));
    };

    if (T == 0) {
        DpResult res;
        res.min_action = alpha == 0 ? 0.0 : alpha * (-kernel_one(v0) / 4.0);
        res.count = 1;
        res.witness.vertices = {v0};
        res.witness.version = version;
        return res;
    }

    // Incumbent: pad an L1 geodesic with waits (T >= d), or compress it into
    // T near-even jumps (V1 with T < d). Only its action value is used, to
    // bound the window and the V1 jump length.
    std::vector<GridPoint> stair = staircase(v0, v1);
    std::vector<GridPoint> incumbent;
    incumbent.reserve(T + 1);
    if (T >= d) {
        incumbent = stair;
        while (static_cast<long long>(incumbent.size()) < T + 1) incumbent.push_back(v1);
    } else {
        for (long long t = 0; t <= T; ++t)
            incumbent.push_back(stair[static_cast<std::size_t>(d * t / T)]);
    }
    double a_inc = 0;
    for (std::size_t i = 0; i + 1 < incumbent.size(); ++i) {
        const double step = static_cast<double>(l1(incumbent[i + 1], incumbent[i]));
        a_inc += 0.5 * step * step;
    }
    if (alpha > 0)
        for (const auto& g : incumbent) a_inc += alpha * (-kernel_one(g) / 4.0);
    const double margin = 1e-9 * (1.0 + std::fabs(a_inc));

    // Window of positions an optimal path can visit. V2: exact reachability.
    // V1: fixpoint of ell <= sqrt(2T(A_inc + potential slack(ell))); the slack
    // grows only logarithmically with ell, so a few iterations settle it.
    long long ell_star;
    if (version == PathVersion::V2) {
        ell_star = T;
    } else {
        const double r_far = std::max(std::hypot(double(v0[0]), double(v0[1])),
                                      std::hypot(double(v1[0]), double(v1[1])));
        auto next = [&](double ell) {
            const double slack =
                alpha * (T + 1) * kernel_upper_bound(r_far + ell) / 4.0;
            return std::sqrt(2.0 * T * std::max(0.0, a_inc + margin + slack));
        };
        double ell = next(0.0);
        for (int it = 0; it < 40; ++it) ell = next(ell);
        ell_star = static_cast<long long>(std::ceil(ell)) + 1;
    }

    Window win;
    win.xlo = std::min(v0[0], v1[0]) - ell_star;
    win.xhi = std::max(v0[0], v1[0]) + ell_star;
    win.ylo = std::min(v0[1], v1[1]) - ell_star;
    win.yhi = std::max(v0[1], v1[1]) + ell_star;
    win.w = win.xhi - win.xlo + 1;
    const long long ncells = win.size();
    if (ncells > 50'000'000 || (T + 1) * ncells > 200'000'000)
        throw std::invalid_argument("dp_min_action: state space too large");

    // potential per cell (table covers the window's Chebyshev radius)
    win.pot.assign(ncells, 0.0);
    double u_min = 0.0;
    GreenTable* table = nullptr;
    std::unique_ptr<GreenTable> table_holder;
    if (alpha > 0) {
        const long long rad =
            std::max(std::max(std::llabs(win.xlo), std::llabs(win.xhi)),
                     std::max(std::llabs(win.ylo), std::llabs(win.yhi)));
        if (rad > (1 << 20)) throw std::invalid_argument("dp_min_action: window too large");
        table_holder = std::make_unique<GreenTable>(static_cast<int>(std::max(rad, 1LL)));
        table = table_holder.get();
    }
    win.valid.assign(ncells, 0);
    for (long long y = win.ylo; y <= win.yhi; ++y) {
        for (long long x = win.xlo; x <= win.xhi; ++x) {
            const long long idx = win.index(x, y);
            const GridPoint g{x, y};
            if (l1(g, v0) + l1(g, v1) > (version == PathVersion::V2 ? T : ell_star)) continue;
            win.valid[idx] = 1;
            if (table) {
                const double u = -table->at(static_cast<int>(x), static_cast<int>(y)) / 4.0;
                win.pot[idx] = alpha * u;
                u_min = std::min(u_min, u);
            }
        }
    }
    // refine the V1 window with the measured potential minimum
    if (version == PathVersion::V1) {
        const double slack = -alpha * (T + 1) * u_min;  // >= 0
        for (long long idx = 0; idx < ncells; ++idx) {
            if (!win.valid[idx]) continue;
            const GridPoint g = win.coords(idx);
            const double ell = static_cast<double>(l1(g, v0) + l1(g, v1));
            if (ell * ell / (2.0 * T) > a_inc + margin + slack) win.valid[idx] = 0;
        }
    }

    // move set
    struct Move {
        long long dx, dy;
        double kin;
    };
    std::vector<Move> moves;
    if (version == PathVersion::V2) {
        moves = {{0, 0, 0.0}, {1, 0, 0.5}, {-1, 0, 0.5}, {0, 1, 0.5}, {0, -1, 0.5}};
    } else {
        const double budget = a_inc + margin - alpha * (T + 1) * u_min;
        const long long lmax = static_cast<long long>(std::sqrt(std::max(0.0, 2.0 * budget))) + 1;
        for (long long dy = -lmax; dy <= lmax; ++dy)
            for (long long dx = -(lmax - std::llabs(dy)); dx <= lmax - std::llabs(dy); ++dx) {
                const double len = static_cast<double>(std::llabs(dx) + std::llabs(dy));
                moves.push_back({dx, dy, 0.5 * len * len});
            }
    }

    // DP over layers; ties accumulate counts, first-found predecessor wins
    std::vector<double> cost(ncells, kInf), ncost(ncells);
    std::vector<PathCount> cnt(ncells), ncnt(ncells);
    std::vector<std::vector<int32_t>> pred(T + 1, std::vector<int32_t>(ncells, -1));

    const long long idx0 = win.index(v0[0], v0[1]);
    const long long idx1 = win.index(v1[0], v1[1]);
    cost[idx0] = win.pot[idx0];
    cnt[idx0] = 1;

    for (long long t = 0; t < T; ++t) {
        std::fill(ncost.begin(), ncost.end(), kInf);
        std::fill(ncnt.begin(), ncnt.end(), PathCount(0));
        auto& prow = pred[t + 1];
        for (long long idx = 0; idx < ncells; ++idx) {
            if (cost[idx] == kInf) continue;
            const GridPoint g = win.coords(idx);
            for (const auto& mv : moves) {
                const long long x = g[0] + mv.dx, y = g[1] + mv.dy;
                if (!win.contains(x, y)) continue;
                const long long tidx = win.index(x, y);
                if (!win.valid[tidx]) continue;
                const double c = cost[idx] + mv.kin + win.pot[tidx];
                const double tol = alpha == 0 ? 0.0 : 1e-12 * (1.0 + std::fabs(c));
                if (c < ncost[tidx] - tol) {
                    ncost[tidx] = c;
                    ncnt[tidx] = cnt[idx];
                    prow[tidx] = static_cast<int32_t>(idx);
                } else if (c <= ncost[tidx] + tol) {
                    ncnt[tidx] += cnt[idx];
                }
            }
        }
        cost.swap(ncost);
        cnt.swap(ncnt);
    }

    if (!win.valid[idx1] || cost[idx1] == kInf) throw Infeasible();

    DpResult res;
    res.min_action = cost[idx1];
    res.count = cnt[idx1];
    res.witness.version = version;
    std::vector<GridPoint> rev;
    long long cur = idx1;
    for (long long t = T; t >= 1; --t) {
        rev.push_back(win.coords(cur));
        cur = pred[t][cur];
    }
    rev.push_back(win.coords(cur));
    res.witness.vertices.assign(rev.rbegin(), rev.rend());
    return res;
}

namespace {

// nearest integer, half-way cases toward zero
long long round_half_toward_zero(double v) {
    const double t = std::trunc(v);
    const double frac = v - t;
    if (std::fabs(frac) > 0.5) return static_cast<long long>(t) + (v > 0 ? 1 : -1);
    return static_cast<long long>(t);
}

}  // namespace

NewtonStep newton_difference_step(const GridPoint& cell, const EdgeMomentum& p,
                                  const std::function<double(long long, long long)>& potential) {
    NewtonStep out;
    out.cell = {cell[0] + round_half_toward_zero(0.5 * (p.right + p.left)),
                cell[1] + round_half_toward_zero(0.5 * (p.up + p.down))};
    const double v00 = potential(cell[0], cell[1]);
    out.p.up = p.up - (potential(cell[0], cell[1] + 1) - v00);
    out.p.down = p.down - (potential(cell[0], cell[1] - 1) - v00);
    out.p.right = p.right - (potential(cell[0] + 1, cell[1]) - v00);
    out.p.left = p.left - (potential(cell[0] - 1, cell[1]) - v00);
    return out;
}

}  // namespace hk
