#include "soec/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "soec/csv.hpp"
#include "soec/numerics.hpp"

namespace soec {

namespace {

struct Eval {
    double i_tot, su, ih_i, ih_t;
};

Eval evaluate(const SurrogateEnsemble& ens, double t_fur, double q_air, double q_st,
              double v_cell) {
    const OperatingPoint op{t_fur, q_air, q_st, v_cell};
    const CellResponse r = ens.predict(op);
    const PerformanceIndices pi = performance_indices(op, r);
    return {r.i_total(), pi.su, pi.ih_i, pi.ih_t};
}

// Objective vector with all six senses folded to "smaller is better";
// order: ih_i, ih_t, v_cell, su, t_fur, i_tot (su and i_tot maximized).
std::array<double, 6> minimized_objectives(const ParetoSolution& s) {
    return {s.ih_i, s.ih_t, s.v_cell, -s.su, s.t_fur, -s.i_tot};
}

bool dominates(const ParetoSolution& a, const ParetoSolution& b, double tol) {
    const auto fa = minimized_objectives(a);
    const auto fb = minimized_objectives(b);
    bool strict = false;
    for (int m = 0; m < 6; ++m) {
        if (fa[m] > fb[m] + tol) return false;
        if (fa[m] < fb[m] - tol) strict = true;
    }
    return strict;
}

}  // namespace

int GridSpec::t_count() const {
    return static_cast<int>(std::floor((t_hi - t_lo) / t_step + 1e-9)) + 1;
}

int GridSpec::su_count() const {
    return static_cast<int>(std::floor((su_hi - su_lo) / su_step + 1e-9)) + 1;
}

std::optional<double> solve_vcell_for_su(const SurrogateEnsemble& ens, double t_fur_c,
                                         double q_air, double q_st, double su_target,
                                         const InputRanges& ranges) {
    auto g = [&](double v) { return evaluate(ens, t_fur_c, q_air, q_st, v).su - su_target; };
    const double lo = ranges.v_cell.lo, hi = ranges.v_cell.hi;
    const double glo = g(lo), ghi = g(hi);
    if (glo == 0.0) return lo;
    if (ghi == 0.0) return hi;
    if ((glo > 0.0) == (ghi > 0.0)) return std::nullopt;  // target not bracketed on the range
    const auto r = num::brent(g, lo, hi, 1e-11);
    if (!r.converged) return std::nullopt;
    return r.x;
}

NewtonResult solve_constrained(const SurrogateEnsemble& ens, double t_fur_c, double su_target,
                               double p_ele, double q_air, const InputRanges& ranges) {
    const double v_lo = ranges.v_cell.lo, v_hi = ranges.v_cell.hi;
    const double q_lo = ranges.q_st.lo, q_hi = ranges.q_st.hi;
    const double hv = 1e-4 * (v_hi - v_lo);
    const double hq = 1e-4 * (q_hi - q_lo);
    const double tol_p = 1e-6 * std::max(1.0, std::fabs(p_ele));
    const double tol_su = 1e-6;

    auto residual = [&](double v, double q, double& rp, double& rs) {
        const Eval e = evaluate(ens, t_fur_c, q_air, q, v);
        rp = v * e.i_tot - p_ele;
        rs = e.su - su_target;
    };

    const double starts[4][2] = {{v_lo, q_lo}, {v_lo, q_hi}, {v_hi, q_lo}, {v_hi, q_hi}};
    NewtonResult best;
    for (const auto& s0 : starts) {
        double v = s0[0], q = s0[1];
        double rp, rs;
        residual(v, q, rp, rs);
        double cost = rp * rp / (tol_p * tol_p) + rs * rs / (tol_su * tol_su);

        NewtonResult cur;
        for (int it = 1; it <= 100; ++it) {
            cur.iters = it;
            if (std::fabs(rp) <= tol_p && std::fabs(rs) <= tol_su) {
                cur.converged = true;
                break;
            }
            // forward-difference Jacobian of (rp, rs) in (v, q)
            double rp_v, rs_v, rp_q, rs_q;
            residual(v + hv, q, rp_v, rs_v);
            residual(v, q + hq, rp_q, rs_q);
            const double j11 = (rp_v - rp) / hv, j12 = (rp_q - rp) / hq;
            const double j21 = (rs_v - rs) / hv, j22 = (rs_q - rs) / hq;
            const double det = j11 * j22 - j12 * j21;
            if (!(std::fabs(det) > 1e-300)) break;
            const double dv = -(j22 * rp - j12 * rs) / det;
            const double dq = -(-j21 * rp + j11 * rs) / det;

            // halve the step until the scaled residual norm drops
            double t = 1.0;
            bool moved = false;
            for (int half = 0; half < 30; ++half, t *= 0.5) {
                const double vn = std::clamp(v + t * dv, v_lo, v_hi);
                const double qn = std::clamp(q + t * dq, q_lo, q_hi);
                double rpn, rsn;
                residual(vn, qn, rpn, rsn);
                const double cn = rpn * rpn / (tol_p * tol_p) + rsn * rsn / (tol_su * tol_su);
                if (cn < cost) {
                    v = vn; q = qn; rp = rpn; rs = rsn; cost = cn;
                    moved = true;
                    break;
                }
            }
            if (!moved) break;  // stalled (often pinned at the box edge)
        }
        if (std::fabs(rp) <= tol_p && std::fabs(rs) <= tol_su) cur.converged = true;
        cur.v_cell = v;
        cur.q_st = q;
        cur.res_p = rp;
        cur.res_su = rs;
        cur.in_bounds = v >= v_lo && v <= v_hi && q >= q_lo && q <= q_hi;
        if (cur.feasible()) return cur;
        // remember the closest miss for diagnostics
        if (best.iters == 0 ||
            std::fabs(cur.res_p) / tol_p + std::fabs(cur.res_su) / tol_su <
                std::fabs(best.res_p) / tol_p + std::fabs(best.res_su) / tol_su)
            best = cur;
    }
    return best;
}

std::vector<ContourPoint> contour_scan(const SurrogateEnsemble& ens, const InputRanges& ranges,
                                       double su_target, double q_air, int nt, int nq,
                                       par::Exec exec) {
    if (nt < 2 || nq < 2) throw std::invalid_argument("contour_scan: need at least a 2x2 grid");
    std::vector<ContourPoint> pts(static_cast<std::size_t>(nt) * nq);
    par::for_each_index(pts.size(), exec, [&](std::size_t idx) {
        const int i = static_cast<int>(idx) / nq;
        const int j = static_cast<int>(idx) % nq;
        ContourPoint& c = pts[idx];
        c.t_fur = ranges.t_fur.lo + ranges.t_fur.span() * i / (nt - 1);
        c.q_st = ranges.q_st.lo + ranges.q_st.span() * j / (nq - 1);
        c.su = su_target;
        const auto v = solve_vcell_for_su(ens, c.t_fur, q_air, c.q_st, su_target, ranges);
        if (!v) return;
        const OperatingPoint op{c.t_fur, q_air, c.q_st, *v};
        const PerformanceIndices pi = performance_indices(op, ens.predict(op));
        c.v_cell = *v;
        c.ih_t = pi.ih_t;
        c.ih_i = pi.ih_i;
        c.q_h2 = pi.q_h2;
        c.feasible = true;
    });
    return pts;
}

void save_contour_csv(const std::vector<ContourPoint>& pts, const std::filesystem::path& file) {
    std::vector<std::vector<double>> rows;
    rows.reserve(pts.size());
    for (const auto& c : pts)
        rows.push_back({c.t_fur, c.q_st, c.su, c.v_cell, c.ih_t, c.ih_i, c.q_h2,
                        c.feasible ? 1.0 : 0.0});
    csv::write_numeric(file,
                       {"t_fur_C", "q_st_sccm", "su", "v_cell_V", "ih_t_C", "ih_i", "q_h2_sccm",
                        "feasible"},
                       rows);
}

std::vector<const ParetoSolution*> ParetoFront::efficient() const {
    std::vector<const ParetoSolution*> out;
    for (const auto& n : nodes)
        if (n.feasible && !n.dominated) out.push_back(&n);
    return out;
}

ParetoFront build_front(const SurrogateEnsemble& ens, double p_ele, const GridSpec& grid,
                        const InputRanges& ranges, par::Exec exec) {
    if (!(p_ele > 0.0)) throw std::invalid_argument("build_front: p_ele must be positive");
    ParetoFront front;
    front.p_ele = p_ele;
    front.grid = grid;
    const int nt = grid.t_count(), ns = grid.su_count();
    front.nodes.resize(static_cast<std::size_t>(nt) * ns);

    par::for_each_index(front.nodes.size(), exec, [&](std::size_t idx) {
        const int it = static_cast<int>(idx) / ns;
        const int js = static_cast<int>(idx) % ns;
        ParetoSolution& s = front.nodes[idx];
        s.p_ele = p_ele;
        s.it = it;
        s.js = js;
        s.t_fur = grid.t_at(it);
        s.su = grid.su_at(js);
        const NewtonResult nr =
            solve_constrained(ens, s.t_fur, s.su, p_ele, grid.q_air, ranges);
        s.feasible = nr.feasible();
        if (s.feasible) {
            const Eval e = evaluate(ens, s.t_fur, grid.q_air, nr.q_st, nr.v_cell);
            s.q_st = nr.q_st;
            s.v_cell = nr.v_cell;
            s.i_tot = e.i_tot;
            s.ih_i = e.ih_i;
            s.ih_t = e.ih_t;
        }
    });

    // strict-dominance filter over the feasible set
    constexpr double tol = 1e-9;
    for (auto& a : front.nodes) {
        if (!a.feasible) continue;
        for (const auto& b : front.nodes) {
            if (!b.feasible || &a == &b) continue;
            if (dominates(b, a, tol)) {
                a.dominated = true;
                break;
            }
        }
    }
    return front;
}

std::vector<ParetoFront> sweep_power(const SurrogateEnsemble& ens, double p_lo, double p_hi,
                                     double p_step, const GridSpec& grid,
                                     const InputRanges& ranges, par::Exec exec) {
    if (!(p_step > 0.0) || !(p_hi >= p_lo))
        throw std::invalid_argument("sweep_power: bad power range");
    std::vector<ParetoFront> fronts;
    for (double p = p_lo; p <= p_hi + 1e-9; p += p_step)
        fronts.push_back(build_front(ens, p, grid, ranges, exec));
    return fronts;
}

void save_fronts_csv(const std::vector<ParetoFront>& fronts, const std::filesystem::path& file) {
    std::vector<std::vector<double>> rows;
    for (const auto& f : fronts)
        for (const auto& n : f.nodes)
            rows.push_back({n.p_ele, n.t_fur, n.su, n.q_st, n.v_cell, n.i_tot, n.ih_i, n.ih_t,
                            n.feasible ? 1.0 : 0.0, n.dominated ? 1.0 : 0.0});
    csv::write_numeric(file,
                       {"p_ele_W", "t_fur_C", "su", "q_st_sccm", "v_cell_V", "i_tot_A", "ih_i",
                        "ih_t_C", "feasible", "dominated"},
                       rows);
}

std::vector<ParetoFront> load_fronts_csv(const std::filesystem::path& file) {
    const auto t = csv::read_numeric(file);
    const std::vector<std::string> want{"p_ele_W", "t_fur_C", "su", "q_st_sccm", "v_cell_V",
                                        "i_tot_A", "ih_i", "ih_t_C", "feasible", "dominated"};
    if (t.header != want)
        throw std::runtime_error("fronts: " + file.string() + ": unexpected header");

    // group rows by power level, preserving file order
    std::vector<ParetoFront> fronts;
    std::map<double, std::size_t> by_power;
    for (const auto& r : t.rows) {
        const double p = r[0];
        if (!by_power.count(p)) {
            by_power[p] = fronts.size();
            fronts.push_back({});
            fronts.back().p_ele = p;
        }
        ParetoSolution s;
        s.p_ele = r[0]; s.t_fur = r[1]; s.su = r[2]; s.q_st = r[3]; s.v_cell = r[4];
        s.i_tot = r[5]; s.ih_i = r[6]; s.ih_t = r[7];
        s.feasible = r[8] != 0.0;
        s.dominated = r[9] != 0.0;
        fronts[by_power[p]].nodes.push_back(s);
    }

    // reconstruct grid indices from the stored axes
    for (auto& f : fronts) {
        std::vector<double> ts, sus;
        for (const auto& n : f.nodes) {
            ts.push_back(n.t_fur);
            sus.push_back(n.su);
        }
        std::sort(ts.begin(), ts.end());
        ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
        std::sort(sus.begin(), sus.end());
        sus.erase(std::unique(sus.begin(), sus.end()), sus.end());
        f.grid.t_lo = ts.front();
        f.grid.t_hi = ts.back();
        f.grid.t_step = ts.size() > 1 ? (ts.back() - ts.front()) / (ts.size() - 1) : 1.0;
        f.grid.su_lo = sus.front();
        f.grid.su_hi = sus.back();
        f.grid.su_step = sus.size() > 1 ? (sus.back() - sus.front()) / (sus.size() - 1) : 1.0;
        for (auto& n : f.nodes) {
            n.it = static_cast<int>(
                std::lower_bound(ts.begin(), ts.end(), n.t_fur) - ts.begin());
            n.js = static_cast<int>(
                std::lower_bound(sus.begin(), sus.end(), n.su) - sus.begin());
        }
    }
    return fronts;
}

}  // namespace soec
