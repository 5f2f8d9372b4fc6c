#include "soec/decision.hpp"

#include <cmath>
#include <stdexcept>

#include "soec/csv.hpp"

namespace soec {

WeightVector WeightVector::equal() { return {}; }

WeightVector WeightVector::utilization_heavy() {
    WeightVector v;
    v.w[3] = 5.0;
    return v;
}

std::array<double, n_objectives> objective_values(const ParetoSolution& s) {
    return {s.ih_i, s.ih_t, s.v_cell, s.su, s.t_fur, s.i_tot};
}

std::vector<std::array<double, n_objectives>> linmap_normalize(const ParetoFront& front) {
    const auto eff = front.efficient();
    std::vector<std::array<double, n_objectives>> out(eff.size());
    if (eff.empty()) return out;

    std::array<double, n_objectives> lo, hi;
    lo = hi = objective_values(*eff[0]);
    for (const auto* s : eff) {
        const auto v = objective_values(*s);
        for (int m = 0; m < n_objectives; ++m) {
            lo[m] = std::min(lo[m], v[m]);
            hi[m] = std::max(hi[m], v[m]);
        }
    }
    for (std::size_t i = 0; i < eff.size(); ++i) {
        const auto v = objective_values(*eff[i]);
        for (int m = 0; m < n_objectives; ++m) {
            const double span = hi[m] - lo[m];
            out[i][m] = span < 1e-12 ? 0.5 : (v[m] - lo[m]) / span;
        }
    }
    return out;
}

LinmapChoice linmap_select(const ParetoFront& front, const WeightVector& w) {
    const auto eff = front.efficient();
    if (eff.empty())
        throw std::invalid_argument("linmap_select: front has no efficient solution");
    const auto norm = linmap_normalize(front);

    LinmapChoice choice;
    choice.d_all.resize(eff.size());
    std::size_t best = 0;
    for (std::size_t i = 0; i < eff.size(); ++i) {
        double d2 = 0.0;
        for (int m = 0; m < n_objectives; ++m) {
            const double ideal = objective_maximized[m] ? 1.0 : 0.0;
            const double diff = norm[i][m] - ideal;
            d2 += w.w[m] * diff * diff;
        }
        choice.d_all[i] = std::sqrt(d2);
        if (i == 0) continue;
        const double cur = choice.d_all[i], ref = choice.d_all[best];
        if (cur < ref - 1e-12) {
            best = i;
        } else if (cur <= ref + 1e-12) {
            // tie: prefer the lower steam-utilization grid index, then lower t_fur index
            if (eff[i]->js < eff[best]->js ||
                (eff[i]->js == eff[best]->js && eff[i]->it < eff[best]->it))
                best = i;
        }
    }
    choice.efficient_index = best;
    choice.solution = eff[best];
    choice.d = choice.d_all[best];
    return choice;
}

OperatingCurve operating_curve(const std::vector<ParetoFront>& fronts, const WeightVector& w) {
    OperatingCurve curve;
    curve.weights = w;
    for (const auto& f : fronts) {
        if (f.efficient().empty()) {
            curve.skipped_powers.push_back(f.p_ele);
            continue;
        }
        const auto c = linmap_select(f, w);
        curve.points.push_back({f.p_ele, *c.solution, c.d});
    }
    return curve;
}

void save_curve_csv(const OperatingCurve& curve, const std::filesystem::path& file) {
    std::vector<std::vector<double>> rows;
    rows.reserve(curve.points.size());
    for (const auto& p : curve.points) {
        const auto& s = p.chosen;
        rows.push_back({p.p_ele, s.t_fur, s.su, s.q_st, s.v_cell, s.i_tot, s.ih_i, s.ih_t, p.d});
    }
    csv::write_numeric(file,
                       {"p_ele_W", "t_fur_C", "su", "q_st_sccm", "v_cell_V", "i_tot_A", "ih_i",
                        "ih_t_C", "d"},
                       rows);
}

void save_envelope_csv(const std::vector<ParetoFront>& fronts,
                       const std::filesystem::path& best_file,
                       const std::filesystem::path& worst_file) {
    std::vector<std::vector<double>> best_rows, worst_rows;
    for (const auto& f : fronts) {
        const auto eff = f.efficient();
        if (eff.empty()) continue;
        std::array<double, n_objectives> lo, hi;
        lo = hi = objective_values(*eff[0]);
        for (const auto* s : eff) {
            const auto v = objective_values(*s);
            for (int m = 0; m < n_objectives; ++m) {
                lo[m] = std::min(lo[m], v[m]);
                hi[m] = std::max(hi[m], v[m]);
            }
        }
        std::vector<double> best{f.p_ele}, worst{f.p_ele};
        for (int m = 0; m < n_objectives; ++m) {
            best.push_back(objective_maximized[m] ? hi[m] : lo[m]);
            worst.push_back(objective_maximized[m] ? lo[m] : hi[m]);
        }
        best_rows.push_back(best);
        worst_rows.push_back(worst);
    }
    const std::vector<std::string> header{"p_ele_W", "ih_i",  "ih_t_C", "v_cell_V",
                                          "su",      "t_fur_C", "i_tot_A"};
    csv::write_numeric(best_file, header, best_rows);
    csv::write_numeric(worst_file, header, worst_rows);
}

}  // namespace soec
