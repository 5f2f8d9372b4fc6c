#include "soec/physics.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "soec/config.hpp"
#include "soec/csv.hpp"
#include "soec/numerics.hpp"

namespace soec {

namespace {

constexpr double k_air_o2 = 0.21;        // dry-air oxygen fraction at the anode inlet
constexpr double k_i_limit = 60.0;       // A, bracket ceiling far beyond reachable densities
constexpr double k_i_tol = 1e-8;         // A, outer convergence on segment currents
constexpr double k_t_tol = 1e-9;         // K, outer convergence on segment temperatures
constexpr int k_max_outer = 200;

double mean_fraction(double x_in, double x_out, CompositionMean rule) {
    if (rule == CompositionMean::arithmetic) return 0.5 * (x_in + x_out);
    if (x_in == x_out) return x_in;
    return (x_in - x_out) / std::log(x_in / x_out);
}

}  // namespace

void CellParameters::validate() const {
    auto need_pos = [](double v, const char* name) {
        if (!(v > 0.0))
            throw std::invalid_argument(std::string("cell parameters: ") + name +
                                        " must be positive");
    };
    need_pos(e_ref_0, "e_ref_0");
    need_pos(i0_a_pre, "i0_a_pre");
    need_pos(i0_c_pre, "i0_c_pre");
    need_pos(e_act_a, "e_act_a");
    need_pos(e_act_c, "e_act_c");
    need_pos(asr_ohm_pre, "asr_ohm_pre");
    need_pos(e_act_ohm, "e_act_ohm");
    need_pos(k_conc, "k_conc");
    need_pos(delta_s_r, "delta_s_r");
    need_pos(h_fur, "h_fur");
    need_pos(k_axial, "k_axial");
    need_pos(h_air, "h_air");
    need_pos(seg_area, "seg_area");
    need_pos(x_ref_h2, "x_ref_h2");
    need_pos(x_ref_h2o, "x_ref_h2o");
    need_pos(x_ref_o2, "x_ref_o2");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("cell parameters: alpha must lie in (0, 1)");
}

CellParameters load_cell_parameters(const std::filesystem::path& file) {
    const auto kv = parse_config_file(file);
    CellParameters d;  // defaults fill missing keys
    CellParameters p;
    p.e_ref_0 = config_double(kv, "e_ref_0", d.e_ref_0);
    p.alpha = config_double(kv, "alpha", d.alpha);
    p.i0_a_pre = config_double(kv, "i0_a_pre", d.i0_a_pre);
    p.i0_c_pre = config_double(kv, "i0_c_pre", d.i0_c_pre);
    p.e_act_a = config_double(kv, "e_act_a", d.e_act_a);
    p.e_act_c = config_double(kv, "e_act_c", d.e_act_c);
    p.asr_ohm_pre = config_double(kv, "asr_ohm_pre", d.asr_ohm_pre);
    p.e_act_ohm = config_double(kv, "e_act_ohm", d.e_act_ohm);
    p.k_conc = config_double(kv, "k_conc", d.k_conc);
    p.delta_s_r = config_double(kv, "delta_s_r", d.delta_s_r);
    p.h_fur = config_double(kv, "h_fur", d.h_fur);
    p.k_axial = config_double(kv, "k_axial", d.k_axial);
    p.h_air = config_double(kv, "h_air", d.h_air);
    p.seg_area = config_double(kv, "seg_area", d.seg_area);
    p.x_ref_h2 = config_double(kv, "x_ref_h2", d.x_ref_h2);
    p.x_ref_h2o = config_double(kv, "x_ref_h2o", d.x_ref_h2o);
    p.x_ref_o2 = config_double(kv, "x_ref_o2", d.x_ref_o2);

    const std::string rule = config_string(kv, "mean_rule", "log_mean");
    if (rule == "log_mean") p.mean_rule = CompositionMean::log_mean;
    else if (rule == "arithmetic") p.mean_rule = CompositionMean::arithmetic;
    else throw std::invalid_argument("cell parameters: mean_rule must be arithmetic or log_mean");

    static const char* known[] = {"e_ref_0", "alpha", "i0_a_pre", "i0_c_pre", "e_act_a",
                                  "e_act_c", "asr_ohm_pre", "e_act_ohm", "k_conc", "delta_s_r",
                                  "h_fur", "k_axial", "h_air", "seg_area", "x_ref_h2",
                                  "x_ref_h2o", "x_ref_o2", "mean_rule"};
    for (const auto& [key, val] : kv) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw std::invalid_argument("cell parameters: unknown key '" + key + "'");
    }
    p.validate();
    return p;
}

void save_cell_parameters(const CellParameters& p, const std::filesystem::path& file) {
    std::ostringstream out;
    out << "# Three-segment cell model parameters. SI units unless noted.\n";
    auto w = [&](const char* key, double v, const char* unit) {
        out << key << " = " << csv::format_double(v) << "    # " << unit << "\n";
    };
    w("e_ref_0", p.e_ref_0, "V");
    w("alpha", p.alpha, "-");
    w("i0_a_pre", p.i0_a_pre, "A/m^2");
    w("i0_c_pre", p.i0_c_pre, "A/m^2");
    w("e_act_a", p.e_act_a, "J/mol");
    w("e_act_c", p.e_act_c, "J/mol");
    w("asr_ohm_pre", p.asr_ohm_pre, "ohm m^2");
    w("e_act_ohm", p.e_act_ohm, "J/mol");
    w("k_conc", p.k_conc, "A/m^2 per unit steam fraction");
    w("delta_s_r", p.delta_s_r, "J/(mol K)");
    w("h_fur", p.h_fur, "W/(m^2 K)");
    w("k_axial", p.k_axial, "W/K");
    w("h_air", p.h_air, "W/(K sccm)");
    w("seg_area", p.seg_area, "m^2");
    w("x_ref_h2", p.x_ref_h2, "-");
    w("x_ref_h2o", p.x_ref_h2o, "-");
    w("x_ref_o2", p.x_ref_o2, "-");
    out << "mean_rule = " << (p.mean_rule == CompositionMean::log_mean ? "log_mean" : "arithmetic")
        << "    # arithmetic | log_mean\n";

    std::ofstream f(file, std::ios::binary);
    if (!f) throw std::runtime_error("cell parameters: cannot write " + file.string());
    f << out.str();
}

double exchange_current_density(double t_k, Electrode e, const CellParameters& p) {
    const double rt = constants::gas * t_k;
    return e == Electrode::anode ? p.i0_a_pre * std::exp(-p.e_act_a / rt)
                                 : p.i0_c_pre * std::exp(-p.e_act_c / rt);
}

double series_resistance(double t_k, const CellParameters& p) {
    return p.asr_ohm_pre * std::exp(p.e_act_ohm / (constants::gas * t_k));
}

double nernst_potential(double t_k, double x_h2o, double x_h2, double x_o2, double p_anode,
                        const CellParameters& p) {
    if (!(x_h2o > 0.0 && x_h2 > 0.0 && x_o2 > 0.0))
        throw std::invalid_argument("nernst_potential: mole fractions must be positive");
    if (!(t_k > 0.0) || !(p_anode > 0.0))
        throw std::invalid_argument("nernst_potential: temperature and pressure must be positive");
    const double rt_f = constants::gas * t_k / constants::faraday;
    return p.e_ref_0 + 0.25 * rt_f * std::log(x_o2 * p_anode / constants::p_atm) +
           0.5 * rt_f * std::log(x_h2 / x_h2o);
}

double butler_volmer_current(double eta, double t_k, double x_h2o, double x_h2, double x_o2,
                             const CellParameters& p, Electrode e) {
    const double i0 = exchange_current_density(t_k, e, p);
    const double z = p.alpha * constants::faraday * eta / (constants::gas * t_k);
    if (e == Electrode::cathode)
        return i0 * (x_h2 / p.x_ref_h2 * std::exp(z) - x_h2o / p.x_ref_h2o * std::exp(-z));
    return i0 * (x_o2 / p.x_ref_o2 * std::exp(z) - std::exp(-z));
}

namespace {

// Activation overpotential magnitudes on the electrolysis branch, inverting
// the rate law analytically (quadratic in exp(alpha F u / RT)). The cathode
// adds the concentration loss of the steam-transport film; past the ceiling
// j = k_conc * x_h2o the demand is a large finite ramp so bracketing root
// finders see a sign change instead of an overflow.
double eta_cathode(double j, double t_k, double x_h2o, double x_h2, const CellParameters& p) {
    const double i0 = exchange_current_density(t_k, Electrode::cathode, p);
    const double a = x_h2o / p.x_ref_h2o;
    const double b = x_h2 / p.x_ref_h2;
    const double jn = j / i0;
    const double s = (jn + std::sqrt(jn * jn + 4.0 * a * b)) / (2.0 * a);
    const double act = constants::gas * t_k / (p.alpha * constants::faraday) * std::log(s);

    const double rel = j / (p.k_conc * x_h2o);
    if (rel >= 1.0 - 1e-12) return act + 1e3 * (1.0 + rel);
    const double conc = -0.5 * constants::gas * t_k / constants::faraday * std::log1p(-rel);
    return act + conc;
}

double eta_anode(double j, double t_k, double x_o2, const CellParameters& p) {
    const double i0 = exchange_current_density(t_k, Electrode::anode, p);
    const double jn = j / i0;
    const double s = 0.5 * (jn + std::sqrt(jn * jn + 4.0 * x_o2 / p.x_ref_o2));
    return constants::gas * t_k / (p.alpha * constants::faraday) * std::log(s);
}

// Voltage required to drive current density j at a fixed composition.
double voltage_demand(double j, double t_k, double x_h2o, double x_h2, double x_o2,
                      const CellParameters& p) {
    return nernst_potential(t_k, x_h2o, x_h2, x_o2, constants::p_atm, p) +
           eta_cathode(j, t_k, x_h2o, x_h2, p) + eta_anode(j, t_k, x_o2, p) +
           j * series_resistance(t_k, p);
}

}  // namespace

double segment_polarization(double v_cell, double t_k, double x_h2o_mean, double x_h2_mean,
                            double x_o2_mean, const CellParameters& p) {
    if (!(x_h2o_mean > 0.0 && x_h2_mean > 0.0 && x_o2_mean > 0.0))
        throw std::invalid_argument("segment_polarization: mole fractions must be positive");
    auto balance = [&](double i) {
        return voltage_demand(i / p.seg_area, t_k, x_h2o_mean, x_h2_mean, x_o2_mean, p) - v_cell;
    };
    if (balance(0.0) >= 0.0) return 0.0;  // at or below the local open-circuit voltage
    if (balance(k_i_limit) < 0.0) {
        std::ostringstream msg;
        msg << "segment_polarization: no root in [0, " << k_i_limit << "] A at v=" << v_cell
            << " V, T=" << t_k << " K, x_h2o=" << x_h2o_mean;
        throw solver_error(msg.str());
    }
    const auto r = num::brent(balance, 0.0, k_i_limit, 1e-13);
    if (!r.converged)
        throw solver_error("segment_polarization: bracketed solve failed to converge");
    return r.x;
}

namespace {

struct FlowState {
    double n_h2o;   // mol/s entering the segment, cathode steam
    double n_cath;  // mol/s total cathode flow (constant: H2O + H2 swap 1:1)
    double n_o2;    // mol/s entering, anode oxygen
    double n_an;    // mol/s entering, anode total
};

struct SegmentSolve {
    SegmentState st;
    FlowState out;
};

// Self-consistent current of one segment at its own depletion: the mean
// composition the kinetics see depends on the current being solved for.
SegmentSolve solve_segment(int k, double v_cell, double t_k, const FlowState& in,
                           const CellParameters& p) {
    const double two_f = 2.0 * constants::faraday;
    const double four_f = 4.0 * constants::faraday;
    if (!(in.n_h2o > 0.0))
        throw starvation_error(k, "segment " + std::to_string(k) +
                                      ": no steam left at segment inlet");

    const double x_in = in.n_h2o / in.n_cath;
    const double xo2_in = in.n_o2 / in.n_an;
    const double i_starve = two_f * in.n_h2o;

    auto assemble = [&](double i) {
        SegmentState s;
        s.t_k = t_k;
        s.i = i;
        s.x_h2o_in = x_in;
        s.x_h2o_out = (in.n_h2o - i / two_f) / in.n_cath;
        s.x_o2_in = xo2_in;
        s.x_o2_out = (in.n_o2 + i / four_f) / (in.n_an + i / four_f);
        const double xm = mean_fraction(s.x_h2o_in, s.x_h2o_out, p.mean_rule);
        const double xo2m = mean_fraction(s.x_o2_in, s.x_o2_out, p.mean_rule);
        const double j = i / p.seg_area;
        s.e_ref = nernst_potential(t_k, xm, 1.0 - xm, xo2m, constants::p_atm, p);
        s.eta_c = eta_cathode(j, t_k, xm, 1.0 - xm, p);
        s.eta_a = eta_anode(j, t_k, xo2m, p);
        return s;
    };
    auto balance = [&](double i) {
        const SegmentState s = assemble(i);
        return s.e_ref + s.eta_c + s.eta_a + (s.i / p.seg_area) * series_resistance(t_k, p) -
               v_cell;
    };

    double i_seg = 0.0;
    if (balance(0.0) < 0.0) {
        const double hi = std::min(i_starve * (1.0 - 1e-12), k_i_limit);
        if (balance(hi) < 0.0) {
            if (p.mean_rule == CompositionMean::arithmetic && hi < k_i_limit) {
                std::ostringstream msg;
                msg << "segment " << k << ": steam fully depleted (demand exceeds "
                    << i_starve << " A available) at v=" << v_cell << " V, T=" << t_k << " K";
                throw starvation_error(k, msg.str());
            }
            std::ostringstream msg;
            msg << "segment " << k << ": no current bracket in [0, " << hi << "] A at v="
                << v_cell << " V, T=" << t_k << " K";
            throw solver_error(msg.str());
        }
        const auto r = num::brent(balance, 0.0, hi, 1e-13);
        if (!r.converged)
            throw solver_error("segment " + std::to_string(k) + ": current solve stalled");
        i_seg = r.x;
    }

    SegmentSolve out;
    out.st = assemble(i_seg);
    // net heat: irreversible losses minus the reversible entropy uptake
    const double j = i_seg / p.seg_area;
    out.st.q_heat = i_seg * (out.st.eta_a + out.st.eta_c) +
                    i_seg * j * series_resistance(t_k, p) -
                    i_seg * t_k * p.delta_s_r / two_f;
    out.out.n_h2o = in.n_h2o - i_seg / two_f;
    out.out.n_cath = in.n_cath;
    out.out.n_o2 = in.n_o2 + i_seg / four_f;
    out.out.n_an = in.n_an + i_seg / four_f;
    return out;
}

// Heat balance: q_k + k_axial * sum_nb (T_nb - T_k) = (h_fur A + h_air q_air)(T_k - T_fur).
// Direct 3x3 tridiagonal solve for the temperatures given the heat sources.
std::array<double, 3> solve_temperatures(const std::array<double, 3>& q, double t_fur_k,
                                         double q_air, const CellParameters& p) {
    const double c = p.h_fur * p.seg_area + p.h_air * q_air;
    const double g = p.k_axial;
    double diag[3] = {c + g, c + 2.0 * g, c + g};
    double lower[3] = {0.0, -g, -g};
    double upper[3] = {-g, -g, 0.0};
    double rhs[3] = {q[0] + c * t_fur_k, q[1] + c * t_fur_k, q[2] + c * t_fur_k};

    // Thomas algorithm
    for (int k = 1; k < 3; ++k) {
        const double m = lower[k] / diag[k - 1];
        diag[k] -= m * upper[k - 1];
        rhs[k] -= m * rhs[k - 1];
    }
    std::array<double, 3> t;
    t[2] = rhs[2] / diag[2];
    t[1] = (rhs[1] - upper[1] * t[2]) / diag[1];
    t[0] = (rhs[0] - upper[0] * t[1]) / diag[0];
    return t;
}

}  // namespace

bool operating_point_valid(const OperatingPoint& op, std::string* why) {
    const InputRanges r;
    auto fail = [&](const std::string& m) {
        if (why) *why = m;
        return false;
    };
    if (!r.t_fur.contains(op.t_fur, 0.1 * r.t_fur.span()))
        return fail("t_fur " + std::to_string(op.t_fur) + " C outside validity box");
    if (!(op.q_air > 0.0 && op.q_air <= 500.0))
        return fail("q_air " + std::to_string(op.q_air) + " sccm outside (0, 500]");
    if (!r.q_st.contains(op.q_st, 0.1 * r.q_st.span()))
        return fail("q_st " + std::to_string(op.q_st) + " sccm outside validity box");
    if (!r.v_cell.contains(op.v_cell, 0.1 * r.v_cell.span()))
        return fail("v_cell " + std::to_string(op.v_cell) + " V outside validity box");
    return true;
}

double CellSolution::thermal_residual(int k, const OperatingPoint& op,
                                      const CellParameters& p) const {
    const double t_fur_k = celsius_to_kelvin(op.t_fur);
    const double c = p.h_fur * p.seg_area + p.h_air * op.q_air;
    double cond = 0.0;
    if (k > 0) cond += p.k_axial * (seg[k - 1].t_k - seg[k].t_k);
    if (k < 2) cond += p.k_axial * (seg[k + 1].t_k - seg[k].t_k);
    return seg[k].q_heat + cond - c * (seg[k].t_k - t_fur_k);
}

CellSolution simulate_cell_states(const OperatingPoint& op, const CellParameters& p,
                                  const CellSolution* warm_start) {
    p.validate();
    std::string why;
    if (!operating_point_valid(op, &why))
        throw std::invalid_argument("simulate_cell: " + why);

    const double t_fur_k = celsius_to_kelvin(op.t_fur);
    const double n_st = sccm_to_mol_per_s(op.q_st);
    const double n_air = sccm_to_mol_per_s(op.q_air);

    std::array<double, 3> t{t_fur_k, t_fur_k, t_fur_k};
    std::array<double, 3> i_prev{0.0, 0.0, 0.0};
    if (warm_start) {
        for (int k = 0; k < 3; ++k) {
            t[k] = warm_start->seg[k].t_k;
            i_prev[k] = warm_start->seg[k].i;
        }
    }

    CellSolution sol;
    for (int outer = 1; outer <= k_max_outer; ++outer) {
        // march down the cathode channel at the current temperatures;
        // hydrogen carrier equals the steam feed, so cathode flow is 2 n_st
        FlowState flow{n_st, 2.0 * n_st, k_air_o2 * n_air, n_air};
        std::array<double, 3> q{};
        for (int k = 0; k < 3; ++k) {
            SegmentSolve s = solve_segment(k, op.v_cell, t[k], flow, p);
            sol.seg[k] = s.st;
            q[k] = s.st.q_heat;
            flow = s.out;
        }

        const auto t_solved = solve_temperatures(q, t_fur_k, op.q_air, p);
        double di = 0.0, dt = 0.0;
        for (int k = 0; k < 3; ++k) {
            di = std::max(di, std::fabs(sol.seg[k].i - i_prev[k]));
            const double t_new = t[k] + 0.5 * (t_solved[k] - t[k]);  // damped update
            dt = std::max(dt, std::fabs(t_new - t[k]));
            t[k] = t_new;
            i_prev[k] = sol.seg[k].i;
        }
        sol.iterations = outer;
        if (di < k_i_tol && dt < k_t_tol) {
            for (int k = 0; k < 3; ++k) sol.seg[k].t_k = t[k];
            sol.response.t_max = kelvin_to_celsius(std::max({t[0], t[1], t[2]}));
            sol.response.t_min = kelvin_to_celsius(std::min({t[0], t[1], t[2]}));
            sol.response.i_up = sol.seg[0].i;
            sol.response.i_mid = sol.seg[1].i;
            sol.response.i_down = sol.seg[2].i;
            return sol;
        }
    }
    std::ostringstream msg;
    msg << "simulate_cell: no convergence after " << k_max_outer << " iterations at t_fur="
        << op.t_fur << " C, q_air=" << op.q_air << ", q_st=" << op.q_st << ", v=" << op.v_cell;
    throw convergence_error(msg.str());
}

CellResponse simulate_cell(const OperatingPoint& op, const CellParameters& p) {
    return simulate_cell_states(op, p).response;
}

std::vector<IvPoint> iv_sweep(double t_fur_c, double q_air, double q_st, double v_lo, double v_hi,
                              int n_points, const CellParameters& p) {
    if (n_points < 2) throw std::invalid_argument("iv_sweep: need at least 2 points");
    if (!(v_hi > v_lo)) throw std::invalid_argument("iv_sweep: v_hi must exceed v_lo");

    std::vector<IvPoint> out(n_points);
    CellSolution warm;
    bool have_warm = false;
    for (int k = 0; k < n_points; ++k) {
        const double v = v_lo + (v_hi - v_lo) * k / (n_points - 1);
        out[k].v_cell = v;
        const OperatingPoint op{t_fur_c, q_air, q_st, v};
        try {
            const CellSolution sol = simulate_cell_states(op, p, have_warm ? &warm : nullptr);
            out[k].response = sol.response;
            out[k].ok = true;
            warm = sol;
            have_warm = true;
        } catch (const std::exception& e) {
            out[k].ok = false;
            out[k].error = e.what();
        }
    }
    return out;
}

OperatingPoint scenario_condition1(double v_cell) { return {660.0, 400.0, 40.0, v_cell}; }
OperatingPoint scenario_condition2(double v_cell) { return {660.0, 400.0, 120.0, v_cell}; }

}  // namespace soec
