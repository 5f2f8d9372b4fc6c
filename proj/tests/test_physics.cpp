#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "soec/physics.hpp"

using namespace soec;
namespace fs = std::filesystem;

namespace {
const double t_ref_k = 933.0;  // handy mid-box kelvin value for spot checks
}

TEST_CASE("nernst potential at the reference composition") {
    const CellParameters p;
    // 50/50 steam/hydrogen against dry air at 1 atm: only the oxygen term remains
    const double e = nernst_potential(t_ref_k, 0.5, 0.5, 0.21, constants::p_atm, p);
    CHECK(e == doctest::Approx(0.99 - 0.031368910925381153).epsilon(1e-12));

    // pure oxygen at 1 atm with equal steam/hydrogen collapses to e_ref_0
    CHECK(nernst_potential(t_ref_k, 0.4, 0.4, 1.0, constants::p_atm, p) ==
          doctest::Approx(p.e_ref_0).epsilon(1e-13));
    CHECK(nernst_potential(1023.15, 0.3, 0.3, 1.0, constants::p_atm, p) ==
          doctest::Approx(p.e_ref_0).epsilon(1e-13));
}

TEST_CASE("consuming steam raises the reversible potential") {
    const CellParameters p;
    const double fresh = nernst_potential(t_ref_k, 0.5, 0.5, 0.21, constants::p_atm, p);
    const double depleted = nernst_potential(t_ref_k, 0.3, 0.7, 0.21, constants::p_atm, p);
    CHECK(depleted > fresh);
    // hydrogen term is (RT/2F) ln(x_h2/x_h2o)
    CHECK(depleted - fresh ==
          doctest::Approx(0.040199860551826894 * std::log(0.7 / 0.3)).epsilon(1e-12));
}

TEST_CASE("exchange currents follow an Arrhenius law") {
    const CellParameters p;
    const double i0_933 = exchange_current_density(933.15, Electrode::anode, p);
    const double i0_1023 = exchange_current_density(1023.15, Electrode::anode, p);
    CHECK(i0_1023 > i0_933);
    const double expected_ratio =
        std::exp(-p.e_act_a / constants::gas * (1.0 / 1023.15 - 1.0 / 933.15));
    CHECK(i0_1023 / i0_933 == doctest::Approx(expected_ratio).epsilon(1e-12));

    // cathode has its own prefactor and activation energy
    const double i0c = exchange_current_density(933.15, Electrode::cathode, p);
    CHECK(i0c == doctest::Approx(p.i0_c_pre * std::exp(-p.e_act_c /
                                                       (constants::gas * 933.15))));
}

TEST_CASE("series resistance falls as temperature rises") {
    const CellParameters p;
    const double r_low = series_resistance(873.15, p);
    const double r_high = series_resistance(1023.15, p);
    CHECK(r_high < r_low);
    CHECK(series_resistance(933.15, p) ==
          doctest::Approx(p.asr_ohm_pre * std::exp(p.e_act_ohm / (constants::gas * 933.15))));
}

TEST_CASE("butler-volmer vanishes at zero overpotential on reference composition") {
    const CellParameters p;
    CHECK(butler_volmer_current(0.0, t_ref_k, 0.5, 0.5, 0.21, p, Electrode::cathode) == 0.0);
    CHECK(butler_volmer_current(0.0, t_ref_k, 0.5, 0.5, 0.21, p, Electrode::anode) == 0.0);
}

TEST_CASE("butler-volmer is odd and increasing at reference composition") {
    const CellParameters p;
    double prev = butler_volmer_current(-0.3, t_ref_k, 0.5, 0.5, 0.21, p, Electrode::cathode);
    for (double eta = -0.25; eta <= 0.3001; eta += 0.05) {
        const double cur =
            butler_volmer_current(eta, t_ref_k, 0.5, 0.5, 0.21, p, Electrode::cathode);
        CHECK(cur > prev);
        prev = cur;
    }
    const double fwd = butler_volmer_current(0.2, t_ref_k, 0.5, 0.5, 0.21, p, Electrode::cathode);
    const double bwd =
        butler_volmer_current(-0.2, t_ref_k, 0.5, 0.5, 0.21, p, Electrode::cathode);
    CHECK(fwd + bwd == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("butler-volmer scales with the exchange prefactor") {
    CellParameters p;
    const double base = butler_volmer_current(0.1, t_ref_k, 0.5, 0.5, 0.21, p, Electrode::anode);
    p.i0_a_pre *= 2.0;
    const double doubled =
        butler_volmer_current(0.1, t_ref_k, 0.5, 0.5, 0.21, p, Electrode::anode);
    CHECK(doubled == doctest::Approx(2.0 * base).epsilon(1e-12));
}

TEST_CASE("segment polarization is zero at and below open circuit") {
    const CellParameters p;
    const double ocv = nernst_potential(t_ref_k, 0.5, 0.5, 0.21, constants::p_atm, p);
    CHECK(segment_polarization(ocv, t_ref_k, 0.5, 0.5, 0.21, p) == 0.0);
    CHECK(segment_polarization(ocv - 0.2, t_ref_k, 0.5, 0.5, 0.21, p) == 0.0);
}

TEST_CASE("segment polarization grows with voltage and respects the transport ceiling") {
    const CellParameters p;
    double prev = 0.0;
    for (double v = 1.0; v <= 1.7001; v += 0.1) {
        const double i = segment_polarization(v, t_ref_k, 0.5, 0.5, 0.21, p);
        CHECK(i >= prev);
        prev = i;
    }
    const double cap = p.k_conc * 0.5 * p.seg_area;  // A at this mean steam fraction
    const double i_hi = segment_polarization(2.5, t_ref_k, 0.5, 0.5, 0.21, p);
    CHECK(i_hi < cap);
    CHECK(i_hi > 0.9 * cap);
    CHECK(segment_polarization(3.0, t_ref_k, 0.5, 0.5, 0.21, p) > i_hi);
}

TEST_CASE("reference scenarios carry the instrumented conditions") {
    const OperatingPoint c1 = scenario_condition1(1.5);
    CHECK(c1.t_fur == 660.0);
    CHECK(c1.q_air == 400.0);
    CHECK(c1.q_st == 40.0);
    CHECK(c1.v_cell == 1.5);
    const OperatingPoint c2 = scenario_condition2(1.2);
    CHECK(c2.q_st == 120.0);
    CHECK(c2.t_fur == 660.0);
}

TEST_CASE("validity box: study ranges plus margin, wide air lane") {
    std::string why;
    OperatingPoint op;
    CHECK(operating_point_valid(op));

    op.t_fur = 590.0;  // inside the 10% span margin
    CHECK(operating_point_valid(op));
    op.t_fur = 580.0;
    CHECK(!operating_point_valid(op, &why));
    CHECK(!why.empty());

    op = OperatingPoint{};
    op.q_air = 400.0;  // the scenarios feed 400 sccm
    CHECK(operating_point_valid(op));
    op.q_air = 501.0;
    CHECK(!operating_point_valid(op));
    op.q_air = 0.0;
    CHECK(!operating_point_valid(op));

    op = OperatingPoint{};
    op.v_cell = 1.76;
    CHECK(operating_point_valid(op));
    op.v_cell = 1.78;
    CHECK(!operating_point_valid(op));
}

TEST_CASE("simulate_cell rejects an out-of-box point") {
    OperatingPoint op;
    op.t_fur = 500.0;
    CHECK_THROWS_AS(simulate_cell(op, CellParameters{}), std::invalid_argument);
}

TEST_CASE("condition 1 at 1.5 V: converged, ordered, conserved") {
    const CellParameters p;
    const OperatingPoint op = scenario_condition1(1.5);
    const CellSolution sol = simulate_cell_states(op, p);

    CHECK(sol.iterations <= 200);
    const CellResponse& r = sol.response;
    CHECK(r.i_up > r.i_mid);
    CHECK(r.i_mid > r.i_down);
    CHECK(r.i_total() == doctest::Approx(4.509).epsilon(2e-3));

    // per-segment demand identity at the converged temperatures
    for (int k = 0; k < 3; ++k) {
        const SegmentState& s = sol.seg[k];
        REQUIRE(s.i > 0.0);
        const double demand = s.e_ref + s.eta_a + s.eta_c +
                              (s.i / p.seg_area) * series_resistance(s.t_k, p);
        CHECK(demand == doctest::Approx(op.v_cell).epsilon(1e-7));
    }

    // steam bookkeeping marches segment to segment
    const double n_st = sccm_to_mol_per_s(op.q_st);
    const double n_cath = 2.0 * n_st;
    CHECK(sol.seg[0].x_h2o_in == doctest::Approx(0.5).epsilon(1e-12));
    for (int k = 0; k < 3; ++k) {
        const SegmentState& s = sol.seg[k];
        const double expected_out =
            s.x_h2o_in - s.i / (2.0 * constants::faraday * n_cath);
        CHECK(s.x_h2o_out == doctest::Approx(expected_out).epsilon(1e-12));
        if (k < 2) CHECK(sol.seg[k + 1].x_h2o_in == doctest::Approx(s.x_h2o_out).epsilon(1e-12));
        CHECK(s.x_o2_out > s.x_o2_in);  // anode keeps making oxygen
    }

    // total current equals the steam actually consumed
    const double consumed = n_cath * (0.5 - sol.seg[2].x_h2o_out);
    CHECK(r.i_total() ==
          doctest::Approx(2.0 * constants::faraday * consumed).epsilon(1e-10));

    // heat balance closes at the converged state
    for (int k = 0; k < 3; ++k)
        CHECK(std::fabs(sol.thermal_residual(k, op, p)) < 1e-6);
}

TEST_CASE("electrolysis below the thermoneutral voltage cools the cell") {
    const CellParameters p;
    OperatingPoint op = scenario_condition2(1.2);
    const CellSolution sol = simulate_cell_states(op, p);
    CHECK(sol.response.i_total() > 0.1);
    // entropy uptake beats the irreversibilities at 1.2 V
    CHECK(sol.response.t_min < op.t_fur);

    op.v_cell = 1.7;
    const CellSolution hot = simulate_cell_states(op, p);
    CHECK(hot.response.t_max > op.t_fur);
}

TEST_CASE("open circuit: zero currents, uniform furnace temperature") {
    const CellParameters p;
    // 0.94 V sits inside the validity margin yet below the 0.959 V
    // reversible potential at 660 C, so no segment can draw current
    const OperatingPoint op = scenario_condition1(0.94);
    const CellSolution sol = simulate_cell_states(op, p);
    CHECK(sol.response.i_up == 0.0);
    CHECK(sol.response.i_mid == 0.0);
    CHECK(sol.response.i_down == 0.0);
    CHECK(std::fabs(sol.response.t_max - op.t_fur) < 1e-6);
    CHECK(std::fabs(sol.response.t_min - op.t_fur) < 1e-6);
}

TEST_CASE("warm start converges to the cold-start fixed point") {
    const CellParameters p;
    const OperatingPoint op = scenario_condition2(1.45);
    const CellSolution cold = simulate_cell_states(op, p);

    OperatingPoint nearby = op;
    nearby.v_cell = 1.44;
    const CellSolution seed = simulate_cell_states(nearby, p);
    const CellSolution warm = simulate_cell_states(op, p, &seed);

    CHECK(warm.response.i_up == doctest::Approx(cold.response.i_up).epsilon(1e-7));
    CHECK(warm.response.i_down == doctest::Approx(cold.response.i_down).epsilon(1e-7));
    CHECK(warm.response.t_max == doctest::Approx(cold.response.t_max).epsilon(1e-9));
}

TEST_CASE("low steam feed starves the sweep only under the arithmetic closure") {
    CellParameters p;
    p.mean_rule = CompositionMean::arithmetic;
    OperatingPoint op;
    op.t_fur = 750.0;
    op.q_air = 100.0;
    op.q_st = 20.0;
    op.v_cell = 1.7;
    bool starved = false;
    try {
        simulate_cell_states(op, p);
    } catch (const starvation_error& e) {
        starved = true;
        CHECK(e.segment >= 0);
        CHECK(e.segment <= 2);
    }
    CHECK(starved);

    // the log-mean closure self-limits at the same point
    p.mean_rule = CompositionMean::log_mean;
    const CellSolution sol = simulate_cell_states(op, p);
    const double i_max = 2.0 * constants::faraday * sccm_to_mol_per_s(op.q_st);
    CHECK(sol.response.i_total() < i_max);
    CHECK(sol.response.i_total() > 0.8 * i_max);  // deep utilization, not full conversion
}

TEST_CASE("iv sweep records the condition contrast") {
    const CellParameters p;
    const auto low = iv_sweep(660.0, 400.0, 40.0, 1.0, 1.7, 15, p);
    REQUIRE(low.size() == 15);
    for (const auto& pt : low) CHECK(pt.ok);

    // high voltage, low feed: the last segment stops gaining current
    bool down_declines = false;
    for (std::size_t k = 1; k < low.size(); ++k)
        if (low[k].v_cell > 1.5 &&
            low[k].response.i_down <= low[k - 1].response.i_down + 1e-12)
            down_declines = true;
    CHECK(down_declines);

    const auto high = iv_sweep(660.0, 400.0, 120.0, 1.0, 1.7, 15, p);
    for (std::size_t k = 1; k < high.size(); ++k)
        CHECK(high[k].response.i_down >= high[k - 1].response.i_down - 1e-9);
}

TEST_CASE("instrumented anchor point") {
    const CellParameters p;
    OperatingPoint op;
    op.t_fur = 720.0;
    op.q_air = 400.0;  // the instrumented cell always feeds 400 sccm air
    op.q_st = 76.6;
    op.v_cell = 1.42;
    const CellResponse r = simulate_cell(op, p);
    const PerformanceIndices pi = performance_indices(op, r);
    CHECK(pi.su == doctest::Approx(0.70).epsilon(0.02));
    CHECK(r.i_total() == doctest::Approx(7.05).epsilon(0.02));
}

TEST_CASE("parameter file round trip and config sync") {
    const CellParameters defaults;
    const fs::path tmp = fs::temp_directory_path() / "soec_params_roundtrip.conf";
    save_cell_parameters(defaults, tmp);
    const CellParameters back = load_cell_parameters(tmp);
    CHECK(back.i0_a_pre == defaults.i0_a_pre);
    CHECK(back.e_act_c == defaults.e_act_c);
    CHECK(back.k_conc == defaults.k_conc);
    CHECK(back.h_air == defaults.h_air);
    CHECK(back.mean_rule == defaults.mean_rule);

    // the checked-in parameter file matches the built-in defaults
    const CellParameters repo =
        load_cell_parameters(fs::path(SOEC_SOURCE_DIR) / "config" / "cell_params.conf");
    CHECK(repo.e_ref_0 == defaults.e_ref_0);
    CHECK(repo.alpha == defaults.alpha);
    CHECK(repo.i0_a_pre == defaults.i0_a_pre);
    CHECK(repo.i0_c_pre == defaults.i0_c_pre);
    CHECK(repo.e_act_a == defaults.e_act_a);
    CHECK(repo.e_act_c == defaults.e_act_c);
    CHECK(repo.asr_ohm_pre == defaults.asr_ohm_pre);
    CHECK(repo.e_act_ohm == defaults.e_act_ohm);
    CHECK(repo.k_conc == defaults.k_conc);
    CHECK(repo.delta_s_r == defaults.delta_s_r);
    CHECK(repo.h_fur == defaults.h_fur);
    CHECK(repo.k_axial == defaults.k_axial);
    CHECK(repo.h_air == defaults.h_air);
    CHECK(repo.seg_area == defaults.seg_area);
    CHECK(repo.mean_rule == defaults.mean_rule);
}

TEST_CASE("unknown parameter keys are rejected") {
    const fs::path tmp = fs::temp_directory_path() / "soec_params_unknown.conf";
    std::ofstream(tmp) << "alpha = 0.5\nnot_a_parameter = 1\n";
    CHECK_THROWS_AS(load_cell_parameters(tmp), std::invalid_argument);
}

TEST_CASE("parameter validation") {
    CellParameters p;
    p.k_conc = -1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = CellParameters{};
    p.alpha = 1.2;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = CellParameters{};
    p.seg_area = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
