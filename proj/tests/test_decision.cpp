#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "soec/decision.hpp"

using namespace soec;
namespace fs = std::filesystem;

namespace {

ParetoSolution sol(double ihi, double iht, double v, double su, double t, double itot,
                   int it = 0, int js = 0, bool feasible = true) {
    ParetoSolution s;
    s.p_ele = 10.0;
    s.ih_i = ihi;
    s.ih_t = iht;
    s.v_cell = v;
    s.su = su;
    s.t_fur = t;
    s.i_tot = itot;
    s.q_st = 80.0;
    s.it = it;
    s.js = js;
    s.feasible = feasible;
    s.dominated = false;
    return s;
}

// three-way trade-off used across the cases below:
//   A: strong everywhere but utilization, hot furnace
//   B: cool furnace, weak everywhere else
//   C: top utilization at middling cost
ParetoFront tradeoff_front() {
    ParetoFront f;
    f.p_ele = 10.0;
    f.nodes = {
        sol(0.2, 1.0, 1.40, 0.65, 700, 7.0, 0, 0),
        sol(0.4, 3.0, 1.50, 0.60, 600, 5.0, 1, 1),
        sol(0.3, 2.0, 1.45, 0.90, 700, 6.0, 2, 2),
        sol(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 3, 3, false),
    };
    return f;
}

}  // namespace

TEST_CASE("weight presets") {
    const WeightVector eq = WeightVector::equal();
    for (double w : eq.w) CHECK(w == 1.0);
    const WeightVector heavy = WeightVector::utilization_heavy();
    CHECK(heavy.w[3] == 5.0);  // su slot
    for (int m = 0; m < 6; ++m)
        if (m != 3) CHECK(heavy.w[m] == 1.0);
}

TEST_CASE("objective extraction follows the canonical order") {
    const ParetoSolution s = sol(0.31, 1.7, 1.42, 0.7, 720, 7.05);
    const auto v = objective_values(s);
    CHECK(v[0] == 0.31);
    CHECK(v[1] == 1.7);
    CHECK(v[2] == 1.42);
    CHECK(v[3] == 0.7);
    CHECK(v[4] == 720);
    CHECK(v[5] == 7.05);
    CHECK(std::string(objective_names[0]) == "ih_i");
    CHECK(std::string(objective_names[5]) == "i_tot");
    CHECK(objective_maximized[3]);
    CHECK(objective_maximized[5]);
    CHECK(!objective_maximized[4]);
}

TEST_CASE("normalization maps extremes to 0 and 1") {
    const ParetoFront f = tradeoff_front();
    const auto norm = linmap_normalize(f);
    REQUIRE(norm.size() == 3);  // the infeasible node is excluded

    // solution A holds the best ih_i/ih_t/v_cell/i_tot, B the best t_fur
    CHECK(norm[0][0] == doctest::Approx(0.0));
    CHECK(norm[1][0] == doctest::Approx(1.0));
    CHECK(norm[2][0] == doctest::Approx(0.5));
    CHECK(norm[0][4] == doctest::Approx(1.0));
    CHECK(norm[1][4] == doctest::Approx(0.0));
    CHECK(norm[0][3] == doctest::Approx((0.65 - 0.60) / 0.30));
    CHECK(norm[2][3] == doctest::Approx(1.0));
    CHECK(norm[0][5] == doctest::Approx(1.0));
    CHECK(norm[2][5] == doctest::Approx(0.5));
}

TEST_CASE("a degenerate objective is pinned to one half") {
    ParetoFront f;
    f.p_ele = 10.0;
    f.nodes = {sol(0.2, 1.0, 1.4, 0.7, 650, 6.5, 0, 0),
               sol(0.3, 2.0, 1.5, 0.8, 700, 6.5, 1, 1)};
    const auto norm = linmap_normalize(f);
    CHECK(norm[0][5] == 0.5);
    CHECK(norm[1][5] == 0.5);
}

TEST_CASE("equal weights pick the balanced solution with a hand-checked distance") {
    const ParetoFront f = tradeoff_front();
    const LinmapChoice choice = linmap_select(f, WeightVector::equal());

    CHECK(choice.efficient_index == 0);
    REQUIRE(choice.solution != nullptr);
    CHECK(choice.solution->su == 0.65);

    // d_A = sqrt((1/6 - 1)^2 + 1) = sqrt(61)/6, with distances for B and C
    // of sqrt(5) and sqrt(2)
    CHECK(choice.d == doctest::Approx(std::sqrt(61.0) / 6.0).epsilon(1e-12));
    REQUIRE(choice.d_all.size() == 3);
    CHECK(choice.d_all[1] == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
    CHECK(choice.d_all[2] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("utilization-heavy weights switch the pick") {
    const ParetoFront f = tradeoff_front();
    const LinmapChoice choice = linmap_select(f, WeightVector::utilization_heavy());
    CHECK(choice.efficient_index == 2);
    CHECK(choice.solution->su == 0.90);
    CHECK(choice.d == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("ties break to the lower su index, then the lower t index") {
    ParetoFront f;
    f.p_ele = 10.0;
    // identical objective vectors on different grid nodes
    f.nodes = {sol(0.3, 2.0, 1.45, 0.7, 650, 6.0, 0, 1),
               sol(0.3, 2.0, 1.45, 0.7, 650, 6.0, 1, 0),
               sol(0.3, 2.0, 1.45, 0.7, 650, 6.0, 2, 0)};
    const LinmapChoice choice = linmap_select(f, WeightVector::equal());
    CHECK(choice.solution->js == 0);
    CHECK(choice.solution->it == 1);
}

TEST_CASE("an empty efficient set cannot be decided") {
    ParetoFront f;
    f.p_ele = 40.0;
    f.nodes = {sol(0, 0, 0, 0, 0, 0, 0, 0, false)};
    CHECK_THROWS_AS(linmap_select(f, WeightVector::equal()), std::invalid_argument);
}

TEST_CASE("operating curve records skipped powers") {
    std::vector<ParetoFront> fronts;
    fronts.push_back(tradeoff_front());
    ParetoFront empty;
    empty.p_ele = 60.0;
    empty.nodes = {sol(0, 0, 0, 0, 0, 0, 0, 0, false)};
    fronts.push_back(empty);

    const OperatingCurve curve = operating_curve(fronts, WeightVector::equal());
    REQUIRE(curve.points.size() == 1);
    CHECK(curve.points[0].p_ele == 10.0);
    CHECK(curve.points[0].chosen.su == 0.65);
    CHECK(curve.points[0].d == doctest::Approx(std::sqrt(61.0) / 6.0));
    REQUIRE(curve.skipped_powers.size() == 1);
    CHECK(curve.skipped_powers[0] == 60.0);
}

TEST_CASE("curve and envelope files carry the documented headers") {
    std::vector<ParetoFront> fronts{tradeoff_front()};
    const OperatingCurve curve = operating_curve(fronts, WeightVector::equal());

    const fs::path cfile = fs::temp_directory_path() / "soec_curve.csv";
    save_curve_csv(curve, cfile);
    std::ifstream cin_(cfile);
    std::string line;
    std::getline(cin_, line);
    CHECK(line == "p_ele_W,t_fur_C,su,q_st_sccm,v_cell_V,i_tot_A,ih_i,ih_t_C,d");
    std::size_t rows = 0;
    while (std::getline(cin_, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 1);

    const fs::path bfile = fs::temp_directory_path() / "soec_env_best.csv";
    const fs::path wfile = fs::temp_directory_path() / "soec_env_worst.csv";
    save_envelope_csv(fronts, bfile, wfile);
    std::ifstream bin_(bfile);
    std::getline(bin_, line);
    CHECK(line == "p_ele_W,ih_i,ih_t_C,v_cell_V,su,t_fur_C,i_tot_A");

    // best row holds each objective's optimum over the efficient set
    std::getline(bin_, line);
    CHECK(line.substr(0, 3) == "10,");
    CHECK(line.find(",0.2,") != std::string::npos);   // ih_i best
    CHECK(line.find(",0.9,") != std::string::npos);   // su best
    std::ifstream win_(wfile);
    std::getline(win_, line);
    std::getline(win_, line);
    CHECK(line.find(",0.4,") != std::string::npos);   // ih_i worst
    CHECK(line.find(",0.6,") != std::string::npos);   // su worst
}
