#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "soec/optimize.hpp"

// LINMAP selection on a computed front: min-max normalize each objective over
// the efficient set, measure the weighted Euclidean distance to the ideal
// corner, and pick the closest solution. Objective order everywhere:
//   ih_i, ih_t, v_cell, su, t_fur, i_tot
// with su and i_tot maximized (ideal 1 after normalization) and the other
// four minimized (ideal 0).

namespace soec {

inline constexpr int n_objectives = 6;
inline constexpr std::array<const char*, n_objectives> objective_names{
    "ih_i", "ih_t", "v_cell", "su", "t_fur", "i_tot"};
inline constexpr std::array<bool, n_objectives> objective_maximized{
    false, false, false, true, false, true};

struct WeightVector {
    std::array<double, n_objectives> w{1, 1, 1, 1, 1, 1};

    static WeightVector equal();            // case 1: every objective weight 1
    static WeightVector utilization_heavy(); // case 2: su weighted 5, others 1
};

std::array<double, n_objectives> objective_values(const ParetoSolution& s);

// Normalized coordinates of the efficient set, row per solution, same order
// as ParetoFront::efficient(). A degenerate objective (span < 1e-12) maps to
// 0.5 for every solution so it cannot steer the distance.
std::vector<std::array<double, n_objectives>> linmap_normalize(const ParetoFront& front);

struct LinmapChoice {
    std::size_t efficient_index = 0;        // into ParetoFront::efficient()
    const ParetoSolution* solution = nullptr;
    double d = 0.0;                         // its distance to the ideal corner
    std::vector<double> d_all;              // distance per efficient solution
};

// Throws std::invalid_argument when the front has no efficient solution.
// Ties break to the lowest su grid index, then the lowest t_fur grid index.
LinmapChoice linmap_select(const ParetoFront& front, const WeightVector& w);

struct CurvePoint {
    double p_ele = 0.0;
    ParetoSolution chosen;
    double d = 0.0;
};

struct OperatingCurve {
    WeightVector weights;
    std::vector<CurvePoint> points;               // one per power with an efficient set
    std::vector<double> skipped_powers;           // fronts that had none
};

OperatingCurve operating_curve(const std::vector<ParetoFront>& fronts, const WeightVector& w);

// p_ele_W,t_fur_C,su,q_st_sccm,v_cell_V,i_tot_A,ih_i,ih_t_C,d
void save_curve_csv(const OperatingCurve& curve, const std::filesystem::path& file);

// Per-power best/worst envelope of each objective over the efficient set
// (best = value closest to that objective's optimum direction).
void save_envelope_csv(const std::vector<ParetoFront>& fronts, const std::filesystem::path& best_file,
                       const std::filesystem::path& worst_file);

}  // namespace soec
