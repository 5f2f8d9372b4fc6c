#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "soec/core.hpp"
#include "soec/parallel.hpp"
#include "soec/surrogate.hpp"

// Constrained multi-objective exploration on the trained surrogate. The
// power constraint v_cell * i_total = p_ele and a steam-utilization target
// reduce the free inputs to a (t_fur, su) grid; each feasible node is scored
// on six objectives (ih_i, ih_t, v_cell minimized; su, i_total maximized;
// t_fur minimized) and strictly dominated nodes are flagged.

namespace soec {

struct GridSpec {
    double t_lo = 600.0, t_hi = 750.0, t_step = 10.0;     // C
    double su_lo = 0.50, su_hi = 0.90, su_step = 0.025;
    double q_air = 100.0;                                  // sccm, held fixed

    int t_count() const;
    int su_count() const;
    double t_at(int i) const { return t_lo + i * t_step; }
    double su_at(int j) const { return su_lo + j * su_step; }
};

struct NewtonResult {
    double v_cell = 0.0;
    double q_st = 0.0;
    double res_p = 0.0;    // power residual, W
    double res_su = 0.0;   // utilization residual
    int iters = 0;
    bool converged = false;
    bool in_bounds = false;

    bool feasible() const { return converged && in_bounds; }
};

// Root of su(v) = su_target at fixed flows and furnace setpoint, bracketed on
// the voltage range; empty when the target is not reachable inside it.
std::optional<double> solve_vcell_for_su(const SurrogateEnsemble& ens, double t_fur_c,
                                         double q_air, double q_st, double su_target,
                                         const InputRanges& ranges);

// Damped Newton on (v_cell, q_st) for the two constraints
//   v_cell * i_total = p_ele     and     su = su_target,
// forward-difference Jacobian with steps of 1e-4 of each range span, step
// halving until the residual norm decreases, iterates clamped to the box,
// at most 100 iterations per start, multi-start from the four box corners.
// Feasible = converged to |res_p| <= 1e-6 * max(1, p_ele), |res_su| <= 1e-6,
// strictly inside the box (boundary-pinned roots are reported infeasible).
NewtonResult solve_constrained(const SurrogateEnsemble& ens, double t_fur_c, double su_target,
                               double p_ele, double q_air, const InputRanges& ranges);

struct ContourPoint {
    double t_fur = 0.0, q_st = 0.0;   // grid location
    double su = 0.0;
    double v_cell = 0.0, ih_t = 0.0, ih_i = 0.0, q_h2 = 0.0;
    bool feasible = false;
};

// Maps v_cell, ih_t, ih_i and hydrogen production over a t_fur x q_st grid at
// one utilization target (operating maps at constant su).
std::vector<ContourPoint> contour_scan(const SurrogateEnsemble& ens, const InputRanges& ranges,
                                       double su_target, double q_air, int nt, int nq,
                                       par::Exec exec = par::Exec::parallel);

void save_contour_csv(const std::vector<ContourPoint>& pts, const std::filesystem::path& file);

struct ParetoSolution {
    double p_ele = 0.0;
    double t_fur = 0.0;     // C
    double su = 0.0;
    double q_st = 0.0;      // sccm
    double v_cell = 0.0;    // V
    double i_tot = 0.0;     // A
    double ih_i = 0.0;
    double ih_t = 0.0;      // C
    int it = 0, js = 0;     // grid indices (t axis, su axis)
    bool feasible = false;
    bool dominated = false;
};

struct ParetoFront {
    double p_ele = 0.0;
    GridSpec grid;
    std::vector<ParetoSolution> nodes;  // full grid, row-major over (it, js)

    std::vector<const ParetoSolution*> efficient() const;  // feasible && !dominated
};

// Solves every grid node at one power level and applies strict-dominance
// filtering with tolerance 1e-9 (a node is dominated when another feasible
// node is at least as good in all six objectives and better by more than the
// tolerance in one).
ParetoFront build_front(const SurrogateEnsemble& ens, double p_ele, const GridSpec& grid,
                        const InputRanges& ranges, par::Exec exec = par::Exec::parallel);

// One front per power level p_lo, p_lo + p_step, ..., <= p_hi. Power levels
// with no feasible node produce an empty-efficient front (kept, logged by
// the caller), and the sweep continues.
std::vector<ParetoFront> sweep_power(const SurrogateEnsemble& ens, double p_lo, double p_hi,
                                     double p_step, const GridSpec& grid,
                                     const InputRanges& ranges,
                                     par::Exec exec = par::Exec::parallel);

// p_ele_W,t_fur_C,su,q_st_sccm,v_cell_V,i_tot_A,ih_i,ih_t_C,feasible,dominated
void save_fronts_csv(const std::vector<ParetoFront>& fronts, const std::filesystem::path& file);
std::vector<ParetoFront> load_fronts_csv(const std::filesystem::path& file);

}  // namespace soec
