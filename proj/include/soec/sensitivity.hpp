#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "soec/core.hpp"
#include "soec/parallel.hpp"
#include "soec/surrogate.hpp"

// Variance-based global sensitivity: first-order and total Sobol indices via
// the Saltelli A/B/A_B^(i) design. The two sample matrices come from one
// 2k-dimensional digital net (columns 0..k-1 form A, k..2k-1 form B), and the
// estimators are
//   V_i  = (1/n) sum f(B) (f(A_B^i) - f(A))
//   VT_i = (1/2n) sum (f(A) - f(A_B^i))^2
// with the model evaluated n (k + 2) times. All reductions are pairwise sums
// in index order, so results do not depend on evaluation order.

namespace soec {

struct SobolResult {
    std::vector<double> s;    // first-order indices
    std::vector<double> st;   // total indices
    double var_y = 0.0;
    std::size_t n_base = 0;
};

// Generic k-dimensional driver over an axis-aligned box. Throws
// std::invalid_argument when Var(Y) < 1e-14 (constant function) or on an
// empty/inverted box.
SobolResult sobol_indices_nd(const std::function<double(std::span<const double>)>& f,
                             std::span<const double> lo, std::span<const double> hi,
                             std::size_t n_base, std::uint64_t seed,
                             par::Exec exec = par::Exec::parallel);

// Four-input wrapper over the study box, argument order t_fur, q_air, q_st, v_cell.
SobolResult sobol_indices(const std::function<double(const std::array<double, 4>&)>& f,
                          const InputRanges& ranges, std::size_t n_base, std::uint64_t seed,
                          par::Exec exec = par::Exec::parallel);

// Index table for the three steering quantities su, ih_i, ih_t evaluated on
// the surrogate ensemble at fixed hydrogen-carrier convention.
struct IndexReport {
    static constexpr std::array<const char*, 3> targets{"su", "ih_i", "ih_t"};
    static constexpr std::array<const char*, 4> inputs{"t_fur", "q_air", "q_st", "v_cell"};
    std::array<SobolResult, 3> result;  // per target
    std::size_t n_base = 0;
    std::uint64_t seed = 0;
};

IndexReport index_report(const SurrogateEnsemble& ens, const InputRanges& ranges,
                         std::size_t n_base, std::uint64_t seed,
                         par::Exec exec = par::Exec::parallel);

// CSV layout: target,index,t_fur,q_air,q_st,v_cell with one s and one st row
// per target.
void save_index_report_csv(const IndexReport& rpt, const std::filesystem::path& file);

namespace detail {

// Plain-loop reference estimator (naive accumulation, same sample plan);
// tests compare it against the kernelized path.
SobolResult sobol_indices_reference(const std::function<double(std::span<const double>)>& f,
                                    std::span<const double> lo, std::span<const double> hi,
                                    std::size_t n_base, std::uint64_t seed);

}  // namespace detail

}  // namespace soec
