#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "soec/core.hpp"
#include "soec/dataset.hpp"
#include "soec/parallel.hpp"

// One-hidden-layer sigmoid networks trained by Levenberg-Marquardt, one
// network per cell output. Inputs and targets are affinely scaled to [-1, 1]
// from the training split; models store the scaling so prediction works in
// physical units.

namespace soec {

struct MlpModel {
    int n_in = 4;
    int n_hidden = 0;
    // Row-major hidden weights [n_hidden x n_in], hidden biases, output
    // weights, output bias, in parameter-vector order.
    std::vector<double> w_in;
    std::vector<double> b_in;
    std::vector<double> w_out;
    double b_out = 0.0;
    std::array<double, 4> in_lo{}, in_hi{};
    double out_lo = 0.0, out_hi = 1.0;

    double predict(const std::array<double, 4>& x) const;  // physical units
    double predict_scaled(const double* xs) const;          // scaled in, scaled out
    std::array<double, 4> scale_input(const std::array<double, 4>& x) const;

    std::size_t parameter_count() const {
        return static_cast<std::size_t>(n_hidden) * (n_in + 2) + 1;
    }
};

struct TrainOptions {
    int max_epochs = 500;
    double grad_tol = 1e-8;      // stop when ||J^T r||_inf drops below
    double lambda0 = 1e-3;
    double lambda_max = 1e10;    // stop when the damping blows past
    int restarts = 3;            // independent inits, best test RMSE wins
};

struct TrainReport {
    double train_rmse = 0.0;  // scaled units
    double test_rmse = 0.0;   // scaled units
    double r2_test = 0.0;     // physical units, 1 - SSE/SST on the test split
    int epochs = 0;
    int restart = -1;         // which init won
    bool size_warning = false;  // train split under 10x parameter count
};

// Cell outputs in network order.
std::array<double, 5> response_as_array(const CellResponse& r);
CellResponse response_from_array(const std::array<double, 5>& y);

struct SurrogateEnsemble {
    static constexpr std::array<int, 5> default_hidden{10, 10, 10, 5, 5};
    std::array<MlpModel, 5> nets;  // t_max, t_min, i_up, i_mid, i_down

    CellResponse predict(const OperatingPoint& op) const;
};

// Trains one network on explicit rows (x in physical units, y one target).
// Initial weights are uniform [-0.5, 0.5] from the seed; restarts use seeds
// derived from it. Deterministic in (rows, seed, options).
MlpModel train_lm(std::span<const std::array<double, 4>> x_train, std::span<const double> y_train,
                  std::span<const std::array<double, 4>> x_test, std::span<const double> y_test,
                  int n_hidden, std::uint64_t seed, const TrainOptions& opt = {},
                  TrainReport* report = nullptr);

// Five networks; restarts of all outputs run as one parallel job list.
SurrogateEnsemble train_ensemble(const Dataset& ds, std::uint64_t seed,
                                 const TrainOptions& opt = {},
                                 par::Exec exec = par::Exec::parallel,
                                 std::array<TrainReport, 5>* reports = nullptr);

// Versioned JSON model file; doubles survive exactly. Truncated or
// malformed files fail with the parse position; a version mismatch or a
// parameter-count mismatch is rejected before use.
void save_model(const SurrogateEnsemble& e, const std::filesystem::path& file);
SurrogateEnsemble load_model(const std::filesystem::path& file);

namespace detail {

// Parameter-vector view used by the trainer and the derivative tests.
std::vector<double> pack(const MlpModel& m);
void unpack(MlpModel& m, std::span<const double> theta);

// Row of d(prediction)/d(theta) at scaled input xs.
void jacobian_row(const MlpModel& m, const double* xs, double* out);

// Reference assembly of the normal equations (naive triple loop); the
// production path vectorizes with Eigen. Tests compare the two.
void normal_equations_reference(std::span<const double> jac, std::span<const double> res,
                                std::size_t n_rows, std::size_t n_par, std::vector<double>& jtj,
                                std::vector<double>& jtr);

}  // namespace detail

}  // namespace soec
