#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "soec/core.hpp"

// Reduced-order steady-state model of a three-segment solid oxide
// electrolysis cell. Each segment is a stirred cell: Butler-Volmer kinetics
// and the reversible potential are evaluated at a mean channel composition,
// a flow-independent transport ceiling caps the current density at
// k_conc * x_h2o, steam is depleted segment to segment by Faraday's law, and
// segment temperatures satisfy a furnace/conduction/air heat balance. The
// model is the ground-truth generator for the surrogate pipeline; its
// parameters are tuned so the two reference scenarios reproduce the
// qualitative segment behaviour of the instrumented cell (down-stream
// current starving at low steam feed and high voltage, no starvation at high
// feed, transport-limited totals at high voltage).

namespace soec {

enum class Electrode { anode, cathode };

// Mean-of-inlet/outlet rule for the composition a segment is evaluated at.
// log_mean self-limits: it drives the mean steam fraction to zero as the
// outlet fraction does, so converged currents never overdraw the feed.
// arithmetic stays positive until twice the available steam is drawn and can
// therefore starve; it is kept as a switch for closure comparisons.
enum class CompositionMean { arithmetic, log_mean };

struct CellParameters {
    double e_ref_0 = 0.99;        // V, reversible potential at reference composition
    double alpha = 0.5;           // charge-transfer coefficient, both electrodes
    double i0_a_pre = 3.6e9;      // A/m2, anode exchange-current prefactor
    double i0_c_pre = 7.1e8;      // A/m2, cathode exchange-current prefactor
    double e_act_a = 1.05e5;      // J/mol, anode activation energy
    double e_act_c = 0.95e5;      // J/mol, cathode activation energy
    double asr_ohm_pre = 7.6e-9;  // ohm m2, series resistance prefactor
    double e_act_ohm = 6.0e4;     // J/mol, resistance activation (grows as T falls)
    double k_conc = 6.0e4;        // A/m2 per unit steam fraction: cathode transport
                                  //   ceiling, independent of flow rate and temperature
    double delta_s_r = 55.4;      // J/(mol K), reaction entropy, electrolysis direction
    double h_fur = 1200.0;        // W/(m2 K), effective furnace exchange per active area
    double k_axial = 0.20;        // W/K, segment-to-segment conduction
    double h_air = 2.0e-5;        // W/(K sccm), heat picked up by the air stream
    double seg_area = 2.4e-4;     // m2, one third of the 48 x 15 mm active area
    double x_ref_h2 = 0.5;        // reference fractions the exchange currents
    double x_ref_h2o = 0.5;       //   were fitted at (50/50 steam/hydrogen feed,
    double x_ref_o2 = 0.21;       //   dry air on the anode)
    CompositionMean mean_rule = CompositionMean::log_mean;

    // Throws std::invalid_argument on a non-positive entry or alpha outside (0, 1).
    void validate() const;
};

// Built-in defaults are identical to config/cell_params.conf; a unit test
// keeps the two in sync. Unknown keys are errors, missing keys keep defaults.
CellParameters load_cell_parameters(const std::filesystem::path& file);
void save_cell_parameters(const CellParameters& p, const std::filesystem::path& file);

// Arrhenius exchange current density (A/m2) and area-specific series
// resistance (ohm m2) at segment temperature t_k.
double exchange_current_density(double t_k, Electrode e, const CellParameters& p);
double series_resistance(double t_k, const CellParameters& p);

// Reversible cell potential at local composition, electrolysis direction:
//   e_ref_0 + (RT/4F) ln(x_o2 p_a/p_atm) + (RT/2F) ln(x_h2/x_h2o).
// Consuming steam raises it, which is what makes the last-fed segment the
// weakest. Inputs are mole fractions in (0, 1]; p_anode in Pa.
double nernst_potential(double t_k, double x_h2o, double x_h2, double x_o2, double p_anode,
                        const CellParameters& p);

// Electrode current density (A/m2) at signed activation overpotential eta.
// Forward direction is fuel-cell operation (H2 oxidation / O2 reduction);
// electrolysis runs on the negative branch. Zero at eta = 0 when the local
// fractions equal the reference fractions; strictly increasing in eta;
// proportional to the exchange prefactor.
double butler_volmer_current(double eta, double t_k, double x_h2o, double x_h2, double x_o2,
                             const CellParameters& p, Electrode e);

// Electrolysis current of one segment (A, >= 0) at applied voltage v_cell and
// fixed mean composition: solves
//   v_cell = E_ref + u_c(i) + u_a(i) + i * ASR(t_k)/seg_area
// where u are the electrolysis overpotential magnitudes inverting the
// Butler-Volmer law analytically. u_c additionally carries the cathode
// concentration loss -(RT/2F) ln(1 - j/(k_conc x_h2o)), which caps the
// current density at the steam-transport ceiling k_conc x_h2o no matter the
// voltage. Returns 0 at or below the local open-circuit voltage. Throws
// solver_error when the bracket [0, i_limit] fails (i_limit = 60 A is far
// beyond any reachable density).
double segment_polarization(double v_cell, double t_k, double x_h2o_mean, double x_h2_mean,
                            double x_o2_mean, const CellParameters& p);

struct SegmentState {
    double t_k = 0.0;        // K
    double i = 0.0;          // A, electrolysis-positive
    double x_h2o_in = 0.0;   // cathode steam fraction entering / leaving
    double x_h2o_out = 0.0;
    double x_o2_in = 0.0;    // anode oxygen fraction entering / leaving
    double x_o2_out = 0.0;
    double eta_a = 0.0;      // activation overpotential magnitudes, V
    double eta_c = 0.0;
    double e_ref = 0.0;      // reversible potential at the mean composition, V
    double q_heat = 0.0;     // net heat source, W
};

struct CellSolution {
    std::array<SegmentState, 3> seg;  // indexed along the cathode flow
    CellResponse response;
    int iterations = 0;

    // Heat-balance defect of segment k at the converged state, W.
    double thermal_residual(int k, const OperatingPoint& op, const CellParameters& p) const;
};

struct starvation_error : std::runtime_error {
    int segment;  // 0-based index along the flow
    starvation_error(int seg, const std::string& what)
        : std::runtime_error(what), segment(seg) {}
};

struct convergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct solver_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Validity box for simulate_cell: study ranges widened by 10% of their span,
// except q_air which accepts (0, 500] sccm because the reference scenarios
// feed 400 sccm and the air stream is nearly inert in the model.
bool operating_point_valid(const OperatingPoint& op, std::string* why = nullptr);

// Full steady-state solve. Sequential segment solves at the current
// temperatures (each segment self-consistent in its own depletion), then a
// tridiagonal heat-balance update damped by 0.5, iterated until segment
// currents move < 1e-8 A and temperatures < 1e-9 K; at most 200 outer
// iterations, else convergence_error. Starvation (arithmetic closure only)
// raises starvation_error with the segment index. An optional warm start
// seeds temperatures and currents.
CellSolution simulate_cell_states(const OperatingPoint& op, const CellParameters& p,
                                  const CellSolution* warm_start = nullptr);

CellResponse simulate_cell(const OperatingPoint& op, const CellParameters& p);

struct IvPoint {
    double v_cell = 0.0;
    CellResponse response;
    bool ok = false;
    std::string error;
};

// Voltage sweep with warm-started continuation from point to point. Failures
// are recorded per point and the sweep continues.
std::vector<IvPoint> iv_sweep(double t_fur_c, double q_air, double q_st, double v_lo, double v_hi,
                              int n_points, const CellParameters& p);

// The two instrumented reference scenarios (660 C furnace, 400 sccm air;
// steam feed 40 or 120 sccm, hydrogen carrier equal to steam).
OperatingPoint scenario_condition1(double v_cell);
OperatingPoint scenario_condition2(double v_cell);

}  // namespace soec
