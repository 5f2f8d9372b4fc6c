#pragma once

#include <array>
#include <stdexcept>
#include <string>

// Shared value types and unit conventions for the three-segment electrolysis
// cell toolkit. Temperatures cross this interface in degrees Celsius; all
// internal physics works in kelvin. Gas flows are sccm (standard cubic
// centimetres per minute, 25 C / 1 atm reference); currents are amperes.

namespace soec {

struct constants {
    static constexpr double faraday = 96485.33;          // C/mol
    static constexpr double gas = 8.314462618;           // J/(mol K)
    static constexpr double molar_volume_ref = 24465.0;  // cm3/mol at 25 C, 1 atm
    static constexpr double p_atm = 101325.0;            // Pa
    static constexpr double t_zero_c = 273.15;           // K at 0 C
};

// 1 sccm = 1/(24465 * 60) mol/s under the reference conditions above.
double sccm_to_mol_per_s(double q_sccm);
double mol_per_s_to_sccm(double n_mol_per_s);

inline double celsius_to_kelvin(double t_c) { return t_c + constants::t_zero_c; }
inline double kelvin_to_celsius(double t_k) { return t_k - constants::t_zero_c; }

// One steady-state operating point of the stack.
struct OperatingPoint {
    double t_fur = 660.0;   // furnace setpoint, C
    double q_air = 100.0;   // air feed to the anode channel, sccm
    double q_st = 40.0;     // steam feed to the cathode channel, sccm
    double v_cell = 1.3;    // applied cell voltage, V
};

// Measured or simulated cell answer at one operating point. Segments are
// indexed along the cathode flow direction: up = first fed, down = last.
struct CellResponse {
    double t_max = 0.0;   // hottest segment temperature, C
    double t_min = 0.0;   // coldest segment temperature, C
    double i_up = 0.0;    // A
    double i_mid = 0.0;   // A
    double i_down = 0.0;  // A

    double i_total() const { return i_up + i_mid + i_down; }
};

// Closed interval used for input sampling and validity checks.
struct Range {
    double lo = 0.0;
    double hi = 1.0;

    double span() const { return hi - lo; }
    bool contains(double x, double margin = 0.0) const {
        return x >= lo - margin && x <= hi + margin;
    }
    double clamp(double x) const { return x < lo ? lo : (x > hi ? hi : x); }
};

// Sampling box for the four inputs. Defaults are the study ranges.
struct InputRanges {
    Range t_fur{600.0, 750.0};   // C
    Range q_air{40.0, 300.0};    // sccm
    Range q_st{20.0, 150.0};     // sccm
    Range v_cell{1.0, 1.7};      // V

    std::array<Range, 4> as_array() const { return {t_fur, q_air, q_st, v_cell}; }
};

enum class IndexStatus {
    ok,
    open_circuit,    // i_up = 0, current inhomogeneity undefined
    steam_starved,   // su > 1, outside model validity
};

// Derived performance quantities. ih_i and su are dimensionless, ih_t is a
// temperature difference (identical in C and K), q_h2 is sccm, p_ele is W.
struct PerformanceIndices {
    double ih_i = 0.0;    // 1 - i_down/i_up; 0 when flagged open_circuit
    double ih_t = 0.0;    // t_max - t_min
    double su = 0.0;      // i_total/(2 F n_steam)
    double q_h2 = 0.0;    // hydrogen production, sccm
    double p_ele = 0.0;   // v_cell * i_total, W
    IndexStatus status = IndexStatus::ok;
};

// Throws std::invalid_argument when q_st <= 0. Flags rather than throws on
// open circuit and steam starvation so sweeps can keep going.
PerformanceIndices performance_indices(const OperatingPoint& op, const CellResponse& r);

}  // namespace soec
