#include "soec/core.hpp"

namespace soec {

double sccm_to_mol_per_s(double q_sccm) {
    return q_sccm / (constants::molar_volume_ref * 60.0);
}

double mol_per_s_to_sccm(double n_mol_per_s) {
    return n_mol_per_s * constants::molar_volume_ref * 60.0;
}

PerformanceIndices performance_indices(const OperatingPoint& op, const CellResponse& r) {
    if (!(op.q_st > 0.0))
        throw std::invalid_argument("performance_indices: q_st must be positive, got " +
                                    std::to_string(op.q_st));

    PerformanceIndices out;
    const double i_tot = r.i_total();
    const double n_st = sccm_to_mol_per_s(op.q_st);
    const double two_f = 2.0 * constants::faraday;

    out.ih_t = r.t_max - r.t_min;
    out.su = i_tot / (two_f * n_st);
    out.q_h2 = mol_per_s_to_sccm(i_tot / two_f);
    out.p_ele = op.v_cell * i_tot;

    if (r.i_up > 0.0) {
        out.ih_i = 1.0 - r.i_down / r.i_up;
    } else {
        out.status = IndexStatus::open_circuit;
    }
    if (out.su > 1.0) out.status = IndexStatus::steam_starved;
    return out;
}

}  // namespace soec
