#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "soec/core.hpp"
#include "soec/parallel.hpp"
#include "soec/physics.hpp"

// Sampling campaigns against the reduced model and the canonical CSV layout
// used to exchange them:
//   t_fur_C,q_air_sccm,q_st_sccm,v_cell_V,t_max_C,t_min_C,i_up_A,i_mid_A,i_down_A

namespace soec {

struct SamplePoint {
    OperatingPoint op;
    CellResponse resp;
};

struct Dataset {
    std::vector<SamplePoint> points;
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> test_idx;
    std::uint64_t seed = 0;
};

struct CampaignStats {
    std::size_t redraws = 0;   // starved draws replaced (logged, bounded)
    std::size_t attempts = 0;  // total draws including redraws
};

// Historical campaign proportion (1500 of 1764); n = 1 trains on the single
// point and leaves the test split empty.
std::size_t default_train_count(std::size_t n);

// n independent uniform draws over the box, each simulated with the reduced
// model. Starved draws are redrawn with fresh input draws from the same
// stream; more than 20% redraws aborts with convergence_error. The split is
// a pure function of (seed, n, train_count).
Dataset sample_campaign(std::size_t n, const InputRanges& ranges, std::uint64_t seed,
                        const CellParameters& p, par::Exec exec = par::Exec::parallel,
                        CampaignStats* stats = nullptr);

// Re-derives train/test membership; deterministic in (dataset.seed, n, train_count).
void assign_split(Dataset& ds, std::size_t train_count);

void save_csv(const Dataset& ds, const std::filesystem::path& file);

// Canonical schema loader. Header must match exactly; numbers round-trip
// bit-exactly through save_csv/load_csv.
Dataset load_csv(const std::filesystem::path& file, std::uint64_t seed = 0);

// canonical column name -> header name in the external file. Identity for
// names not mentioned.
struct ColumnMap {
    std::map<std::string, std::string> names;

    // Parses "t_fur_C=T_furnace,i_up_A=I1"; throws std::invalid_argument on
    // malformed pairs or unknown canonical names.
    static ColumnMap parse(const std::string& spec);
    std::string resolve(const std::string& canonical) const;
};

// Loads a foreign CSV through a column map and validates inputs against the
// study box: any input more than 10% of the range span outside its range
// rejects the file, reporting every offending data row number (1-based).
Dataset load_external(const std::filesystem::path& file, const ColumnMap& map,
                      const InputRanges& ranges, std::uint64_t seed = 0);

}  // namespace soec
