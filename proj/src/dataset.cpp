#include "soec/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "soec/csv.hpp"
#include "soec/numerics.hpp"

namespace soec {

namespace {

const std::vector<std::string> k_schema = {"t_fur_C", "q_air_sccm", "q_st_sccm", "v_cell_V",
                                           "t_max_C", "t_min_C", "i_up_A", "i_mid_A", "i_down_A"};

std::vector<double> row_of(const SamplePoint& s) {
    return {s.op.t_fur, s.op.q_air, s.op.q_st,   s.op.v_cell, s.resp.t_max,
            s.resp.t_min, s.resp.i_up, s.resp.i_mid, s.resp.i_down};
}

}  // namespace

std::size_t default_train_count(std::size_t n) {
    // 1500/1764 of the campaign, rounded, at least 1 when any points exist
    if (n == 0) return 0;
    const auto t = static_cast<std::size_t>(std::llround(static_cast<double>(n) * 1500.0 / 1764.0));
    return std::clamp<std::size_t>(t, 1, n);
}

void assign_split(Dataset& ds, std::size_t train_count) {
    const std::size_t n = ds.points.size();
    if (train_count > n)
        throw std::invalid_argument("assign_split: train_count exceeds dataset size");
    // derived stream so the split does not depend on how many draws the
    // campaign consumed
    std::uint64_t s = ds.seed ^ 0x51ec0ded2b5eedULL;
    num::Rng rng(num::splitmix64(s));
    const auto perm = rng.permutation(n);
    ds.train_idx.assign(perm.begin(), perm.begin() + train_count);
    ds.test_idx.assign(perm.begin() + train_count, perm.end());
    std::sort(ds.train_idx.begin(), ds.train_idx.end());
    std::sort(ds.test_idx.begin(), ds.test_idx.end());
}

Dataset sample_campaign(std::size_t n, const InputRanges& ranges, std::uint64_t seed,
                        const CellParameters& p, par::Exec exec, CampaignStats* stats) {
    if (n == 0) throw std::invalid_argument("sample_campaign: n must be positive");

    // Inputs are drawn up front from one stream; each point that fails with
    // starvation is replaced from a per-point redraw stream so the result
    // does not depend on execution order.
    Dataset ds;
    ds.seed = seed;
    ds.points.resize(n);
    std::vector<std::size_t> redraws(n, 0);
    std::vector<std::string> fatal(n);

    num::Rng master(seed);
    std::vector<OperatingPoint> first_draw(n);
    for (std::size_t k = 0; k < n; ++k) {
        first_draw[k].t_fur = master.uniform(ranges.t_fur.lo, ranges.t_fur.hi);
        first_draw[k].q_air = master.uniform(ranges.q_air.lo, ranges.q_air.hi);
        first_draw[k].q_st = master.uniform(ranges.q_st.lo, ranges.q_st.hi);
        first_draw[k].v_cell = master.uniform(ranges.v_cell.lo, ranges.v_cell.hi);
    }

    par::for_each_index(n, exec, [&](std::size_t k) {
        OperatingPoint op = first_draw[k];
        std::uint64_t redraw_state = seed ^ (0x9e3779b97f4a7c15ULL * (k + 1));
        num::Rng redraw_rng(num::splitmix64(redraw_state));
        for (int attempt = 0;; ++attempt) {
            try {
                ds.points[k] = {op, simulate_cell(op, p)};
                return;
            } catch (const starvation_error&) {
                if (attempt >= 50) {
                    fatal[k] = "sample_campaign: point kept starving after 50 redraws";
                    return;
                }
                ++redraws[k];
                op.t_fur = redraw_rng.uniform(ranges.t_fur.lo, ranges.t_fur.hi);
                op.q_air = redraw_rng.uniform(ranges.q_air.lo, ranges.q_air.hi);
                op.q_st = redraw_rng.uniform(ranges.q_st.lo, ranges.q_st.hi);
                op.v_cell = redraw_rng.uniform(ranges.v_cell.lo, ranges.v_cell.hi);
            } catch (const std::exception& e) {
                fatal[k] = e.what();
                return;
            }
        }
    });

    for (std::size_t k = 0; k < n; ++k)
        if (!fatal[k].empty()) throw convergence_error(fatal[k]);

    std::size_t total_redraws = 0;
    for (auto r : redraws) total_redraws += r;
    if (stats) {
        stats->redraws = total_redraws;
        stats->attempts = n + total_redraws;
    }
    if (total_redraws * 5 > n) {  // > 20% of the campaign redrawn
        std::ostringstream msg;
        msg << "sample_campaign: " << total_redraws << " redraws for " << n
            << " points; the sampling box is starving too often";
        throw convergence_error(msg.str());
    }

    assign_split(ds, default_train_count(n));
    return ds;
}

void save_csv(const Dataset& ds, const std::filesystem::path& file) {
    std::vector<std::vector<double>> rows;
    rows.reserve(ds.points.size());
    for (const auto& s : ds.points) rows.push_back(row_of(s));
    csv::write_numeric(file, k_schema, rows);
}

Dataset load_csv(const std::filesystem::path& file, std::uint64_t seed) {
    const auto t = csv::read_numeric(file);
    if (t.header != k_schema) {
        std::string got;
        for (const auto& h : t.header) got += (got.empty() ? "" : ",") + h;
        throw std::runtime_error("dataset: " + file.string() +
                                 ": header does not match canonical schema, got: " + got);
    }
    Dataset ds;
    ds.seed = seed;
    ds.points.reserve(t.rows.size());
    for (const auto& r : t.rows)
        ds.points.push_back({{r[0], r[1], r[2], r[3]}, {r[4], r[5], r[6], r[7], r[8]}});
    if (!ds.points.empty()) assign_split(ds, default_train_count(ds.points.size()));
    return ds;
}

ColumnMap ColumnMap::parse(const std::string& spec) {
    ColumnMap m;
    if (spec.empty()) return m;
    std::stringstream ss(spec);
    std::string pair;
    while (std::getline(ss, pair, ',')) {
        const auto eq = pair.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == pair.size())
            throw std::invalid_argument("column map: expected canonical=external, got '" + pair +
                                        "'");
        const std::string canonical = pair.substr(0, eq);
        if (std::find(k_schema.begin(), k_schema.end(), canonical) == k_schema.end())
            throw std::invalid_argument("column map: unknown canonical column '" + canonical + "'");
        m.names[canonical] = pair.substr(eq + 1);
    }
    return m;
}

std::string ColumnMap::resolve(const std::string& canonical) const {
    const auto it = names.find(canonical);
    return it == names.end() ? canonical : it->second;
}

Dataset load_external(const std::filesystem::path& file, const ColumnMap& map,
                      const InputRanges& ranges, std::uint64_t seed) {
    const auto t = csv::read_numeric(file);

    std::array<int, 9> col{};
    for (std::size_t c = 0; c < k_schema.size(); ++c) {
        const std::string name = map.resolve(k_schema[c]);
        col[c] = t.column(name);
        if (col[c] < 0)
            throw std::runtime_error("dataset: " + file.string() + ": missing column '" + name +
                                     "' (for " + k_schema[c] + ")");
    }

    // Inputs may stray a little outside the study box (real rigs drift), but
    // more than 10% of a range span means the wrong column or wrong units.
    const std::array<Range, 4> box = ranges.as_array();
    std::vector<std::size_t> bad;
    for (std::size_t r = 0; r < t.rows.size(); ++r)
        for (int c = 0; c < 4; ++c)
            if (!box[c].contains(t.rows[r][col[c]], 0.1 * box[c].span())) {
                bad.push_back(r + 1);
                break;
            }
    if (!bad.empty()) {
        std::ostringstream msg;
        msg << "dataset: " << file.string() << ": " << bad.size()
            << " rows outside the input box by more than 10% of range span; rows:";
        for (std::size_t i = 0; i < bad.size() && i < 25; ++i) msg << ' ' << bad[i];
        if (bad.size() > 25) msg << " ...";
        throw std::runtime_error(msg.str());
    }

    Dataset ds;
    ds.seed = seed;
    ds.points.reserve(t.rows.size());
    for (const auto& r : t.rows)
        ds.points.push_back({{r[col[0]], r[col[1]], r[col[2]], r[col[3]]},
                             {r[col[4]], r[col[5]], r[col[6]], r[col[7]], r[col[8]]}});
    if (!ds.points.empty()) assign_split(ds, default_train_count(ds.points.size()));
    return ds;
}

}  // namespace soec
