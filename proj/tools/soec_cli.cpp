// soec: command-line front end for the three-segment electrolysis cell
// toolkit. Subcommands cover the whole study pipeline:
//
//   simulate   one steady-state operating point
//   campaign   sampled dataset against the reduced model
//   train      surrogate ensemble from a dataset CSV
//   sobol      variance-based sensitivity table on a trained ensemble
//   pareto     constrained front sweep over electrolysis power
//   linmap     decision curve over saved fronts
//   report     full bundle with a manifest
//
// Exit codes: 0 success, 1 computational failure, 2 usage error.

#include <CLI11.hpp>

#include <array>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "soec/core.hpp"
#include "soec/dataset.hpp"
#include "soec/decision.hpp"
#include "soec/optimize.hpp"
#include "soec/parallel.hpp"
#include "soec/physics.hpp"
#include "soec/sensitivity.hpp"
#include "soec/surrogate.hpp"

namespace fs = std::filesystem;
using namespace soec;

namespace {

// Raised for bad flag values discovered after CLI11 parsing; maps to exit 2.
struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Everything a command needs, collected from flags. Referenced files are
// checked by CLI11 at parse time; the output directory is created up front.
struct RunConfig {
    std::string config_file;
    std::string data_file;
    std::string model_file;
    std::string fronts_file;
    std::string out_dir = "out";
    std::string map_spec;
    std::string weights_spec = "case1";
    std::string scenario;
    std::uint64_t seed = 20260101;
    std::size_t n = 1764;
    std::size_t n_base = 4096;
    double vcell = 0.0;
    OperatingPoint custom;
    double power_min = 10.0, power_max = 10.0, power_step = 1.0;
    double contour_su = 0.70;
    bool serial = false;

    par::Exec exec() const { return serial ? par::Exec::serial : par::Exec::parallel; }

    CellParameters params() const {
        if (config_file.empty()) return CellParameters{};
        return load_cell_parameters(config_file);
    }
};

WeightVector parse_weights(const std::string& spec) {
    if (spec == "case1") return WeightVector::equal();
    if (spec == "case2") return WeightVector::utilization_heavy();
    WeightVector w;
    std::stringstream ss(spec);
    std::string tok;
    std::size_t k = 0;
    while (std::getline(ss, tok, ',')) {
        if (k >= w.w.size()) throw std::invalid_argument("weights: expected 6 values");
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != tok.size() || v < 0.0)
            throw std::invalid_argument("weights: bad value '" + tok + "'");
        w.w[k++] = v;
    }
    if (k != w.w.size()) throw std::invalid_argument("weights: expected 6 values");
    double sum = 0.0;
    for (double v : w.w) sum += v;
    if (sum <= 0.0) throw std::invalid_argument("weights: all zero");
    return w;
}

fs::path ensure_out(const RunConfig& cfg) {
    fs::path dir(cfg.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw std::runtime_error("cannot create output directory " + dir.string());
    return dir;
}

std::size_t csv_rows(const fs::path& file) {
    std::ifstream in(file);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++n;
    return n > 0 ? n - 1 : 0;  // minus header
}

void print_indices(const OperatingPoint& op, const CellResponse& r) {
    const PerformanceIndices pi = performance_indices(op, r);
    std::printf("  i_up %.4f A   i_mid %.4f A   i_down %.4f A   i_total %.4f A\n", r.i_up,
                r.i_mid, r.i_down, r.i_total());
    std::printf("  t_max %.2f C   t_min %.2f C   ih_t %.2f C\n", r.t_max, r.t_min, pi.ih_t);
    std::printf("  su %.4f   ih_i %.4f   q_h2 %.2f sccm   p_ele %.3f W\n", pi.su, pi.ih_i,
                pi.q_h2, pi.p_ele);
}

int cmd_simulate(const RunConfig& cfg) {
    OperatingPoint op = cfg.custom;
    if (!cfg.scenario.empty()) {
        if (cfg.scenario == "condition1")
            op = scenario_condition1(cfg.vcell);
        else if (cfg.scenario == "condition2")
            op = scenario_condition2(cfg.vcell);
        else {
            std::fprintf(stderr, "unknown scenario '%s' (condition1|condition2)\n",
                         cfg.scenario.c_str());
            return 2;
        }
    } else {
        op.v_cell = cfg.vcell;
    }

    const CellParameters p = cfg.params();
    const CellResponse r = simulate_cell(op, p);
    std::printf("operating point: t_fur %.1f C, q_air %.1f sccm, q_st %.1f sccm, v_cell %.4f V\n",
                op.t_fur, op.q_air, op.q_st, op.v_cell);
    print_indices(op, r);

    if (!cfg.out_dir.empty()) {
        const fs::path dir = ensure_out(cfg);
        Dataset ds;
        ds.points.push_back({op, r});
        save_csv(ds, dir / "simulate.csv");
        std::printf("wrote %s\n", (dir / "simulate.csv").string().c_str());
    }
    return 0;
}

int cmd_campaign(const RunConfig& cfg) {
    const fs::path dir = ensure_out(cfg);
    const CellParameters p = cfg.params();
    CampaignStats stats;
    Dataset ds = sample_campaign(cfg.n, InputRanges{}, cfg.seed, p, cfg.exec(), &stats);
    save_csv(ds, dir / "campaign.csv");
    std::printf("campaign: %zu rows, %zu redraws of %zu draws, seed %llu\n", ds.points.size(),
                stats.redraws, stats.attempts, static_cast<unsigned long long>(ds.seed));
    std::printf("wrote %s\n", (dir / "campaign.csv").string().c_str());
    return 0;
}

Dataset load_dataset(const RunConfig& cfg) {
    if (cfg.map_spec.empty()) return load_csv(cfg.data_file, cfg.seed);
    ColumnMap map;
    try {
        map = ColumnMap::parse(cfg.map_spec);
    } catch (const std::invalid_argument& e) {
        throw usage_error(e.what());
    }
    return load_external(cfg.data_file, map, InputRanges{}, cfg.seed);
}

int train_into(const Dataset& ds, const RunConfig& cfg, const fs::path& dir,
               SurrogateEnsemble& ens) {
    std::array<TrainReport, 5> reports;
    ens = train_ensemble(ds, cfg.seed, TrainOptions{}, cfg.exec(), &reports);
    save_model(ens, dir / "models.json");

    static constexpr std::array<const char*, 5> outputs{"t_max", "t_min", "i_up", "i_mid",
                                                        "i_down"};
    std::ofstream rep(dir / "train_report.csv");
    rep << "output,hidden,epochs,restart,train_rmse,test_rmse,r2_test\n";
    std::printf("%-8s %6s %6s %7s %12s %12s %10s\n", "output", "hidden", "epochs", "restart",
                "train_rmse", "test_rmse", "r2_test");
    for (std::size_t k = 0; k < outputs.size(); ++k) {
        const TrainReport& t = reports[k];
        std::printf("%-8s %6d %6d %7d %12.3e %12.3e %10.5f%s\n", outputs[k],
                    ens.nets[k].n_hidden, t.epochs, t.restart, t.train_rmse, t.test_rmse,
                    t.r2_test, t.size_warning ? "  (small train split)" : "");
        char line[256];
        std::snprintf(line, sizeof line, "%s,%d,%d,%d,%.17g,%.17g,%.17g\n", outputs[k],
                      ens.nets[k].n_hidden, t.epochs, t.restart, t.train_rmse, t.test_rmse,
                      t.r2_test);
        rep << line;
    }
    std::printf("wrote %s\n", (dir / "models.json").string().c_str());
    return 0;
}

int cmd_train(const RunConfig& cfg) {
    const fs::path dir = ensure_out(cfg);
    Dataset ds = load_dataset(cfg);
    SurrogateEnsemble ens;
    return train_into(ds, cfg, dir, ens);
}

void print_index_report(const IndexReport& rpt) {
    std::printf("%-6s %-5s %9s %9s %9s %9s\n", "target", "index", "t_fur", "q_air", "q_st",
                "v_cell");
    for (std::size_t t = 0; t < rpt.targets.size(); ++t) {
        const SobolResult& r = rpt.result[t];
        std::printf("%-6s %-5s %9.4f %9.4f %9.4f %9.4f\n", rpt.targets[t], "s", r.s[0], r.s[1],
                    r.s[2], r.s[3]);
        std::printf("%-6s %-5s %9.4f %9.4f %9.4f %9.4f\n", rpt.targets[t], "st", r.st[0],
                    r.st[1], r.st[2], r.st[3]);
    }
}

int cmd_sobol(const RunConfig& cfg) {
    const fs::path dir = ensure_out(cfg);
    const SurrogateEnsemble ens = load_model(cfg.model_file);
    const IndexReport rpt = index_report(ens, InputRanges{}, cfg.n_base, cfg.seed, cfg.exec());
    save_index_report_csv(rpt, dir / "sobol.csv");
    print_index_report(rpt);
    std::printf("wrote %s\n", (dir / "sobol.csv").string().c_str());
    return 0;
}

int cmd_pareto(const RunConfig& cfg) {
    const fs::path dir = ensure_out(cfg);
    const SurrogateEnsemble ens = load_model(cfg.model_file);
    const GridSpec grid;
    std::vector<ParetoFront> fronts = sweep_power(ens, cfg.power_min, cfg.power_max,
                                                  cfg.power_step, grid, InputRanges{},
                                                  cfg.exec());
    for (const ParetoFront& f : fronts) {
        std::size_t feasible = 0;
        for (const ParetoSolution& s : f.nodes) feasible += s.feasible;
        std::printf("p_ele %5.1f W: %3zu/%zu nodes feasible, %3zu efficient\n", f.p_ele,
                    feasible, f.nodes.size(), f.efficient().size());
    }
    save_fronts_csv(fronts, dir / "fronts.csv");
    std::printf("wrote %s\n", (dir / "fronts.csv").string().c_str());
    return 0;
}

int cmd_linmap(const RunConfig& cfg) {
    const fs::path dir = ensure_out(cfg);
    WeightVector w;
    try {
        w = parse_weights(cfg.weights_spec);
    } catch (const std::invalid_argument& e) {
        throw usage_error(e.what());
    }
    const std::vector<ParetoFront> fronts = load_fronts_csv(cfg.fronts_file);
    const OperatingCurve curve = operating_curve(fronts, w);

    std::printf("%7s %7s %6s %8s %8s %7s %7s %8s %8s\n", "p_ele", "t_fur", "su", "q_st",
                "v_cell", "i_tot", "ih_i", "ih_t", "d");
    for (const CurvePoint& c : curve.points)
        std::printf("%7.2f %7.1f %6.3f %8.2f %8.4f %7.3f %7.4f %8.3f %8.4f\n", c.p_ele,
                    c.chosen.t_fur, c.chosen.su, c.chosen.q_st, c.chosen.v_cell, c.chosen.i_tot,
                    c.chosen.ih_i, c.chosen.ih_t, c.d);
    for (double pw : curve.skipped_powers)
        std::printf("p_ele %5.1f W: no efficient solution, skipped\n", pw);

    save_curve_csv(curve, dir / "curve.csv");
    std::printf("wrote %s\n", (dir / "curve.csv").string().c_str());
    return 0;
}

int cmd_report(const RunConfig& cfg) {
    const fs::path dir = ensure_out(cfg);
    const CellParameters p = cfg.params();
    nlohmann::json manifest;
    manifest["command"] = "report";
    manifest["seed"] = cfg.seed;
    manifest["n"] = cfg.n;
    manifest["n_base"] = cfg.n_base;

    auto add = [&](const fs::path& file) {
        manifest["artifacts"].push_back(
            {{"file", file.filename().string()}, {"rows", csv_rows(file)}});
    };

    // 1. dataset: sampled campaign unless an external file was supplied
    Dataset ds;
    if (!cfg.data_file.empty()) {
        ds = load_dataset(cfg);
        manifest["dataset"] = cfg.data_file;
    } else {
        CampaignStats stats;
        ds = sample_campaign(cfg.n, InputRanges{}, cfg.seed, p, cfg.exec(), &stats);
        manifest["dataset"] = "campaign";
        manifest["redraws"] = stats.redraws;
    }
    save_csv(ds, dir / "campaign.csv");
    add(dir / "campaign.csv");
    std::printf("[1/6] dataset: %zu rows\n", ds.points.size());

    // 2. surrogate ensemble
    SurrogateEnsemble ens;
    RunConfig tcfg = cfg;
    tcfg.seed = cfg.seed + 1;
    train_into(ds, tcfg, dir, ens);
    add(dir / "train_report.csv");
    std::printf("[2/6] surrogates trained\n");

    // 3. sensitivity table
    const IndexReport rpt =
        index_report(ens, InputRanges{}, cfg.n_base, cfg.seed + 2, cfg.exec());
    save_index_report_csv(rpt, dir / "sobol.csv");
    add(dir / "sobol.csv");
    std::printf("[3/6] sensitivity indices at n_base %zu\n", rpt.n_base);

    // 4. operating maps at fixed utilization
    const std::vector<ContourPoint> maps =
        contour_scan(ens, InputRanges{}, cfg.contour_su, 100.0, 16, 14, cfg.exec());
    char mapname[64];
    std::snprintf(mapname, sizeof mapname, "contour_su%02d.csv",
                  static_cast<int>(cfg.contour_su * 100.0 + 0.5));
    save_contour_csv(maps, dir / mapname);
    add(dir / mapname);
    std::printf("[4/6] operating maps at su %.2f\n", cfg.contour_su);

    // 5. front sweep
    const GridSpec grid;
    const std::vector<ParetoFront> fronts =
        sweep_power(ens, cfg.power_min, cfg.power_max, cfg.power_step, grid, InputRanges{},
                    cfg.exec());
    save_fronts_csv(fronts, dir / "fronts.csv");
    add(dir / "fronts.csv");
    save_envelope_csv(fronts, dir / "front_best.csv", dir / "front_worst.csv");
    add(dir / "front_best.csv");
    add(dir / "front_worst.csv");
    std::printf("[5/6] %zu fronts swept\n", fronts.size());

    // 6. decision curves for both weight cases
    for (const char* name : {"case1", "case2"}) {
        const OperatingCurve curve = operating_curve(fronts, parse_weights(name));
        const fs::path file = dir / (std::string("curve_") + name + ".csv");
        save_curve_csv(curve, file);
        add(file);
    }
    std::printf("[6/6] decision curves\n");

    std::ofstream mf(dir / "manifest.json");
    mf << manifest.dump(2) << "\n";
    std::printf("wrote %s\n", (dir / "manifest.json").string().c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"three-segment electrolysis cell study toolkit"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto add_common = [&](CLI::App* c) {
        c->add_option("--config", cfg.config_file, "cell parameter file")
            ->check(CLI::ExistingFile);
        c->add_option("--out", cfg.out_dir, "output directory");
        c->add_option("--seed", cfg.seed, "master seed");
        c->add_flag("--serial", cfg.serial, "disable parallel kernels");
    };

    CLI::App* sim = app.add_subcommand("simulate", "steady state at one operating point");
    add_common(sim);
    sim->add_option("--scenario", cfg.scenario, "condition1 | condition2");
    sim->add_option("--vcell", cfg.vcell, "cell voltage, V")->required();
    sim->add_option("--tfur", cfg.custom.t_fur, "furnace setpoint, C");
    sim->add_option("--qair", cfg.custom.q_air, "air feed, sccm");
    sim->add_option("--qst", cfg.custom.q_st, "steam feed, sccm");

    CLI::App* cam = app.add_subcommand("campaign", "sample a dataset from the reduced model");
    add_common(cam);
    cam->add_option("--n", cfg.n, "number of samples");

    CLI::App* tr = app.add_subcommand("train", "train the surrogate ensemble");
    add_common(tr);
    tr->add_option("--data", cfg.data_file, "dataset CSV")->required()
        ->check(CLI::ExistingFile);
    tr->add_option("--map", cfg.map_spec, "column map for foreign CSV headers");

    CLI::App* so = app.add_subcommand("sobol", "sensitivity indices on a trained ensemble");
    add_common(so);
    so->add_option("--model", cfg.model_file, "model file")->required()
        ->check(CLI::ExistingFile);
    so->add_option("--n-base", cfg.n_base, "base sample count");

    CLI::App* pa = app.add_subcommand("pareto", "constrained front sweep over power");
    add_common(pa);
    pa->add_option("--model", cfg.model_file, "model file")->required()
        ->check(CLI::ExistingFile);
    pa->add_option("--power-min", cfg.power_min, "lowest electrolysis power, W");
    pa->add_option("--power-max", cfg.power_max, "highest electrolysis power, W");
    pa->add_option("--power-step", cfg.power_step, "power increment, W");

    CLI::App* li = app.add_subcommand("linmap", "decision curve over saved fronts");
    add_common(li);
    li->add_option("--fronts", cfg.fronts_file, "fronts CSV")->required()
        ->check(CLI::ExistingFile);
    li->add_option("--weights", cfg.weights_spec, "case1 | case2 | w1,...,w6");

    CLI::App* re = app.add_subcommand("report", "full pipeline bundle with manifest");
    add_common(re);
    re->add_option("--data", cfg.data_file, "dataset CSV (default: sample a campaign)")
        ->check(CLI::ExistingFile);
    re->add_option("--map", cfg.map_spec, "column map for foreign CSV headers");
    re->add_option("--n", cfg.n, "campaign size");
    re->add_option("--n-base", cfg.n_base, "sensitivity base sample count");
    re->add_option("--power-min", cfg.power_min, "lowest electrolysis power, W");
    re->add_option("--power-max", cfg.power_max, "highest electrolysis power, W");
    re->add_option("--power-step", cfg.power_step, "power increment, W");
    re->add_option("--contour-su", cfg.contour_su, "utilization target for operating maps");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(cfg);
        if (cam->parsed()) return cmd_campaign(cfg);
        if (tr->parsed()) return cmd_train(cfg);
        if (so->parsed()) return cmd_sobol(cfg);
        if (pa->parsed()) return cmd_pareto(cfg);
        if (li->parsed()) return cmd_linmap(cfg);
        if (re->parsed()) return cmd_report(cfg);
    } catch (const usage_error& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
