// Compares the serial and OpenMP paths of the heavy kernels on identical
// inputs. Both paths are map-then-reduce with a fixed reduction order, so
// besides wall time the run asserts the outputs match bit for bit.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>

#include "soec/dataset.hpp"
#include "soec/optimize.hpp"
#include "soec/parallel.hpp"
#include "soec/sensitivity.hpp"
#include "soec/surrogate.hpp"

using namespace soec;
using clk = std::chrono::steady_clock;

namespace {

double seconds(const std::function<void()>& fn) {
    const auto t0 = clk::now();
    fn();
    return std::chrono::duration<double>(clk::now() - t0).count();
}

bool all_ok = true;

void row(const char* name, double t_serial, double t_parallel, bool identical) {
    std::printf("%-24s %10.3f s %10.3f s %8.2fx   %s\n", name, t_serial, t_parallel,
                t_serial / t_parallel, identical ? "identical" : "MISMATCH");
    if (!identical) all_ok = false;
}

bool same_response(const CellResponse& a, const CellResponse& b) {
    return std::memcmp(&a, &b, sizeof a) == 0;
}

}  // namespace

int main() {
    const CellParameters p;
    const InputRanges ranges;
    std::printf("workers: %d\n\n", par::worker_count());
    std::printf("%-24s %12s %12s %9s\n", "kernel", "serial", "parallel", "speedup");

    // campaign sampling
    Dataset ds_s, ds_p;
    const double tc_s =
        seconds([&] { ds_s = sample_campaign(2000, ranges, 42, p, par::Exec::serial); });
    const double tc_p =
        seconds([&] { ds_p = sample_campaign(2000, ranges, 42, p, par::Exec::parallel); });
    bool same = ds_s.points.size() == ds_p.points.size();
    for (std::size_t i = 0; same && i < ds_s.points.size(); ++i)
        same = same_response(ds_s.points[i].resp, ds_p.points[i].resp);
    row("campaign 2000", tc_s, tc_p, same);

    // ensemble training (restarts fan out in parallel)
    Dataset ds = sample_campaign(600, ranges, 42, p);
    SurrogateEnsemble ens_s, ens_p;
    const double tt_s = seconds([&] { ens_s = train_ensemble(ds, 7, {}, par::Exec::serial); });
    const double tt_p = seconds([&] { ens_p = train_ensemble(ds, 7, {}, par::Exec::parallel); });
    same = true;
    for (int k = 0; k < 5; ++k)
        same = same && detail::pack(ens_s.nets[k]) == detail::pack(ens_p.nets[k]);
    row("ensemble train 600", tt_s, tt_p, same);

    // sensitivity batch
    IndexReport rs, rp;
    const double ts_s =
        seconds([&] { rs = index_report(ens_p, ranges, 16384, 99, par::Exec::serial); });
    const double ts_p =
        seconds([&] { rp = index_report(ens_p, ranges, 16384, 99, par::Exec::parallel); });
    same = true;
    for (int t = 0; t < 3; ++t)
        same = same && rs.result[t].s == rp.result[t].s && rs.result[t].st == rp.result[t].st;
    row("sobol 16384", ts_s, ts_p, same);

    // constrained front
    ParetoFront f_s, f_p;
    const GridSpec grid;
    const double tf_s =
        seconds([&] { f_s = build_front(ens_p, 10.0, grid, ranges, par::Exec::serial); });
    const double tf_p =
        seconds([&] { f_p = build_front(ens_p, 10.0, grid, ranges, par::Exec::parallel); });
    same = f_s.nodes.size() == f_p.nodes.size();
    for (std::size_t i = 0; same && i < f_s.nodes.size(); ++i)
        same = f_s.nodes[i].v_cell == f_p.nodes[i].v_cell &&
               f_s.nodes[i].q_st == f_p.nodes[i].q_st &&
               f_s.nodes[i].dominated == f_p.nodes[i].dominated;
    row("front 16x17", tf_s, tf_p, same);

    std::printf("\n%s\n", all_ok ? "all kernels agree" : "kernel mismatch detected");
    return all_ok ? 0 : 1;
}
