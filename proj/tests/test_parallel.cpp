#include <doctest.h>

#include <atomic>
#include <cstring>
#include <vector>

#include "soec/dataset.hpp"
#include "soec/optimize.hpp"
#include "soec/parallel.hpp"
#include "soec/sensitivity.hpp"
#include "soec/surrogate.hpp"

using namespace soec;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

bool same_dataset(const Dataset& a, const Dataset& b) {
    if (a.points.size() != b.points.size()) return false;
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        const auto& r = a.points[i];
        const auto& s = b.points[i];
        if (!same_bits(r.op.t_fur, s.op.t_fur) || !same_bits(r.op.q_air, s.op.q_air) ||
            !same_bits(r.op.q_st, s.op.q_st) || !same_bits(r.op.v_cell, s.op.v_cell))
            return false;
        if (!same_bits(r.resp.t_max, s.resp.t_max) || !same_bits(r.resp.t_min, s.resp.t_min) ||
            !same_bits(r.resp.i_up, s.resp.i_up) || !same_bits(r.resp.i_mid, s.resp.i_mid) ||
            !same_bits(r.resp.i_down, s.resp.i_down))
            return false;
    }
    return a.train_idx == b.train_idx && a.test_idx == b.test_idx;
}

}  // namespace

TEST_CASE("worker count is positive and capped by SOEC_THREADS") {
    CHECK(par::worker_count() >= 1);
}

TEST_CASE("for_each_index visits every index exactly once on both paths") {
    for (par::Exec exec : {par::Exec::serial, par::Exec::parallel}) {
        std::vector<std::atomic<int>> hits(257);
        par::for_each_index(hits.size(), exec,
                            [&](std::size_t i) { hits[i].fetch_add(1); });
        for (const auto& h : hits) CHECK(h.load() == 1);
    }
    // zero-length loop is a no-op
    par::for_each_index(0, par::Exec::parallel, [&](std::size_t) { CHECK(false); });
}

TEST_CASE("campaign sampling is bit-identical across execution policies") {
    const CellParameters p;
    const InputRanges box;
    const Dataset serial = sample_campaign(150, box, 77, p, par::Exec::serial);
    const Dataset parallel = sample_campaign(150, box, 77, p, par::Exec::parallel);
    CHECK(same_dataset(serial, parallel));
}

TEST_CASE("training is bit-identical across execution policies") {
    const CellParameters p;
    const InputRanges box;
    const Dataset ds = sample_campaign(80, box, 31, p, par::Exec::serial);
    const SurrogateEnsemble a = train_ensemble(ds, 5, {}, par::Exec::serial);
    const SurrogateEnsemble b = train_ensemble(ds, 5, {}, par::Exec::parallel);
    for (int k = 0; k < 5; ++k) {
        const auto pa = detail::pack(a.nets[k]);
        const auto pb = detail::pack(b.nets[k]);
        REQUIRE(pa.size() == pb.size());
        for (std::size_t i = 0; i < pa.size(); ++i) CHECK(same_bits(pa[i], pb[i]));
    }
}

TEST_CASE("sobol estimator is bit-identical across execution policies") {
    auto f = [](std::span<const double> x) { return x[0] + 2.0 * x[1] * x[1] + 0.3 * x[2]; };
    const std::array<double, 3> lo{0, 0, 0}, hi{1, 1, 1};
    const SobolResult a = sobol_indices_nd(f, lo, hi, 1024, 9, par::Exec::serial);
    const SobolResult b = sobol_indices_nd(f, lo, hi, 1024, 9, par::Exec::parallel);
    REQUIRE(a.s.size() == b.s.size());
    for (std::size_t i = 0; i < a.s.size(); ++i) {
        CHECK(same_bits(a.s[i], b.s[i]));
        CHECK(same_bits(a.st[i], b.st[i]));
    }
    CHECK(same_bits(a.var_y, b.var_y));
}

TEST_CASE("front construction is bit-identical across execution policies") {
    const CellParameters p;
    const InputRanges box;
    const Dataset ds = sample_campaign(200, box, 20260101, p, par::Exec::serial);
    const SurrogateEnsemble ens = train_ensemble(ds, 7, {}, par::Exec::serial);

    const GridSpec grid;
    const ParetoFront a = build_front(ens, 10.0, grid, box, par::Exec::serial);
    const ParetoFront b = build_front(ens, 10.0, grid, box, par::Exec::parallel);
    REQUIRE(a.nodes.size() == b.nodes.size());
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
        CHECK(a.nodes[i].feasible == b.nodes[i].feasible);
        CHECK(a.nodes[i].dominated == b.nodes[i].dominated);
        CHECK(same_bits(a.nodes[i].v_cell, b.nodes[i].v_cell));
        CHECK(same_bits(a.nodes[i].q_st, b.nodes[i].q_st));
        CHECK(same_bits(a.nodes[i].i_tot, b.nodes[i].i_tot));
        CHECK(same_bits(a.nodes[i].ih_i, b.nodes[i].ih_i));
    }
}
