#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "soec/numerics.hpp"
#include "soec/surrogate.hpp"

using namespace soec;
namespace fs = std::filesystem;

namespace {

// smooth 4-input target the small nets can fit tightly
double toy_target(const std::array<double, 4>& x) {
    return 2.0 * x[0] - x[1] + 0.5 * x[2] * x[3];
}

struct ToyData {
    std::vector<std::array<double, 4>> x_train, x_test;
    std::vector<double> y_train, y_test;
};

ToyData make_toy(std::size_t n_train, std::size_t n_test, std::uint64_t seed) {
    ToyData d;
    num::Rng rng(seed);
    for (std::size_t i = 0; i < n_train + n_test; ++i) {
        std::array<double, 4> x{rng.uniform01(), rng.uniform01(), rng.uniform01(),
                                rng.uniform01()};
        if (i < n_train) {
            d.x_train.push_back(x);
            d.y_train.push_back(toy_target(x));
        } else {
            d.x_test.push_back(x);
            d.y_test.push_back(toy_target(x));
        }
    }
    return d;
}

MlpModel random_model(int n_hidden, std::uint64_t seed) {
    MlpModel m;
    m.n_hidden = n_hidden;
    num::Rng rng(seed);
    m.w_in.resize(static_cast<std::size_t>(n_hidden) * 4);
    m.b_in.resize(n_hidden);
    m.w_out.resize(n_hidden);
    for (double& w : m.w_in) w = rng.uniform(-1.0, 1.0);
    for (double& b : m.b_in) b = rng.uniform(-1.0, 1.0);
    for (double& w : m.w_out) w = rng.uniform(-1.0, 1.0);
    m.b_out = rng.uniform(-1.0, 1.0);
    m.in_lo = {0, 0, 0, 0};
    m.in_hi = {1, 1, 1, 1};
    m.out_lo = -1.0;
    m.out_hi = 1.0;
    return m;
}

}  // namespace

TEST_CASE("response array order is t_max, t_min, i_up, i_mid, i_down") {
    CellResponse r;
    r.t_max = 1;
    r.t_min = 2;
    r.i_up = 3;
    r.i_mid = 4;
    r.i_down = 5;
    const auto a = response_as_array(r);
    CHECK(a == std::array<double, 5>{1, 2, 3, 4, 5});
    const CellResponse back = response_from_array(a);
    CHECK(back.i_mid == 4);
    CHECK(back.t_min == 2);
}

TEST_CASE("parameter pack and unpack round trip") {
    const MlpModel m = random_model(5, 11);
    const auto theta = detail::pack(m);
    REQUIRE(theta.size() == m.parameter_count());

    MlpModel m2 = random_model(5, 99);  // different weights, same shape
    detail::unpack(m2, theta);
    CHECK(detail::pack(m2) == theta);
    const std::array<double, 4> x{0.3, 0.7, 0.1, 0.9};
    CHECK(m2.predict(x) == m.predict(x));
}

TEST_CASE("input scaling maps the box corners to [-1, 1]") {
    MlpModel m = random_model(3, 5);
    m.in_lo = {600, 40, 20, 1.0};
    m.in_hi = {750, 300, 150, 1.7};
    const auto lo = m.scale_input({600, 40, 20, 1.0});
    const auto hi = m.scale_input({750, 300, 150, 1.7});
    for (int d = 0; d < 4; ++d) {
        CHECK(lo[d] == doctest::Approx(-1.0));
        CHECK(hi[d] == doctest::Approx(1.0));
    }
}

TEST_CASE("analytic jacobian matches central differences") {
    const MlpModel m = random_model(4, 21);
    const double xs[4] = {0.2, -0.6, 0.9, -0.1};
    std::vector<double> jac(m.parameter_count());
    detail::jacobian_row(m, xs, jac.data());

    auto theta = detail::pack(m);
    const double h = 1e-6;
    for (std::size_t k = 0; k < theta.size(); ++k) {
        MlpModel pert = m;
        auto tp = theta;
        tp[k] += h;
        detail::unpack(pert, tp);
        const double up = pert.predict_scaled(xs);
        tp[k] -= 2.0 * h;
        detail::unpack(pert, tp);
        const double dn = pert.predict_scaled(xs);
        const double fd = (up - dn) / (2.0 * h);
        CHECK(jac[k] == doctest::Approx(fd).epsilon(1e-5));
    }
}

TEST_CASE("reference normal equations match the vectorized assembly") {
    const std::size_t n_rows = 23, n_par = 7;
    num::Rng rng(3);
    std::vector<double> jac(n_rows * n_par), res(n_rows);
    for (double& v : jac) v = rng.uniform(-2.0, 2.0);
    for (double& v : res) v = rng.uniform(-1.0, 1.0);

    std::vector<double> jtj, jtr;
    detail::normal_equations_reference(jac, res, n_rows, n_par, jtj, jtr);

    using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const Mat> J(jac.data(), n_rows, n_par);
    Eigen::Map<const Eigen::VectorXd> r(res.data(), n_rows);
    const Mat jtj_e = J.transpose() * J;
    const Eigen::VectorXd jtr_e = J.transpose() * r;

    for (std::size_t i = 0; i < n_par; ++i) {
        CHECK(jtr[i] == doctest::Approx(jtr_e(static_cast<Eigen::Index>(i))).epsilon(1e-12));
        for (std::size_t j = 0; j < n_par; ++j)
            CHECK(jtj[i * n_par + j] ==
                  doctest::Approx(jtj_e(static_cast<Eigen::Index>(i),
                                        static_cast<Eigen::Index>(j))).epsilon(1e-12));
    }
}

TEST_CASE("levenberg-marquardt fits a smooth target") {
    const ToyData d = make_toy(400, 80, 17);
    TrainReport rep;
    const MlpModel m = train_lm(d.x_train, d.y_train, d.x_test, d.y_test, 5, 4, {}, &rep);
    CHECK(rep.r2_test > 0.999);
    CHECK(rep.epochs > 0);
    CHECK(rep.restart >= 0);
    CHECK(rep.restart < 3);
    CHECK(!rep.size_warning);  // 400 rows comfortably covers 31 parameters

    double worst = 0.0;
    for (std::size_t i = 0; i < d.x_test.size(); ++i)
        worst = std::max(worst, std::fabs(m.predict(d.x_test[i]) - d.y_test[i]));
    CHECK(worst < 0.05);
}

TEST_CASE("training is deterministic in its seed") {
    const ToyData d = make_toy(80, 20, 23);
    const MlpModel a = train_lm(d.x_train, d.y_train, d.x_test, d.y_test, 4, 77);
    const MlpModel b = train_lm(d.x_train, d.y_train, d.x_test, d.y_test, 4, 77);
    CHECK(detail::pack(a) == detail::pack(b));

    const MlpModel c = train_lm(d.x_train, d.y_train, d.x_test, d.y_test, 4, 78);
    CHECK(detail::pack(a) != detail::pack(c));
}

TEST_CASE("a thin training split sets the size warning") {
    const ToyData d = make_toy(20, 8, 29);  // 20 rows for 31 parameters
    TrainReport rep;
    train_lm(d.x_train, d.y_train, d.x_test, d.y_test, 5, 4, {}, &rep);
    CHECK(rep.size_warning);
}

TEST_CASE("ensemble trains one net per output and predicts physical units") {
    const Dataset ds = sample_campaign(120, InputRanges{}, 2024, CellParameters{});
    std::array<TrainReport, 5> reports;
    const SurrogateEnsemble ens = train_ensemble(ds, 7, {}, par::Exec::parallel, &reports);

    CHECK(ens.nets[0].n_hidden == 10);
    CHECK(ens.nets[3].n_hidden == 5);
    for (const TrainReport& r : reports) CHECK(r.r2_test > 0.95);

    // prediction should sit near the simulator on a held-out point
    const CellParameters p;
    OperatingPoint op;
    op.t_fur = 690.0;
    op.q_air = 120.0;
    op.q_st = 90.0;
    op.v_cell = 1.35;
    const CellResponse truth = simulate_cell(op, p);
    const CellResponse pred = ens.predict(op);
    CHECK(pred.i_up == doctest::Approx(truth.i_up).epsilon(0.05));
    CHECK(pred.t_max == doctest::Approx(truth.t_max).epsilon(0.001));
}

TEST_CASE("model file round trip preserves every coefficient") {
    const Dataset ds = sample_campaign(80, InputRanges{}, 5, CellParameters{});
    const SurrogateEnsemble ens = train_ensemble(ds, 3);
    const fs::path file = fs::temp_directory_path() / "soec_model_roundtrip.json";
    save_model(ens, file);
    const SurrogateEnsemble back = load_model(file);
    for (int k = 0; k < 5; ++k) {
        CHECK(detail::pack(back.nets[k]) == detail::pack(ens.nets[k]));
        CHECK(back.nets[k].in_lo == ens.nets[k].in_lo);
        CHECK(back.nets[k].in_hi == ens.nets[k].in_hi);
        CHECK(back.nets[k].out_lo == ens.nets[k].out_lo);
        CHECK(back.nets[k].out_hi == ens.nets[k].out_hi);
    }
    OperatingPoint op;
    const CellResponse a = ens.predict(op);
    const CellResponse b = back.predict(op);
    CHECK(a.i_mid == b.i_mid);
}

TEST_CASE("model loader rejects damaged files") {
    const Dataset ds = sample_campaign(80, InputRanges{}, 6, CellParameters{});
    const SurrogateEnsemble ens = train_ensemble(ds, 3);
    const fs::path good = fs::temp_directory_path() / "soec_model_good.json";
    save_model(ens, good);

    // truncation
    std::ifstream in(good);
    std::string text((std::istreambuf_iterator<char>(in)), {});
    in.close();
    const fs::path cut = fs::temp_directory_path() / "soec_model_cut.json";
    std::ofstream(cut) << text.substr(0, text.size() / 2);
    CHECK_THROWS(load_model(cut));

    // version bump
    const fs::path vers = fs::temp_directory_path() / "soec_model_vers.json";
    std::string bumped = text;
    const auto pos = bumped.find("\"version\"");
    REQUIRE(pos != std::string::npos);
    const auto colon = bumped.find(':', pos);
    bumped.replace(colon + 1, bumped.find_first_of(",}", colon) - colon - 1, " 9999");
    std::ofstream(vers) << bumped;
    CHECK_THROWS(load_model(vers));
}
