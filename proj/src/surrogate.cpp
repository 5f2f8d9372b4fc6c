#include "soec/surrogate.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "json.hpp"
#include "soec/numerics.hpp"

namespace soec {

namespace {

constexpr const char* k_format = "soec-mlp-ensemble";
constexpr int k_version = 1;

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

inline double scale_to_unit(double x, double lo, double hi) {
    return hi > lo ? 2.0 * (x - lo) / (hi - lo) - 1.0 : 0.0;
}

inline double unscale(double ys, double lo, double hi) {
    return lo + (ys + 1.0) * 0.5 * (hi - lo);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t lane) {
    std::uint64_t s = base ^ (0xd1b54a32d192ed03ULL * (lane + 1));
    return num::splitmix64(s);
}

}  // namespace

std::array<double, 5> response_as_array(const CellResponse& r) {
    return {r.t_max, r.t_min, r.i_up, r.i_mid, r.i_down};
}

CellResponse response_from_array(const std::array<double, 5>& y) {
    return {y[0], y[1], y[2], y[3], y[4]};
}

std::array<double, 4> MlpModel::scale_input(const std::array<double, 4>& x) const {
    std::array<double, 4> xs;
    for (int k = 0; k < 4; ++k) xs[k] = scale_to_unit(x[k], in_lo[k], in_hi[k]);
    return xs;
}

double MlpModel::predict_scaled(const double* xs) const {
    double y = b_out;
    for (int j = 0; j < n_hidden; ++j) {
        double a = b_in[j];
        const double* wr = &w_in[static_cast<std::size_t>(j) * n_in];
        for (int k = 0; k < n_in; ++k) a += wr[k] * xs[k];
        y += w_out[j] * sigmoid(a);
    }
    return y;
}

double MlpModel::predict(const std::array<double, 4>& x) const {
    const auto xs = scale_input(x);
    return unscale(predict_scaled(xs.data()), out_lo, out_hi);
}

CellResponse SurrogateEnsemble::predict(const OperatingPoint& op) const {
    const std::array<double, 4> x{op.t_fur, op.q_air, op.q_st, op.v_cell};
    std::array<double, 5> y;
    for (int o = 0; o < 5; ++o) y[o] = nets[o].predict(x);
    return response_from_array(y);
}

namespace detail {

std::vector<double> pack(const MlpModel& m) {
    std::vector<double> theta;
    theta.reserve(m.parameter_count());
    theta.insert(theta.end(), m.w_in.begin(), m.w_in.end());
    theta.insert(theta.end(), m.b_in.begin(), m.b_in.end());
    theta.insert(theta.end(), m.w_out.begin(), m.w_out.end());
    theta.push_back(m.b_out);
    return theta;
}

void unpack(MlpModel& m, std::span<const double> theta) {
    const std::size_t nh = m.n_hidden, ni = m.n_in;
    m.w_in.assign(theta.begin(), theta.begin() + nh * ni);
    m.b_in.assign(theta.begin() + nh * ni, theta.begin() + nh * (ni + 1));
    m.w_out.assign(theta.begin() + nh * (ni + 1), theta.begin() + nh * (ni + 2));
    m.b_out = theta[nh * (ni + 2)];
}

void jacobian_row(const MlpModel& m, const double* xs, double* out) {
    const int nh = m.n_hidden, ni = m.n_in;
    for (int j = 0; j < nh; ++j) {
        double a = m.b_in[j];
        const double* wr = &m.w_in[static_cast<std::size_t>(j) * ni];
        for (int k = 0; k < ni; ++k) a += wr[k] * xs[k];
        const double s = sigmoid(a);
        const double ds = m.w_out[j] * s * (1.0 - s);
        for (int k = 0; k < ni; ++k) out[j * ni + k] = ds * xs[k];
        out[nh * ni + j] = ds;
        out[nh * (ni + 1) + j] = s;
    }
    out[nh * (ni + 2)] = 1.0;
}

void normal_equations_reference(std::span<const double> jac, std::span<const double> res,
                                std::size_t n_rows, std::size_t n_par, std::vector<double>& jtj,
                                std::vector<double>& jtr) {
    jtj.assign(n_par * n_par, 0.0);
    jtr.assign(n_par, 0.0);
    for (std::size_t r = 0; r < n_rows; ++r) {
        const double* row = &jac[r * n_par];
        for (std::size_t i = 0; i < n_par; ++i) {
            jtr[i] += row[i] * res[r];
            for (std::size_t j = 0; j < n_par; ++j) jtj[i * n_par + j] += row[i] * row[j];
        }
    }
}

}  // namespace detail

namespace {

struct ScaledData {
    std::vector<std::array<double, 4>> xs_train, xs_test;
    std::vector<double> ys_train, ys_test;
    std::array<double, 4> in_lo, in_hi;
    double out_lo, out_hi;
};

ScaledData scale_rows(std::span<const std::array<double, 4>> x_train,
                      std::span<const double> y_train,
                      std::span<const std::array<double, 4>> x_test,
                      std::span<const double> y_test) {
    ScaledData d;
    for (int k = 0; k < 4; ++k) {
        double lo = x_train[0][k], hi = x_train[0][k];
        for (const auto& x : x_train) {
            lo = std::min(lo, x[k]);
            hi = std::max(hi, x[k]);
        }
        d.in_lo[k] = lo;
        d.in_hi[k] = hi;
    }
    d.out_lo = *std::min_element(y_train.begin(), y_train.end());
    d.out_hi = *std::max_element(y_train.begin(), y_train.end());

    auto scale_x = [&](const std::array<double, 4>& x) {
        std::array<double, 4> xs;
        for (int k = 0; k < 4; ++k) xs[k] = scale_to_unit(x[k], d.in_lo[k], d.in_hi[k]);
        return xs;
    };
    for (const auto& x : x_train) d.xs_train.push_back(scale_x(x));
    for (const auto& x : x_test) d.xs_test.push_back(scale_x(x));
    for (double y : y_train) d.ys_train.push_back(scale_to_unit(y, d.out_lo, d.out_hi));
    for (double y : y_test) d.ys_test.push_back(scale_to_unit(y, d.out_lo, d.out_hi));
    return d;
}

double rmse_scaled(const MlpModel& m, const std::vector<std::array<double, 4>>& xs,
                   const std::vector<double>& ys) {
    if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::vector<double> sq(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = m.predict_scaled(xs[i].data()) - ys[i];
        sq[i] = r * r;
    }
    return std::sqrt(num::pairwise_sum(sq) / static_cast<double>(xs.size()));
}

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// One full Levenberg-Marquardt run from one random init. Solves the damped
// normal equations (J^T J + lambda I) delta = -J^T r, shrinking lambda by 10
// on accepted steps and growing it by 10 on rejections.
MlpModel train_single(const ScaledData& d, int n_hidden, std::uint64_t seed,
                      const TrainOptions& opt, TrainReport& report) {
    const std::size_t n = d.xs_train.size();
    MlpModel m;
    m.n_in = 4;
    m.n_hidden = n_hidden;
    m.in_lo = d.in_lo;
    m.in_hi = d.in_hi;
    m.out_lo = d.out_lo;
    m.out_hi = d.out_hi;

    const std::size_t p = m.parameter_count();
    num::Rng rng(seed);
    Eigen::VectorXd theta(p);
    for (std::size_t i = 0; i < p; ++i) theta[i] = rng.uniform(-0.5, 0.5);
    detail::unpack(m, {theta.data(), p});

    RowMat jac(n, p);
    Eigen::VectorXd res(n);
    auto sse = [&](const MlpModel& model, Eigen::VectorXd& out) {
        std::vector<double> sq(n);
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = model.predict_scaled(d.xs_train[i].data()) - d.ys_train[i];
            sq[i] = out[i] * out[i];
        }
        return num::pairwise_sum(sq);
    };

    double cost = sse(m, res);
    double lambda = opt.lambda0;
    MlpModel trial = m;
    Eigen::VectorXd trial_res(n);

    int epoch = 0;
    for (; epoch < opt.max_epochs; ++epoch) {
        for (std::size_t i = 0; i < n; ++i)
            detail::jacobian_row(m, d.xs_train[i].data(), jac.row(i).data());

        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd g = jac.transpose() * res;
        if (g.template lpNorm<Eigen::Infinity>() < opt.grad_tol) break;

        bool accepted = false;
        while (lambda <= opt.lambda_max) {
            Eigen::MatrixXd damped = jtj;
            damped.diagonal().array() += lambda;
            const Eigen::VectorXd delta = damped.ldlt().solve(-g);
            const Eigen::VectorXd cand = theta + delta;
            detail::unpack(trial, {cand.data(), p});
            const double trial_cost = sse(trial, trial_res);
            if (std::isfinite(trial_cost) && trial_cost < cost) {
                theta = cand;
                m = trial;
                res = trial_res;
                cost = trial_cost;
                lambda = std::max(lambda * 0.1, 1e-15);
                accepted = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!accepted) break;  // damping exhausted: local minimum reached
    }

    report.epochs = epoch;
    report.train_rmse = std::sqrt(cost / static_cast<double>(n));
    report.test_rmse = rmse_scaled(m, d.xs_test, d.ys_test);
    report.size_warning = n < 10 * p;

    // R^2 on the test split in physical units
    if (!d.xs_test.empty()) {
        std::vector<double> y_phys(d.ys_test.size());
        for (std::size_t i = 0; i < y_phys.size(); ++i)
            y_phys[i] = unscale(d.ys_test[i], d.out_lo, d.out_hi);
        const double mu = num::mean(y_phys);
        std::vector<double> se(y_phys.size()), st(y_phys.size());
        for (std::size_t i = 0; i < y_phys.size(); ++i) {
            const double pred = unscale(m.predict_scaled(d.xs_test[i].data()), d.out_lo, d.out_hi);
            se[i] = (pred - y_phys[i]) * (pred - y_phys[i]);
            st[i] = (y_phys[i] - mu) * (y_phys[i] - mu);
        }
        const double sst = num::pairwise_sum(st);
        report.r2_test = sst > 0.0 ? 1.0 - num::pairwise_sum(se) / sst
                                   : std::numeric_limits<double>::quiet_NaN();
    } else {
        report.r2_test = std::numeric_limits<double>::quiet_NaN();
    }
    return m;
}

// Restart selection: lowest test RMSE (train RMSE when there is no test
// split), ties to the earliest restart.
bool better_than(const TrainReport& a, const TrainReport& b) {
    const double ka = std::isnan(a.test_rmse) ? a.train_rmse : a.test_rmse;
    const double kb = std::isnan(b.test_rmse) ? b.train_rmse : b.test_rmse;
    return ka < kb;
}

}  // namespace

MlpModel train_lm(std::span<const std::array<double, 4>> x_train, std::span<const double> y_train,
                  std::span<const std::array<double, 4>> x_test, std::span<const double> y_test,
                  int n_hidden, std::uint64_t seed, const TrainOptions& opt, TrainReport* report) {
    if (x_train.empty() || x_train.size() != y_train.size() || x_test.size() != y_test.size())
        throw std::invalid_argument("train_lm: inconsistent or empty training rows");
    if (n_hidden < 1) throw std::invalid_argument("train_lm: n_hidden must be positive");

    const ScaledData d = scale_rows(x_train, y_train, x_test, y_test);
    MlpModel best;
    TrainReport best_rep;
    for (int r = 0; r < std::max(1, opt.restarts); ++r) {
        TrainReport rep;
        MlpModel m = train_single(d, n_hidden, derive_seed(seed, r), opt, rep);
        rep.restart = r;
        if (r == 0 || better_than(rep, best_rep)) {
            best = std::move(m);
            best_rep = rep;
        }
    }
    if (report) *report = best_rep;
    return best;
}

SurrogateEnsemble train_ensemble(const Dataset& ds, std::uint64_t seed, const TrainOptions& opt,
                                 par::Exec exec, std::array<TrainReport, 5>* reports) {
    if (ds.train_idx.empty())
        throw std::invalid_argument("train_ensemble: dataset has no training split");

    std::vector<std::array<double, 4>> x_train, x_test;
    for (auto i : ds.train_idx) {
        const auto& op = ds.points[i].op;
        x_train.push_back({op.t_fur, op.q_air, op.q_st, op.v_cell});
    }
    for (auto i : ds.test_idx) {
        const auto& op = ds.points[i].op;
        x_test.push_back({op.t_fur, op.q_air, op.q_st, op.v_cell});
    }

    std::array<ScaledData, 5> data;
    std::array<std::uint64_t, 5> out_seed;
    for (int o = 0; o < 5; ++o) {
        std::vector<double> y_train, y_test;
        for (auto i : ds.train_idx) y_train.push_back(response_as_array(ds.points[i].resp)[o]);
        for (auto i : ds.test_idx) y_test.push_back(response_as_array(ds.points[i].resp)[o]);
        data[o] = scale_rows(x_train, y_train, x_test, y_test);
        out_seed[o] = derive_seed(seed ^ 0xce11da7aULL, o);
    }

    // flat job list: every (output, restart) pair trains independently
    const int restarts = std::max(1, opt.restarts);
    const int n_jobs = 5 * restarts;
    std::vector<MlpModel> models(n_jobs);
    std::vector<TrainReport> reps(n_jobs);
    par::for_each_index(static_cast<std::size_t>(n_jobs), exec, [&](std::size_t job) {
        const int o = static_cast<int>(job) / restarts;
        const int r = static_cast<int>(job) % restarts;
        models[job] = train_single(data[o], SurrogateEnsemble::default_hidden[o],
                                   derive_seed(out_seed[o], r), opt, reps[job]);
        reps[job].restart = r;
    });

    SurrogateEnsemble ens;
    for (int o = 0; o < 5; ++o) {
        int best = o * restarts;
        for (int r = 1; r < restarts; ++r)
            if (better_than(reps[o * restarts + r], reps[best])) best = o * restarts + r;
        ens.nets[o] = std::move(models[best]);
        if (reports) (*reports)[o] = reps[best];
    }
    return ens;
}

void save_model(const SurrogateEnsemble& e, const std::filesystem::path& file) {
    nlohmann::json j;
    j["format"] = k_format;
    j["version"] = k_version;
    j["outputs"] = {"t_max", "t_min", "i_up", "i_mid", "i_down"};
    for (const auto& m : e.nets) {
        nlohmann::json n;
        n["n_in"] = m.n_in;
        n["n_hidden"] = m.n_hidden;
        n["w_in"] = m.w_in;
        n["b_in"] = m.b_in;
        n["w_out"] = m.w_out;
        n["b_out"] = m.b_out;
        n["in_lo"] = m.in_lo;
        n["in_hi"] = m.in_hi;
        n["out_lo"] = m.out_lo;
        n["out_hi"] = m.out_hi;
        j["nets"].push_back(std::move(n));
    }
    std::ofstream f(file, std::ios::binary);
    if (!f) throw std::runtime_error("save_model: cannot write " + file.string());
    f << j.dump(1) << '\n';
}

SurrogateEnsemble load_model(const std::filesystem::path& file) {
    std::ifstream f(file, std::ios::binary);
    if (!f) throw std::runtime_error("load_model: cannot open " + file.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
        // e.byte is the offset where parsing stopped (truncation shows here)
        throw std::runtime_error("load_model: " + file.string() + ": malformed at byte " +
                                 std::to_string(e.byte) + ": " + e.what());
    }
    if (j.value("format", "") != k_format)
        throw std::runtime_error("load_model: " + file.string() + ": not a model file");
    if (j.value("version", -1) != k_version)
        throw std::runtime_error("load_model: " + file.string() + ": unsupported version " +
                                 std::to_string(j.value("version", -1)));
    if (!j.contains("nets") || j["nets"].size() != 5)
        throw std::runtime_error("load_model: " + file.string() + ": expected 5 networks");

    SurrogateEnsemble e;
    for (int o = 0; o < 5; ++o) {
        const auto& n = j["nets"][o];
        MlpModel& m = e.nets[o];
        m.n_in = n.at("n_in").get<int>();
        m.n_hidden = n.at("n_hidden").get<int>();
        m.w_in = n.at("w_in").get<std::vector<double>>();
        m.b_in = n.at("b_in").get<std::vector<double>>();
        m.w_out = n.at("w_out").get<std::vector<double>>();
        m.b_out = n.at("b_out").get<double>();
        const auto in_lo = n.at("in_lo").get<std::vector<double>>();
        const auto in_hi = n.at("in_hi").get<std::vector<double>>();
        if (m.n_in != 4 || in_lo.size() != 4 || in_hi.size() != 4)
            throw std::runtime_error("load_model: " + file.string() + ": bad input scaling block");
        std::copy(in_lo.begin(), in_lo.end(), m.in_lo.begin());
        std::copy(in_hi.begin(), in_hi.end(), m.in_hi.begin());
        m.out_lo = n.at("out_lo").get<double>();
        m.out_hi = n.at("out_hi").get<double>();
        if (m.n_hidden < 1 ||
            m.w_in.size() != static_cast<std::size_t>(m.n_hidden) * 4 ||
            m.b_in.size() != static_cast<std::size_t>(m.n_hidden) ||
            m.w_out.size() != static_cast<std::size_t>(m.n_hidden))
            throw std::runtime_error("load_model: " + file.string() +
                                     ": parameter block sizes disagree with n_hidden");
    }
    return e;
}

}  // namespace soec
