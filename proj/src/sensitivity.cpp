#include "soec/sensitivity.hpp"

#include <cmath>
#include <fstream>

#include "soec/csv.hpp"
#include "soec/numerics.hpp"
#include "soec/sobol_seq.hpp"

namespace soec {

namespace {

// Sample plan shared by the kernel and the reference implementation: one
// 2k-dimensional digital net supplies A (first k columns) and B (last k),
// mapped affinely onto the box.
struct SamplePlan {
    std::size_t n = 0;
    int k = 0;
    std::vector<double> a, b;  // row-major n x k

    SamplePlan(std::span<const double> lo, std::span<const double> hi, std::size_t n_base,
               std::uint64_t seed) {
        k = static_cast<int>(lo.size());
        n = n_base;
        if (k < 1 || 2 * k > SobolSequence::max_dim)
            throw std::invalid_argument("sobol_indices: dimension must be in [1, 4]");
        for (int d = 0; d < k; ++d)
            if (!(hi[d] > lo[d]))
                throw std::invalid_argument("sobol_indices: empty range on input " +
                                            std::to_string(d));
        if (n_base < 8) throw std::invalid_argument("sobol_indices: n_base too small");

        SobolSequence seq(2 * k, seed);
        a.resize(n * k);
        b.resize(n * k);
        std::vector<double> u(2 * k);
        for (std::size_t r = 0; r < n; ++r) {
            seq.point(r, u.data());
            for (int d = 0; d < k; ++d) {
                a[r * k + d] = lo[d] + (hi[d] - lo[d]) * u[d];
                b[r * k + d] = lo[d] + (hi[d] - lo[d]) * u[k + d];
            }
        }
    }
};

SobolResult estimate(const SamplePlan& plan, std::span<const double> fa,
                     std::span<const double> fb,
                     const std::vector<std::vector<double>>& fab) {
    const std::size_t n = plan.n;
    const int k = plan.k;

    // variance about the mean of all A and B evaluations
    std::vector<double> all(fa.begin(), fa.end());
    all.insert(all.end(), fb.begin(), fb.end());
    const double mu = num::mean(all);
    const double var = num::variance(all, mu);
    if (var < 1e-14)
        throw std::invalid_argument("sobol_indices: output variance below 1e-14; the "
                                    "function is constant on this box");

    SobolResult out;
    out.var_y = var;
    out.n_base = n;
    out.s.resize(k);
    out.st.resize(k);
    std::vector<double> term(n);
    for (int d = 0; d < k; ++d) {
        for (std::size_t r = 0; r < n; ++r) term[r] = fb[r] * (fab[d][r] - fa[r]);
        out.s[d] = num::pairwise_sum(term) / static_cast<double>(n) / var;
        for (std::size_t r = 0; r < n; ++r) {
            const double diff = fa[r] - fab[d][r];
            term[r] = diff * diff;
        }
        out.st[d] = num::pairwise_sum(term) / (2.0 * static_cast<double>(n)) / var;
    }
    return out;
}

}  // namespace

SobolResult sobol_indices_nd(const std::function<double(std::span<const double>)>& f,
                             std::span<const double> lo, std::span<const double> hi,
                             std::size_t n_base, std::uint64_t seed, par::Exec exec) {
    const SamplePlan plan(lo, hi, n_base, seed);
    const std::size_t n = plan.n;
    const int k = plan.k;

    // all n(k+2) evaluations as one flat job list
    std::vector<double> fa(n), fb(n);
    std::vector<std::vector<double>> fab(k, std::vector<double>(n));
    par::for_each_index(n * (k + 2), exec, [&](std::size_t job) {
        const std::size_t r = job % n;
        const int which = static_cast<int>(job / n);
        std::vector<double> x(k);
        if (which == 0) {
            for (int d = 0; d < k; ++d) x[d] = plan.a[r * k + d];
            fa[r] = f(x);
        } else if (which == 1) {
            for (int d = 0; d < k; ++d) x[d] = plan.b[r * k + d];
            fb[r] = f(x);
        } else {
            const int i = which - 2;  // A with column i replaced from B
            for (int d = 0; d < k; ++d) x[d] = plan.a[r * k + d];
            x[i] = plan.b[r * k + i];
            fab[i][r] = f(x);
        }
    });
    return estimate(plan, fa, fb, fab);
}

SobolResult sobol_indices(const std::function<double(const std::array<double, 4>&)>& f,
                          const InputRanges& ranges, std::size_t n_base, std::uint64_t seed,
                          par::Exec exec) {
    const auto box = ranges.as_array();
    std::array<double, 4> lo, hi;
    for (int d = 0; d < 4; ++d) {
        lo[d] = box[d].lo;
        hi[d] = box[d].hi;
    }
    return sobol_indices_nd(
        [&](std::span<const double> x) {
            return f({x[0], x[1], x[2], x[3]});
        },
        lo, hi, n_base, seed, exec);
}

namespace detail {

SobolResult sobol_indices_reference(const std::function<double(std::span<const double>)>& f,
                                    std::span<const double> lo, std::span<const double> hi,
                                    std::size_t n_base, std::uint64_t seed) {
    const SamplePlan plan(lo, hi, n_base, seed);
    const std::size_t n = plan.n;
    const int k = plan.k;

    std::vector<double> fa(n), fb(n), x(k);
    std::vector<std::vector<double>> fab(k, std::vector<double>(n));
    for (std::size_t r = 0; r < n; ++r) {
        for (int d = 0; d < k; ++d) x[d] = plan.a[r * k + d];
        fa[r] = f(x);
        for (int d = 0; d < k; ++d) x[d] = plan.b[r * k + d];
        fb[r] = f(x);
        for (int i = 0; i < k; ++i) {
            for (int d = 0; d < k; ++d) x[d] = plan.a[r * k + d];
            x[i] = plan.b[r * k + i];
            fab[i][r] = f(x);
        }
    }

    // naive accumulation on purpose; the kernel path must agree within
    // floating-point reassociation noise
    double mu = 0.0;
    for (double v : fa) mu += v;
    for (double v : fb) mu += v;
    mu /= static_cast<double>(2 * n);
    double var = 0.0;
    for (double v : fa) var += (v - mu) * (v - mu);
    for (double v : fb) var += (v - mu) * (v - mu);
    var /= static_cast<double>(2 * n);
    if (var < 1e-14)
        throw std::invalid_argument("sobol_indices: output variance below 1e-14; the "
                                    "function is constant on this box");

    SobolResult out;
    out.var_y = var;
    out.n_base = n;
    out.s.resize(k);
    out.st.resize(k);
    for (int i = 0; i < k; ++i) {
        double vi = 0.0, vt = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            vi += fb[r] * (fab[i][r] - fa[r]);
            vt += (fa[r] - fab[i][r]) * (fa[r] - fab[i][r]);
        }
        out.s[i] = vi / static_cast<double>(n) / var;
        out.st[i] = vt / (2.0 * static_cast<double>(n)) / var;
    }
    return out;
}

}  // namespace detail

IndexReport index_report(const SurrogateEnsemble& ens, const InputRanges& ranges,
                         std::size_t n_base, std::uint64_t seed, par::Exec exec) {
    IndexReport rpt;
    rpt.n_base = n_base;
    rpt.seed = seed;

    auto indices_at = [&](const std::array<double, 4>& x) {
        const OperatingPoint op{x[0], x[1], x[2], x[3]};
        return performance_indices(op, ens.predict(op));
    };
    const std::array<std::function<double(const std::array<double, 4>&)>, 3> target{
        [&](const std::array<double, 4>& x) { return indices_at(x).su; },
        [&](const std::array<double, 4>& x) { return indices_at(x).ih_i; },
        [&](const std::array<double, 4>& x) { return indices_at(x).ih_t; },
    };
    for (int t = 0; t < 3; ++t)
        rpt.result[t] = sobol_indices(target[t], ranges, n_base, seed, exec);
    return rpt;
}

void save_index_report_csv(const IndexReport& rpt, const std::filesystem::path& file) {
    std::vector<std::string> header{"target", "index", "t_fur", "q_air", "q_st", "v_cell"};
    // target and index kind are text; write by hand on top of the numeric format
    std::string body;
    for (std::size_t i = 0; i < header.size(); ++i) body += (i ? "," : "") + header[i];
    body += '\n';
    for (int t = 0; t < 3; ++t) {
        for (int kind = 0; kind < 2; ++kind) {
            const auto& v = kind == 0 ? rpt.result[t].s : rpt.result[t].st;
            body += std::string(IndexReport::targets[t]) + "," + (kind == 0 ? "s" : "st");
            for (int d = 0; d < 4; ++d) body += "," + csv::format_double(v[d]);
            body += '\n';
        }
    }
    std::ofstream f(file, std::ios::binary);
    if (!f) throw std::runtime_error("index report: cannot write " + file.string());
    f << body;
}

}  // namespace soec
