#include "soec/numerics.hpp"

#include <cmath>
#include <numeric>

namespace soec::num {

RootResult brent(const std::function<double(double)>& f, double a, double b, double xtol,
                 int max_iter) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return {a, 0, true};
    if (fb == 0.0) return {b, 0, true};
    if ((fa > 0.0) == (fb > 0.0))
        throw std::invalid_argument("brent: endpoints do not bracket a sign change");

    double c = a, fc = fa;
    double d = b - a, e = d;
    RootResult res;
    for (int it = 1; it <= max_iter; ++it) {
        res.iters = it;
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a; fc = fa; d = b - a; e = d;
        }
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol = 2.0 * xtol * std::max(1.0, std::fabs(b));
        const double m = 0.5 * (c - b);
        if (std::fabs(m) <= tol || fb == 0.0) {
            res.x = b;
            res.converged = true;
            return res;
        }
        if (std::fabs(e) >= tol && std::fabs(fa) > std::fabs(fb)) {
            // inverse quadratic / secant step
            const double s = fb / fa;
            double p, q;
            if (a == c) {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc, rr = fb / fc;
                p = s * (2.0 * m * qq * (qq - rr) - (b - a) * (rr - 1.0));
                q = (qq - 1.0) * (rr - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q; else p = -p;
            if (2.0 * p < std::min(3.0 * m * q - std::fabs(tol * q), std::fabs(e * q))) {
                e = d; d = p / q;
            } else {
                d = m; e = m;
            }
        } else {
            d = m; e = m;
        }
        a = b; fa = fb;
        b += (std::fabs(d) > tol) ? d : (m > 0.0 ? tol : -tol);
        fb = f(b);
    }
    res.x = b;
    res.converged = false;
    return res;
}

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {
inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
}  // namespace

Rng::Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& s : s_) s = splitmix64(sm);
}

std::uint64_t Rng::next64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform01() { return static_cast<double>(next64() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

std::uint32_t Rng::bits32() { return static_cast<std::uint32_t>(next64() >> 32); }

std::uint64_t Rng::bits64() { return next64(); }

std::vector<std::size_t> Rng::permutation(std::size_t n) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) {
        // rejection-free modulo is fine here; n is far below 2^32
        const std::size_t j = static_cast<std::size_t>(next64() % i);
        std::swap(idx[i - 1], idx[j]);
    }
    return idx;
}

double pairwise_sum(std::span<const double> v) {
    const std::size_t n = v.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

double mean(std::span<const double> v) {
    if (v.empty()) return 0.0;
    return pairwise_sum(v) / static_cast<double>(v.size());
}

double variance(std::span<const double> v, double mu) {
    if (v.empty()) return 0.0;
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - mu) * (v[i] - mu);
    return pairwise_sum(sq) / static_cast<double>(v.size());
}

}  // namespace soec::num
