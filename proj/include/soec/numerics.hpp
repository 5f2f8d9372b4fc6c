#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

// Small numerics toolkit: bracketing root finders, deterministic random
// numbers, and order-stable summation. Everything here is seed- and
// platform-deterministic; nothing reads global state.

namespace soec::num {

struct RootResult {
    double x = 0.0;
    int iters = 0;
    bool converged = false;
};

// Brent-Dekker on [a, b]. Requires f(a) and f(b) of opposite sign (or one of
// them zero); throws std::invalid_argument otherwise.
RootResult brent(const std::function<double(double)>& f, double a, double b,
                 double xtol = 1e-12, int max_iter = 200);

// splitmix64 step; used to derive independent stream seeds from one master
// seed without correlation between consecutive streams.
std::uint64_t splitmix64(std::uint64_t& state);

// xoshiro256++ seeded through splitmix64. Uniforms use a fixed 53-bit
// scaling, so streams are bit-identical across platforms and standard
// library versions (std distributions are implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    double uniform01();                      // [0, 1)
    double uniform(double lo, double hi);    // [lo, hi)
    std::uint32_t bits32();
    std::uint64_t bits64();

    // Fisher-Yates permutation of 0..n-1.
    std::vector<std::size_t> permutation(std::size_t n);

private:
    std::uint64_t s_[4];
    std::uint64_t next64();
};

// Pairwise (cascade) summation: result independent of chunked evaluation
// order used by the parallel kernels, and more accurate than naive
// accumulation on long vectors.
double pairwise_sum(std::span<const double> v);

double mean(std::span<const double> v);

// Population variance about the supplied mean.
double variance(std::span<const double> v, double mu);

}  // namespace soec::num
