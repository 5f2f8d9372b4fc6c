#pragma once

#include <cstdint>
#include <vector>

// Digital-net quasi-random points for the variance-based sensitivity
// estimators. Direction numbers are the standard Joe-Kuo table entries for
// the first eight dimensions at 32-bit resolution; points are generated by
// direct binary expansion of the index, so any point is random-accessible
// (parallel-friendly, no generator state to share).

namespace soec {

class SobolSequence {
public:
    static constexpr int max_dim = 8;

    // Unscrambled net (first point is the origin).
    explicit SobolSequence(int dim);

    // Digitally shifted net: every dimension is XOR-ed with a 32-bit mask
    // derived from the seed, preserving the net structure while decorrelating
    // replicates. seed = 0 applies no shift.
    SobolSequence(int dim, std::uint64_t scramble_seed);

    int dim() const { return dim_; }

    // Writes point `index` (0-based) into out[0..dim).
    void point(std::uint64_t index, double* out) const;

    std::vector<double> point(std::uint64_t index) const;

private:
    int dim_;
    std::uint32_t dirs_[max_dim][32];
    std::uint32_t shift_[max_dim];
};

}  // namespace soec
