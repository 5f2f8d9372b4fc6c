#include "soec/sobol_seq.hpp"

#include <stdexcept>

#include "soec/numerics.hpp"

namespace soec {

namespace {

// Joe-Kuo table rows for dimensions 2..8 (dimension 1 is the van der Corput
// sequence): primitive polynomial degree s, coefficient a, initial m values.
struct DirRow {
    int s;
    std::uint32_t a;
    std::uint32_t m[5];
};

constexpr DirRow k_rows[7] = {
    {1, 0, {1, 0, 0, 0, 0}},
    {2, 1, {1, 3, 0, 0, 0}},
    {3, 1, {1, 3, 1, 0, 0}},
    {3, 2, {1, 1, 1, 0, 0}},
    {4, 1, {1, 1, 3, 3, 0}},
    {4, 4, {1, 3, 5, 13, 0}},
    {5, 2, {1, 1, 5, 5, 17}},
};

}  // namespace

SobolSequence::SobolSequence(int dim) : SobolSequence(dim, 0) {}

SobolSequence::SobolSequence(int dim, std::uint64_t scramble_seed) : dim_(dim) {
    if (dim < 1 || dim > max_dim)
        throw std::invalid_argument("SobolSequence: dimension must be in [1, 8]");

    constexpr int bits = 32;
    for (int b = 0; b < bits; ++b) dirs_[0][b] = 1u << (31 - b);  // van der Corput

    for (int d = 1; d < dim; ++d) {
        const DirRow& row = k_rows[d - 1];
        const int s = row.s;
        std::uint32_t m[bits];
        for (int k = 0; k < s; ++k) m[k] = row.m[k];
        for (int k = s; k < bits; ++k) {
            // recurrence: m_k = 2 a_1 m_{k-1} xor 4 a_2 m_{k-2} xor ... xor
            //             2^s m_{k-s} xor m_{k-s}
            std::uint32_t v = m[k - s] ^ (m[k - s] << s);
            for (int j = 1; j < s; ++j)
                if ((row.a >> (s - 1 - j)) & 1u) v ^= m[k - j] << j;
            m[k] = v;
        }
        for (int b = 0; b < bits; ++b) dirs_[d][b] = m[b] << (31 - b);
    }

    for (int d = 0; d < max_dim; ++d) shift_[d] = 0;
    if (scramble_seed != 0) {
        std::uint64_t s = scramble_seed;
        for (int d = 0; d < dim; ++d)
            shift_[d] = static_cast<std::uint32_t>(num::splitmix64(s) >> 32);
    }
}

void SobolSequence::point(std::uint64_t index, double* out) const {
    for (int d = 0; d < dim_; ++d) {
        std::uint32_t x = shift_[d];
        std::uint64_t i = index;
        int b = 0;
        while (i) {
            if (i & 1u) x ^= dirs_[d][b];
            i >>= 1;
            ++b;
        }
        out[d] = static_cast<double>(x) * 0x1.0p-32;
    }
}

std::vector<double> SobolSequence::point(std::uint64_t index) const {
    std::vector<double> out(dim_);
    point(index, out.data());
    return out;
}

}  // namespace soec
