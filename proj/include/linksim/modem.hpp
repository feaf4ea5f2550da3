#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "linksim/errors.hpp"
#include "linksim/rng.hpp"

namespace linksim {

using Bit = std::uint8_t;
using BitSequence = std::vector<Bit>;
using BitBlock = std::vector<Bit>;
using Complex = std::complex<double>;
using SymbolSequence = Eigen::VectorXcd;

// Gray-labeled unit-average-energy constellation. Points are stored in label
// order: points[v] carries the k-bit label v with the first label bit as MSB,
// so labels[i] == i by construction. For square orders the first k/2 label
// bits select the in-phase level and the last k/2 the quadrature level, each
// through a reflected Gray code over the odd-integer grid.
struct Constellation {
    int order = 0;             // M
    int bits_per_symbol = 0;   // k = log2(M)
    Eigen::VectorXcd points;   // scaled to unit average energy
    std::vector<std::uint32_t> labels;
    double scale = 1.0;        // alpha = 1/sqrt(mean grid power)

    // j-th label bit of point `index`, 0-based, MSB first.
    Bit label_bit(int index, int j) const {
        return static_cast<Bit>((labels[static_cast<std::size_t>(index)] >>
                                 (bits_per_symbol - 1 - j)) &
                                1u);
    }
};

constexpr bool is_supported_order(int order) {
    return order == 2 || order == 4 || order == 16 || order == 64 || order == 256;
}

int bits_per_symbol(int order);
unsigned binary_to_gray(unsigned v);
unsigned gray_to_binary(unsigned g);

BitSequence random_bits(std::size_t count, RngStream& rng);

// Partition into consecutive k-bit blocks; throws NonDivisibleLength.
std::vector<BitBlock> group_bits(const BitSequence& bits, int k);

// Gray-labeled constellation for M in {2, 4, 16, 64, 256}.
Constellation build_constellation(int order);

// Label bits -> constellation points, one symbol per k bits.
SymbolSequence modulate(const BitSequence& bits, const Constellation& constellation);

// Index of the point minimizing |y - x|^2; lowest index wins ties.
int nearest_symbol(Complex y, const Constellation& constellation);

// Label value of a k-bit block, first bit = MSB.
std::uint32_t block_label(const Bit* bits, int k);

}  // namespace linksim
