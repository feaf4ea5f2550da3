#include "linksim/modem.hpp"

#include <cmath>
#include <limits>

namespace linksim {

int bits_per_symbol(int order) {
    int k = 0;
    while ((1 << k) < order) ++k;
    return k;
}

unsigned binary_to_gray(unsigned v) { return v ^ (v >> 1); }

unsigned gray_to_binary(unsigned g) {
    unsigned b = 0;
    for (; g; g >>= 1) b ^= g;
    return b;
}

BitSequence random_bits(std::size_t count, RngStream& rng) {
    BitSequence bits(count);
    std::uint64_t word = 0;
    int avail = 0;
    for (std::size_t i = 0; i < count; ++i) {
        if (avail == 0) {
            word = rng.next_u64();
            avail = 64;
        }
        bits[i] = static_cast<Bit>(word & 1u);
        word >>= 1;
        --avail;
    }
    return bits;
}

std::vector<BitBlock> group_bits(const BitSequence& bits, int k) {
    if (k < 1) throw NonDivisibleLength("group_bits: k must be >= 1");
    if (bits.size() % static_cast<std::size_t>(k) != 0)
        throw NonDivisibleLength("group_bits: bit count " + std::to_string(bits.size()) +
                                 " not divisible by k=" + std::to_string(k));
    std::vector<BitBlock> blocks(bits.size() / static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        blocks[i].assign(bits.begin() + static_cast<std::ptrdiff_t>(i) * k,
                         bits.begin() + static_cast<std::ptrdiff_t>(i + 1) * k);
    }
    return blocks;
}

Constellation build_constellation(int order) {
    if (!is_supported_order(order))
        throw UnsupportedOrder("build_constellation: unsupported order " + std::to_string(order));

    Constellation c;
    c.order = order;
    c.bits_per_symbol = bits_per_symbol(order);
    c.points.resize(order);
    c.labels.resize(static_cast<std::size_t>(order));

    if (order == 2) {
        // BPSK: bit 0 -> -1, bit 1 -> +1; already unit energy.
        c.points(0) = Complex(-1.0, 0.0);
        c.points(1) = Complex(+1.0, 0.0);
        c.labels = {0u, 1u};
        c.scale = 1.0;
        return c;
    }

    const int half = c.bits_per_symbol / 2;
    const int levels = 1 << half;  // sqrt(M) levels per axis
    // Mean power of the odd-integer grid {+-1, +-3, ...}^2 is 2(L^2-1)/3.
    const double grid_power = 2.0 * (static_cast<double>(levels) * levels - 1.0) / 3.0;
    c.scale = 1.0 / std::sqrt(grid_power);

    for (int v = 0; v < order; ++v) {
        const unsigned i_bits = static_cast<unsigned>(v) >> half;
        const unsigned q_bits = static_cast<unsigned>(v) & static_cast<unsigned>(levels - 1);
        const int i_level = static_cast<int>(gray_to_binary(i_bits));
        const int q_level = static_cast<int>(gray_to_binary(q_bits));
        const double re = static_cast<double>(2 * i_level - (levels - 1));
        const double im = static_cast<double>(2 * q_level - (levels - 1));
        c.points(v) = c.scale * Complex(re, im);
        c.labels[static_cast<std::size_t>(v)] = static_cast<std::uint32_t>(v);
    }
    return c;
}

std::uint32_t block_label(const Bit* bits, int k) {
    std::uint32_t label = 0;
    for (int j = 0; j < k; ++j) label = (label << 1) | (bits[j] & 1u);
    return label;
}

SymbolSequence modulate(const BitSequence& bits, const Constellation& constellation) {
    const int k = constellation.bits_per_symbol;
    if (bits.size() % static_cast<std::size_t>(k) != 0)
        throw NonDivisibleLength("modulate: bit count " + std::to_string(bits.size()) +
                                 " not divisible by k=" + std::to_string(k));
    const Eigen::Index n_symbols = static_cast<Eigen::Index>(bits.size()) / k;
    SymbolSequence symbols(n_symbols);
    for (Eigen::Index i = 0; i < n_symbols; ++i) {
        const std::uint32_t label = block_label(bits.data() + i * k, k);
        symbols(i) = constellation.points(static_cast<Eigen::Index>(label));
    }
    return symbols;
}

int nearest_symbol(Complex y, const Constellation& constellation) {
    int best = 0;
    double best_distance = std::numeric_limits<double>::infinity();
    for (int m = 0; m < constellation.order; ++m) {
        const double d = std::norm(y - constellation.points(m));
        if (d < best_distance) {
            best_distance = d;
            best = m;
        }
    }
    return best;
}

}  // namespace linksim
