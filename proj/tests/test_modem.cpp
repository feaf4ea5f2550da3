#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "linksim/modem.hpp"

using namespace linksim;

namespace {

int hamming(std::uint32_t a, std::uint32_t b) {
    int d = 0;
    for (std::uint32_t x = a ^ b; x; x >>= 1) d += x & 1u;
    return d;
}

// Integer grid coordinates of a square-QAM point, recovered from the scaled
// value: (level index i, q) with coordinates 2i - (L-1).
std::pair<int, int> grid_coords(const Constellation& c, int m) {
    const int levels = 1 << (c.bits_per_symbol / 2);
    const double re = c.points(m).real() / c.scale;
    const double im = c.points(m).imag() / c.scale;
    return {static_cast<int>(std::lround((re + levels - 1) / 2.0)),
            static_cast<int>(std::lround((im + levels - 1) / 2.0))};
}

}  // namespace

TEST_CASE("group_bits partitions in order") {
    CHECK(group_bits({1, 0, 1, 1}, 2) == std::vector<BitBlock>{{1, 0}, {1, 1}});
    CHECK(group_bits({0, 1, 1, 0}, 4) == std::vector<BitBlock>{{0, 1, 1, 0}});
    CHECK_THROWS_AS(group_bits({1, 0, 1}, 2), NonDivisibleLength);
}

TEST_CASE("group_bits concatenation identity") {
    RngStream rng(7, 0);
    for (const int k : {1, 2, 3, 4, 6, 8}) {
        const std::size_t n = static_cast<std::size_t>(k) * (1 + rng.uniform_int(50));
        const BitSequence bits = random_bits(n, rng);
        BitSequence joined;
        for (const auto& block : group_bits(bits, k))
            joined.insert(joined.end(), block.begin(), block.end());
        CHECK(joined == bits);
    }
}

TEST_CASE("BPSK constellation") {
    const Constellation c = build_constellation(2);
    CHECK(c.bits_per_symbol == 1);
    CHECK(c.points(0) == Complex(-1.0, 0.0));
    CHECK(c.points(1) == Complex(+1.0, 0.0));
    CHECK(c.labels == std::vector<std::uint32_t>{0, 1});
}

TEST_CASE("square QAM scaling") {
    const Constellation qam16 = build_constellation(16);
    CHECK(qam16.scale == doctest::Approx(1.0 / std::sqrt(10.0)).epsilon(1e-15));
    const Constellation qpsk = build_constellation(4);
    for (int m = 0; m < 4; ++m) CHECK(std::abs(qpsk.points(m)) == doctest::Approx(1.0));
}

TEST_CASE("unsupported orders rejected") {
    CHECK_THROWS_AS(build_constellation(8), UnsupportedOrder);
    CHECK_THROWS_AS(build_constellation(32), UnsupportedOrder);
    CHECK_THROWS_AS(build_constellation(3), UnsupportedOrder);
}

TEST_CASE("unit average energy") {
    for (const int order : {2, 4, 16, 64, 256}) {
        const Constellation c = build_constellation(order);
        CHECK(c.points.squaredNorm() / order == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("Gray adjacency on the grid") {
    for (const int order : {4, 16, 64, 256}) {
        const Constellation c = build_constellation(order);
        for (int a = 0; a < order; ++a) {
            const auto [ia, qa] = grid_coords(c, a);
            for (int b = a + 1; b < order; ++b) {
                const auto [ib, qb] = grid_coords(c, b);
                const bool adjacent = std::abs(ia - ib) + std::abs(qa - qb) == 1;
                if (adjacent) CHECK(hamming(c.labels[a], c.labels[b]) == 1);
            }
        }
    }
}

TEST_CASE("modulate basic mappings") {
    const Constellation bpsk = build_constellation(2);
    const SymbolSequence s = modulate({1, 0}, bpsk);
    CHECK(s(0) == Complex(+1.0, 0.0));
    CHECK(s(1) == Complex(-1.0, 0.0));

    const Constellation qpsk = build_constellation(4);
    const SymbolSequence q = modulate({0, 0}, qpsk);
    CHECK(q.size() == 1);
    CHECK(q(0) == qpsk.points(0));

    CHECK_THROWS_AS(modulate({1, 0, 1}, qpsk), NonDivisibleLength);
}

TEST_CASE("16-QAM symbol magnitudes") {
    const Constellation c = build_constellation(16);
    RngStream rng(3, 1);
    const BitSequence bits = random_bits(8, rng);
    const SymbolSequence s = modulate(bits, c);
    CHECK(s.size() == 2);
    const std::set<int> allowed{2, 10, 18};  // |grid|^2 in tenths
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        const int power10 = static_cast<int>(std::lround(std::norm(s(i)) * 10.0));
        CHECK(allowed.count(power10) == 1);
    }
}

TEST_CASE("nearest_symbol rules") {
    const Constellation bpsk = build_constellation(2);
    CHECK(nearest_symbol(Complex(0.0, 0.0), bpsk) == 0);  // tie -> lowest index
    for (int m = 0; m < bpsk.order; ++m) CHECK(nearest_symbol(bpsk.points(m), bpsk) == m);

    const Constellation qpsk = build_constellation(4);
    // Brute-force reference for a far first-quadrant point.
    const Complex y(10.0, 10.0);
    int best = 0;
    for (int m = 1; m < 4; ++m)
        if (std::norm(y - qpsk.points(m)) < std::norm(y - qpsk.points(best))) best = m;
    CHECK(nearest_symbol(y, qpsk) == best);
    CHECK(qpsk.points(best).real() > 0);
    CHECK(qpsk.points(best).imag() > 0);
}

TEST_CASE("noiseless round trip recovers bits") {
    RngStream rng(11, 2);
    for (const int order : {2, 4, 16, 64, 256}) {
        const Constellation c = build_constellation(order);
        const int k = c.bits_per_symbol;
        const BitSequence bits = random_bits(static_cast<std::size_t>(k) * 64, rng);
        const SymbolSequence s = modulate(bits, c);
        BitSequence recovered;
        for (Eigen::Index i = 0; i < s.size(); ++i) {
            const int m = nearest_symbol(s(i), c);
            for (int j = 0; j < k; ++j) recovered.push_back(c.label_bit(m, j));
        }
        CHECK(recovered == bits);
    }
}

TEST_CASE("gray code helpers invert") {
    for (unsigned v = 0; v < 256; ++v) CHECK(gray_to_binary(binary_to_gray(v)) == v);
}
