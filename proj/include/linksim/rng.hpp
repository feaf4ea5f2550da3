#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace linksim {

// Stream id layout: high 16 bits select a purpose domain, low 48 bits an
// index within it. Keeps bit streams, noise streams, and parameter init
// streams disjoint when they share one user-facing seed.
enum class StreamDomain : std::uint16_t {
    data_bits = 1,
    channel_noise = 2,
    param_init = 3,
    messages = 4,
    scratch = 5,
};

constexpr std::uint64_t make_stream(StreamDomain domain, std::uint64_t index) {
    return (static_cast<std::uint64_t>(domain) << 48) | (index & 0xFFFFFFFFFFFFull);
}

// Training consumes stream indices above this base; Monte Carlo evaluation
// derives its per-batch indices below it. Keeps the two decorrelated when
// they share one user seed.
inline constexpr std::uint64_t kTrainingStreamBase = 1ull << 47;

// Seeded random stream. The pair (seed, stream) fully determines the output
// sequence; normals use Box-Muller on top of the raw 64-bit output so the
// sequence does not depend on the standard library's distribution internals.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream) {
        std::seed_seq seq{
            static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
            static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
        gen_.seed(seq);
    }

    std::uint64_t next_u64() { return gen_(); }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n). Rejection sampling avoids modulo bias.
    int uniform_int(int n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % static_cast<std::uint64_t>(n);
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return static_cast<int>(v % static_cast<std::uint64_t>(n));
    }

    // Standard normal via Box-Muller; the spare value is cached.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // u1 in (0, 1] so the log is finite.
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    // Circularly symmetric complex Gaussian with E|n|^2 = total_variance.
    std::complex<double> complex_gaussian(double total_variance) {
        const double s = std::sqrt(total_variance / 2.0);
        const double re = gaussian();
        const double im = gaussian();
        return {s * re, s * im};
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace linksim
