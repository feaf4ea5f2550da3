#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "linksim/channel.hpp"

using namespace linksim;

TEST_CASE("ebn0 to n0 conversion") {
    CHECK(ebn0_to_n0(0.0, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(ebn0_to_n0(0.0, 2) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(ebn0_to_n0(10.0, 4) == doctest::Approx(0.025).epsilon(1e-15));
    CHECK(ebn0_db_to_esn0(10.0, 4) == doctest::Approx(40.0).epsilon(1e-15));
    CHECK_THROWS_AS(ebn0_to_n0(0.0, 0), ConfigInvalid);
    CHECK_THROWS_AS(ebn0_to_n0(0.0, 2, 0.0), ConfigInvalid);
}

TEST_CASE("NoiseSpec invariant") {
    const NoiseSpec spec = NoiseSpec::from_ebn0(6.0, 4);
    CHECK(spec.n0 == doctest::Approx(1.0 / (4.0 * std::pow(10.0, 0.6))).epsilon(1e-15));
    CHECK(spec.n0 > 0.0);
}

TEST_CASE("awgn is deterministic given seed and stream") {
    SymbolSequence x(64);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = Complex(double(i), -double(i));
    RngStream rng_a(42, make_stream(StreamDomain::channel_noise, 5));
    RngStream rng_b(42, make_stream(StreamDomain::channel_noise, 5));
    const SymbolSequence ya = awgn(x, 0.25, rng_a);
    const SymbolSequence yb = awgn(x, 0.25, rng_b);
    for (Eigen::Index i = 0; i < x.size(); ++i) CHECK(ya(i) == yb(i));

    // A different stream id produces a different realization.
    RngStream rng_c(42, make_stream(StreamDomain::channel_noise, 6));
    const SymbolSequence yc = awgn(x, 0.25, rng_c);
    CHECK(ya(0) != yc(0));
}

TEST_CASE("awgn rejects non-positive n0") {
    SymbolSequence x = SymbolSequence::Zero(1);
    RngStream rng(1, 0);
    CHECK_THROWS_AS(awgn(x, 0.0, rng), InvalidNoise);
    CHECK_THROWS_AS(awgn(x, -1.0, rng), InvalidNoise);
}

TEST_CASE("vanishing noise leaves the input unchanged") {
    SymbolSequence x(8);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = Complex(1.0 - double(i), 0.5 * i);
    RngStream rng(9, 0);
    const SymbolSequence y = awgn(x, 1e-30, rng);
    for (Eigen::Index i = 0; i < x.size(); ++i) CHECK(std::abs(y(i) - x(i)) < 1e-14);
}

TEST_CASE("noise statistics match CN(0, n0)") {
    const Eigen::Index n = 1000000;
    const double n0 = 0.5;
    SymbolSequence x = SymbolSequence::Zero(n);
    RngStream rng(2024, make_stream(StreamDomain::channel_noise, 0));
    const SymbolSequence y = awgn(x, n0, rng);

    double sum_re = 0, sum_im = 0, sum_re2 = 0, sum_im2 = 0, sum_cross = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        sum_re += y(i).real();
        sum_im += y(i).imag();
        sum_re2 += y(i).real() * y(i).real();
        sum_im2 += y(i).imag() * y(i).imag();
        sum_cross += y(i).real() * y(i).imag();
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    const double mean_se = std::sqrt(n0 / 2.0) * std::sqrt(inv_n);
    CHECK(std::abs(sum_re * inv_n) < 5.0 * mean_se);
    CHECK(std::abs(sum_im * inv_n) < 5.0 * mean_se);

    // Per-component variance n0/2; variance of the squared values is
    // 2*(n0/2)^2 for a Gaussian, giving the standard error below.
    const double var_se = std::sqrt(2.0) * (n0 / 2.0) * std::sqrt(inv_n);
    CHECK(std::abs(sum_re2 * inv_n - n0 / 2.0) < 5.0 * var_se);
    CHECK(std::abs(sum_im2 * inv_n - n0 / 2.0) < 5.0 * var_se);
    CHECK(std::abs(sum_re2 * inv_n + sum_im2 * inv_n - n0) < 5.0 * var_se * std::sqrt(2.0));

    const double corr = (sum_cross * inv_n) / (n0 / 2.0);
    CHECK(std::abs(corr) < 5.0 / std::sqrt(static_cast<double>(n)));
}
