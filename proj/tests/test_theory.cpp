#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "linksim/theory.hpp"

using namespace linksim;

namespace {

// Independent long double reference for Q(x).
long double q_reference(long double x) { return 0.5L * erfcl(x / std::sqrt(2.0L)); }

}  // namespace

TEST_CASE("q_function values") {
    CHECK(q_function(0.0) == 0.5);
    CHECK(q_function(-1.3) == doctest::Approx(1.0 - q_function(1.3)).epsilon(1e-14));
    CHECK(std::abs(q_function(1.0) - static_cast<double>(q_reference(1.0L))) < 1e-15);
    CHECK(q_function(1.0) == doctest::Approx(0.158655).epsilon(1e-5));
    for (const double x : {-2.0, -0.5, 0.3, 2.7, 5.0})
        CHECK(std::abs(q_function(x) - static_cast<double>(q_reference(x))) < 1e-14);
}

TEST_CASE("ser_mqam values and limits") {
    CHECK(ser_mqam(1e6, 4) < 1e-12);
    CHECK(std::abs(ser_mqam(1.0, 4) - 2.0 * static_cast<double>(q_reference(1.0L))) < 1e-13);
    CHECK(ser_mqam(1.0, 4) == doctest::Approx(0.317311).epsilon(1e-5));
    const double expected_16 = 3.0 * static_cast<double>(q_reference(std::sqrt(2.0L)));
    CHECK(std::abs(ser_mqam(10.0, 16) - expected_16) < 1e-13);
    CHECK(ser_mqam(10.0, 16) == doctest::Approx(0.235950).epsilon(1e-5));
}

TEST_CASE("ser_mqam rejects non-square orders") {
    CHECK_THROWS_AS(ser_mqam(1.0, 2), UnsupportedOrder);
    CHECK_THROWS_AS(ser_mqam(1.0, 8), UnsupportedOrder);
    CHECK_THROWS_AS(ser_mqam(1.0, 32), UnsupportedOrder);
}

TEST_CASE("ser_mqam monotone in esn0 and order") {
    // Below the cap the curve is strictly decreasing in esn0.
    double previous = ser_mqam(2.0, 16);
    CHECK(previous < 1.0);
    for (double esn0 = 3.4; esn0 < 300.0; esn0 *= 1.7) {
        const double ser = ser_mqam(esn0, 16);
        CHECK(ser < previous);
        previous = ser;
    }
    CHECK(ser_mqam(0.1, 16) == 1.0);  // capped at low SNR
    for (const double esn0 : {1.0, 5.0, 25.0})
        CHECK(ser_mqam(esn0, 4) < ser_mqam(esn0, 16));
    for (const double esn0 : {2.0, 5.0, 25.0})
        CHECK(ser_mqam(esn0, 16) < ser_mqam(esn0, 64));
}

TEST_CASE("M=4 reduces to 2 Q(sqrt(esn0))") {
    for (const double esn0 : {0.3, 1.0, 4.0, 12.0})
        CHECK(ser_mqam(esn0, 4) == 2.0 * q_function(std::sqrt(esn0)));
}

TEST_CASE("ber_paper ratio") {
    CHECK(ber_paper(0.0, 16) == 0.0);
    CHECK(ber_paper(0.3, 4) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(ber_paper(0.15, 16) == doctest::Approx(0.08).epsilon(1e-15));
}

TEST_CASE("ber_gray_approx ratio") {
    CHECK(ber_gray_approx(0.3, 4) == doctest::Approx(0.15).epsilon(1e-15));
    CHECK(ber_gray_approx(0.4, 16) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(ber_gray_approx(0.123, 2) == doctest::Approx(0.123).epsilon(1e-15));
}

TEST_CASE("ber at or below ser") {
    for (const int order : {4, 16, 64, 256}) {
        for (const double esn0 : {0.5, 2.0, 10.0, 50.0}) {
            const double ser = ser_mqam(esn0, order);
            CHECK(ber_paper(ser, order) <= ser);
            CHECK(ber_gray_approx(ser, order) <= ser);
            CHECK(ber_paper(ser, order) >= 0.0);
            CHECK(ber_gray_approx(ser, order) >= 0.0);
        }
    }
}

TEST_CASE("LinkBudget maps onto esn0") {
    // esn0 = P_s B / (log2(M) N0 R)
    const LinkBudget budget(2.0, 1e6, 5e5, 1e-1);
    CHECK(budget.esn0_for(16) == doctest::Approx(2.0 * 1e6 / (4.0 * 1e-1 * 5e5)).epsilon(1e-15));
    CHECK(ser_mqam(budget.esn0_for(16), 16) ==
          doctest::Approx(ser_mqam(10.0, 16)).epsilon(1e-15));
    CHECK_THROWS_AS(LinkBudget(0.0, 1.0, 1.0, 1.0), ConfigInvalid);
}
