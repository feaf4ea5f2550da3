#include "linksim/theory.hpp"

#include <cmath>
#include <string>

namespace linksim {

namespace {

bool is_square_qam_order(int order) {
    if (order < 4) return false;
    // Power of two with an even exponent, i.e. sqrt(M) is itself a power of two.
    if ((order & (order - 1)) != 0) return false;
    int k = 0;
    for (int v = order; v > 1; v >>= 1) ++k;
    return k % 2 == 0;
}

int log2_order(int order) {
    int k = 0;
    for (int v = order; v > 1; v >>= 1) ++k;
    return k;
}

}  // namespace

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double ser_mqam(double esn0, int order) {
    if (!is_square_qam_order(order))
        throw UnsupportedOrder("ser_mqam: order " + std::to_string(order) +
                               " is not a square QAM order");
    if (esn0 <= 0.0) throw ConfigInvalid("ser_mqam: esn0 must be > 0");
    const double sqrt_m = std::sqrt(static_cast<double>(order));
    const double coefficient = 4.0 * (sqrt_m - 1.0) / sqrt_m;
    // The nearest-neighbor form can exceed 1 at very low SNR; cap it so the
    // result stays a probability.
    return std::min(1.0, coefficient * q_function(std::sqrt(3.0 * esn0 / (order - 1.0))));
}

double ber_paper(double ser, int order) {
    return (order / 2.0) / (order - 1.0) * ser;
}

double ber_gray_approx(double ser, int order) {
    return ser / log2_order(order);
}

LinkBudget::LinkBudget(double signal_power, double bandwidth, double bit_rate,
                       double noise_density)
    : signal_power(signal_power),
      bandwidth(bandwidth),
      bit_rate(bit_rate),
      noise_density(noise_density) {
    if (signal_power <= 0.0 || bandwidth <= 0.0 || bit_rate <= 0.0 || noise_density <= 0.0)
        throw ConfigInvalid("LinkBudget: all fields must be positive");
}

double LinkBudget::esn0_for(int order) const {
    if (!is_square_qam_order(order))
        throw UnsupportedOrder("LinkBudget::esn0_for: order " + std::to_string(order) +
                               " is not a square QAM order");
    return signal_power * bandwidth / (log2_order(order) * noise_density * bit_rate);
}

}  // namespace linksim
