#pragma once

#include "linksim/errors.hpp"

namespace linksim {

// Gaussian tail probability Q(x) = 0.5 * erfc(x / sqrt(2)).
double q_function(double x);

// Nearest-neighbor SER approximation for square M-QAM:
//   SER ~= (4(sqrt(M)-1)/sqrt(M)) * Q(sqrt(3 * esn0 / (M-1)))
// esn0 is symbol energy over N0 (linear). Orders must be even powers of two
// (4, 16, 64, 256, ...).
double ser_mqam(double esn0, int order);

// BER from SER via the uniform bit-error ratio (M/2)/(M-1).
double ber_paper(double ser, int order);

// BER from SER via the Gray-coding approximation SER / log2(M).
double ber_gray_approx(double ser, int order);

// Link-budget composite (signal power, bandwidth, bit rate, noise density)
// mapped onto Es/N0 so that ser_mqam(esn0_for(M), M) reproduces the budget
// form of the SER expression.
struct LinkBudget {
    double signal_power;   // P_s, linear
    double bandwidth;      // B, Hz
    double bit_rate;       // R, bit/s
    double noise_density;  // N0, linear

    LinkBudget(double signal_power, double bandwidth, double bit_rate, double noise_density);

    // esn0 = P_s * B / (log2(M) * N0 * R)
    double esn0_for(int order) const;
};

}  // namespace linksim
