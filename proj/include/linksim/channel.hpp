#pragma once

#include "linksim/errors.hpp"
#include "linksim/modem.hpp"
#include "linksim/rng.hpp"

namespace linksim {

// Eb/N0 (dB) -> noise power spectral density under unit average symbol
// energy: n0 = 1 / (k * rate * 10^(ebn0_db/10)).
double ebn0_to_n0(double ebn0_db, int bits_per_symbol, double rate = 1.0);

// Es/N0 (linear) under unit symbol energy: esn0 = k * rate * 10^(ebn0_db/10).
double ebn0_db_to_esn0(double ebn0_db, int bits_per_symbol, double rate = 1.0);

// Noise bookkeeping for one operating point.
struct NoiseSpec {
    double n0 = 0.0;
    int bits_per_symbol = 0;
    double ebn0_db = 0.0;

    static NoiseSpec from_ebn0(double ebn0_db, int bits_per_symbol, double rate = 1.0) {
        return {ebn0_to_n0(ebn0_db, bits_per_symbol, rate), bits_per_symbol, ebn0_db};
    }
};

// y_i = x_i + n_i with n_i circular complex Gaussian of total variance n0
// (each real component has variance n0/2). Deterministic given the stream.
SymbolSequence awgn(const SymbolSequence& x, double n0, RngStream& rng);

}  // namespace linksim
