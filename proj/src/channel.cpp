#include "linksim/channel.hpp"

#include <cmath>

namespace linksim {

double ebn0_to_n0(double ebn0_db, int bits_per_symbol, double rate) {
    if (bits_per_symbol < 1)
        throw ConfigInvalid("ebn0_to_n0: bits_per_symbol must be >= 1");
    if (rate <= 0.0 || rate > 1.0)
        throw ConfigInvalid("ebn0_to_n0: rate must be in (0, 1]");
    return 1.0 / (bits_per_symbol * rate * std::pow(10.0, ebn0_db / 10.0));
}

double ebn0_db_to_esn0(double ebn0_db, int bits_per_symbol, double rate) {
    if (bits_per_symbol < 1)
        throw ConfigInvalid("ebn0_db_to_esn0: bits_per_symbol must be >= 1");
    if (rate <= 0.0 || rate > 1.0)
        throw ConfigInvalid("ebn0_db_to_esn0: rate must be in (0, 1]");
    return bits_per_symbol * rate * std::pow(10.0, ebn0_db / 10.0);
}

SymbolSequence awgn(const SymbolSequence& x, double n0, RngStream& rng) {
    if (n0 <= 0.0) throw InvalidNoise("awgn: n0 must be > 0");
    SymbolSequence y(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) y(i) = x(i) + rng.complex_gaussian(n0);
    return y;
}

}  // namespace linksim
