#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "linksim/app_demapper.hpp"
#include "linksim/channel.hpp"
#include "linksim/modem.hpp"
#include "linksim/neuralnet.hpp"
#include "linksim/records.hpp"

namespace linksim {

// Bit-wise neural demapper: (Re, Im) -> k LLR logits through three dense
// layers (relu, relu, identity). Positive logit means bit 1.
struct DemapperModel {
    nn::NeuralModel net;
    int order = 0;
    double train_ebn0_db = 0.0;
};

struct DemapperTrainConfig {
    int order = 16;
    std::array<int, 2> hidden_widths{64, 64};
    // Bits consumed per iteration; must be a positive multiple of log2(order).
    long long batch_bits = 0;  // 0 -> default of 1024 symbols worth
    int iterations = 10000;
    nn::AdamConfig adam;
    double train_ebn0_db = 10.0;
    std::uint64_t seed = 1;
};

// Per-order default training Eb/N0 (dB): roughly where the hard-decision BER
// sits near 1e-3, which keeps decision boundaries well sampled.
double default_demapper_train_ebn0_db(int order);

DemapperModel build_demapper(int order, std::array<int, 2> hidden_widths, std::uint64_t seed);

LlrFrame demap_nn(const DemapperModel& model, Complex y);

// Batched inference: k x N logits for N received symbols.
Eigen::MatrixXd demap_nn_batch(const DemapperModel& model, const SymbolSequence& y);

struct DemapperTrainResult {
    DemapperModel model;
    std::vector<double> loss_trace;  // one BCE value per iteration
};

DemapperTrainResult train_demapper(const DemapperTrainConfig& config,
                                   const Constellation& constellation);

// Monte Carlo BER over a sweep of Eb/N0 points; deterministic given the
// seed and independent of the worker count.
std::vector<SweepRecord> evaluate_demapper_ber(const DemapperModel& model,
                                               const std::vector<double>& ebn0_db_points,
                                               long long bits_per_point, std::uint64_t seed,
                                               int workers = 1);

}  // namespace linksim
