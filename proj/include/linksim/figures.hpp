#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "linksim/ae_transceiver.hpp"
#include "linksim/nn_demapper.hpp"
#include "linksim/records.hpp"

namespace linksim {

// Outcome of one figure pipeline: the pass/fail verdict for the property the
// figure demonstrates, human-readable summary lines, and every CSV row.
struct FigureReport {
    bool pass = false;
    std::vector<std::string> lines;
    std::vector<SweepRecord> records;
};

// Demapper comparison: theory, APP, and NN demapper BER curves. The NN and
// APP evaluations share data and noise streams per seed, so the ratio check
// is a paired comparison. Pass: for each order, in >= 4 of 5 seeds the NN
// BER stays within ratio_limit of the APP BER at every point where the APP
// BER is at least ber_floor.
struct Fig1Config {
    std::vector<int> orders{4, 16, 64};
    std::vector<double> ebn0_db{0, 2, 4, 6, 8, 10, 12};
    long long bits_per_point = 400000;
    int n_seeds = 5;
    std::uint64_t base_seed = 1;
    int train_iterations = 10000;
    long long train_batch_symbols = 1024;
    double adam_step_size = 1e-3;
    double ratio_limit = 1.25;
    double ber_floor = 1e-4;
    int workers = 1;
    std::string csv_path;  // empty -> no file written
};

FigureReport reproduce_fig1(const Fig1Config& config);

// AE comparison: SER curves for AE-CNN and AE-DNN against theory and the
// hard-decision baseline. Pass: for each (order, variant), in >= 4 of 5
// seeds the SER measured at the training Eb/N0 is within ratio_limit of
// ser_mqam at that point.
struct Fig2Config {
    std::vector<int> orders{4, 16};
    std::vector<AeVariant> variants{AeVariant::cnn, AeVariant::dnn};
    double train_ebn0_db = 10.0;
    std::vector<double> ebn0_db{0, 2, 4, 6, 8, 10, 12};
    long long curve_messages = 200000;
    int n_seeds = 5;
    std::uint64_t base_seed = 1;
    AeTrainConfig train;  // order/variant/train snr/seed overwritten per run
    double ratio_limit = 1.25;
    int workers = 1;
    std::string csv_path;
};

// Messages spent on the pass/fail gate at the training SNR; sized so the
// binomial error is small against the expected error count for the order.
long long fig2_gate_messages(int order);

FigureReport reproduce_fig2(const Fig2Config& config);

// Train-SNR robustness: two AE-CNN models per seed, trained at low/high
// Eb/N0, evaluated on identical message and noise draws across the sweep.
// Pass: in >= 4 of 5 seeds there is a low-SNR point where the low-trained
// model wins and a higher point where the high-trained model wins, each
// beyond 3 standard errors of the paired error-count difference.
struct Fig3Config {
    int order = 16;
    AeVariant variant = AeVariant::cnn;
    double low_train_ebn0_db = 8.0;
    double high_train_ebn0_db = 12.0;
    std::vector<double> ebn0_db{0, 2, 4, 6, 8, 10, 12, 14};
    long long messages_per_point = 400000;
    int n_seeds = 5;
    std::uint64_t base_seed = 1;
    AeTrainConfig train;
    int workers = 1;
    std::string csv_path;
};

FigureReport reproduce_fig3(const Fig3Config& config);

// Paired SER evaluation of two trained models on identical draws.
struct PairedSerPoint {
    double ebn0_db = 0.0;
    long long trials = 0;
    long long errors_a = 0;
    long long errors_b = 0;
    long long only_a = 0;  // trials where only model A erred
    long long only_b = 0;
};

std::vector<PairedSerPoint> evaluate_ser_paired(
    const AeEncoder& encoder_a, const AeDecoder& decoder_a, const AeEncoder& encoder_b,
    const AeDecoder& decoder_b, const std::vector<double>& ebn0_db_points,
    long long messages_per_point, std::uint64_t seed, int workers = 1);

// Seeds passing out of n required for a figure gate (4 of 5 at the default).
int required_seed_passes(int n_seeds);

}  // namespace linksim
