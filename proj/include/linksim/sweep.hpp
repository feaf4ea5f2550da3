#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "linksim/records.hpp"

namespace linksim {

enum class SystemKind { app, nn_demapper, ae_cnn, ae_dnn, theory };

std::string to_string(SystemKind kind);
SystemKind system_from_string(const std::string& name);

// One Monte Carlo sweep request. `trials` counts bits for BER metrics and
// messages/symbols for SER metrics. Trained systems load their models from
// the given paths.
struct SweepSpec {
    SystemKind system = SystemKind::app;
    int order = 4;
    std::vector<double> ebn0_db;
    long long trials = 100000;
    std::uint64_t seed = 1;
    std::string metric = "ber";  // app only; other systems have a fixed metric
    std::string model_path;      // nn_demapper
    std::string encoder_path;    // ae systems
    std::string decoder_path;
    int workers = 1;
};

// Deterministic given the seed; per-point/per-batch RNG streams make error
// counts independent of the worker count. Runs with equal seeds see the same
// data and noise draws, so different systems evaluated under one seed form a
// paired comparison.
std::vector<SweepRecord> mc_sweep(const SweepSpec& spec);

// Direct evaluators used by mc_sweep and the figure pipelines.
std::vector<SweepRecord> evaluate_app_ber(int order, const std::vector<double>& ebn0_db_points,
                                          long long bits_per_point, std::uint64_t seed,
                                          int workers = 1);
std::vector<SweepRecord> evaluate_app_ser(int order, const std::vector<double>& ebn0_db_points,
                                          long long symbols_per_point, std::uint64_t seed,
                                          int workers = 1);

// Closed-form reference rows: one SER row plus both BER readings
// (variant "ber_paper" and "ber_gray") per Eb/N0 point.
std::vector<SweepRecord> theory_records(int order, const std::vector<double>& ebn0_db_points);

}  // namespace linksim
