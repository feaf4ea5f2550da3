#include "linksim/nn_demapper.hpp"

#include <cmath>

#include "linksim/parallel.hpp"

namespace linksim {

namespace {

// Batch slicing used by the Monte Carlo evaluators. Each batch owns an RNG
// stream derived from (point index, batch index), so error counts are
// independent of the worker count and batch execution order.
constexpr long long kEvalBatchSymbols = 1 << 14;
constexpr std::uint64_t kBatchesPerPoint = 1ull << 20;

Eigen::MatrixXd to_real_pairs(const SymbolSequence& y) {
    Eigen::MatrixXd x(2, y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        x(0, i) = y(i).real();
        x(1, i) = y(i).imag();
    }
    return x;
}

}  // namespace

double default_demapper_train_ebn0_db(int order) {
    switch (order) {
        case 2: return 5.0;
        case 4: return 7.0;
        case 16: return 11.0;
        case 64: return 15.0;
        case 256: return 19.0;
        default:
            throw UnsupportedOrder("default_demapper_train_ebn0_db: unsupported order " +
                                   std::to_string(order));
    }
}

DemapperModel build_demapper(int order, std::array<int, 2> hidden_widths, std::uint64_t seed) {
    if (!is_supported_order(order))
        throw UnsupportedOrder("build_demapper: unsupported order " + std::to_string(order));
    const int k = bits_per_symbol(order);
    RngStream rng(seed, make_stream(StreamDomain::param_init, kTrainingStreamBase));
    DemapperModel model;
    model.order = order;
    model.net.layers.push_back(nn::dense_layer(2, hidden_widths[0], nn::Activation::relu, rng));
    model.net.layers.push_back(
        nn::dense_layer(hidden_widths[0], hidden_widths[1], nn::Activation::relu, rng));
    model.net.layers.push_back(
        nn::dense_layer(hidden_widths[1], k, nn::Activation::identity, rng));
    return model;
}

LlrFrame demap_nn(const DemapperModel& model, Complex y) {
    Eigen::MatrixXd input(2, 1);
    input(0, 0) = y.real();
    input(1, 0) = y.imag();
    return nn::forward(model.net, input).col(0);
}

Eigen::MatrixXd demap_nn_batch(const DemapperModel& model, const SymbolSequence& y) {
    return nn::forward(model.net, to_real_pairs(y));
}

DemapperTrainResult train_demapper(const DemapperTrainConfig& config,
                                   const Constellation& constellation) {
    const int k = constellation.bits_per_symbol;
    if (constellation.order != config.order)
        throw ConfigInvalid("train_demapper: constellation order does not match config");
    const long long batch_bits =
        config.batch_bits == 0 ? 1024LL * k : config.batch_bits;
    if (batch_bits <= 0 || batch_bits % k != 0)
        throw ConfigInvalid("train_demapper: batch_bits must be a positive multiple of k");
    if (config.iterations < 1) throw ConfigInvalid("train_demapper: iterations must be >= 1");

    const long long batch_symbols = batch_bits / k;
    const double n0 = ebn0_to_n0(config.train_ebn0_db, k);

    DemapperModel model = build_demapper(config.order, config.hidden_widths, config.seed);
    model.train_ebn0_db = config.train_ebn0_db;
    nn::AdamState adam = nn::AdamState::for_model(model.net, config.adam);

    RngStream bits_rng(config.seed, make_stream(StreamDomain::data_bits, kTrainingStreamBase));
    RngStream noise_rng(config.seed, make_stream(StreamDomain::channel_noise, kTrainingStreamBase));

    std::vector<double> loss_trace;
    loss_trace.reserve(static_cast<std::size_t>(config.iterations));

    Eigen::MatrixXd targets(k, batch_symbols);
    for (int iter = 0; iter < config.iterations; ++iter) {
        const BitSequence bits = random_bits(static_cast<std::size_t>(batch_bits), bits_rng);
        const SymbolSequence x = modulate(bits, constellation);
        const SymbolSequence y = awgn(x, n0, noise_rng);
        for (long long i = 0; i < batch_symbols; ++i)
            for (int j = 0; j < k; ++j) targets(j, i) = bits[static_cast<std::size_t>(i * k + j)];

        nn::ForwardCache cache;
        const Eigen::MatrixXd logits = nn::forward(model.net, to_real_pairs(y), &cache);
        const Eigen::MatrixXd probs =
            (1.0 + (-logits.array()).exp()).inverse().matrix();
        loss_trace.push_back(nn::bce_loss(probs, targets));

        // d(BCE)/d(logit) for sigmoid outputs collapses to (p - b)/N.
        const Eigen::MatrixXd seed_grad =
            (probs - targets) / static_cast<double>(logits.size());
        nn::Gradients grads = nn::backward(model.net, cache, seed_grad);
        nn::adam_step(model.net, grads, adam);
    }
    return {std::move(model), std::move(loss_trace)};
}

std::vector<SweepRecord> evaluate_demapper_ber(const DemapperModel& model,
                                               const std::vector<double>& ebn0_db_points,
                                               long long bits_per_point, std::uint64_t seed,
                                               int workers) {
    const int k = bits_per_symbol(model.order);
    if (bits_per_point < 10LL * k)
        throw ConfigInvalid("evaluate_demapper_ber: bits_per_point must be >= 10k");
    const Constellation constellation = build_constellation(model.order);
    const long long symbols_per_point = bits_per_point / k;

    std::vector<SweepRecord> records;
    for (std::size_t p = 0; p < ebn0_db_points.size(); ++p) {
        const double n0 = ebn0_to_n0(ebn0_db_points[p], k);
        const long long n_batches =
            (symbols_per_point + kEvalBatchSymbols - 1) / kEvalBatchSymbols;
        std::vector<long long> batch_errors(static_cast<std::size_t>(n_batches), 0);
        parallel_for(n_batches, workers, [&](long long b) {
            const std::uint64_t stream_index = p * kBatchesPerPoint + static_cast<std::uint64_t>(b);
            RngStream bits_rng(seed, make_stream(StreamDomain::data_bits, stream_index));
            RngStream noise_rng(seed, make_stream(StreamDomain::channel_noise, stream_index));
            const long long n_symbols =
                std::min(kEvalBatchSymbols, symbols_per_point - b * kEvalBatchSymbols);
            const BitSequence bits =
                random_bits(static_cast<std::size_t>(n_symbols * k), bits_rng);
            const SymbolSequence x = modulate(bits, constellation);
            const SymbolSequence y = awgn(x, n0, noise_rng);
            const Eigen::MatrixXd logits = demap_nn_batch(model, y);
            long long errors = 0;
            for (long long i = 0; i < n_symbols; ++i)
                for (int j = 0; j < k; ++j) {
                    const Bit decided = logits(j, i) > 0.0 ? 1 : 0;
                    errors += decided != bits[static_cast<std::size_t>(i * k + j)];
                }
            batch_errors[static_cast<std::size_t>(b)] = errors;
        });
        long long errors = 0;
        for (const long long e : batch_errors) errors += e;
        const long long trials = symbols_per_point * k;
        SweepRecord record;
        record.system = "nn_demapper";
        record.order = model.order;
        record.train_snr_db = model.train_ebn0_db;
        record.ebn0_db = ebn0_db_points[p];
        record.metric = "ber";
        record.value = static_cast<double>(errors) / static_cast<double>(trials);
        record.errors = errors;
        record.trials = trials;
        record.seed = seed;
        records.push_back(std::move(record));
    }
    return records;
}

}  // namespace linksim
