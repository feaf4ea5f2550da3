#include "linksim/ae_transceiver.hpp"

#include <cmath>

#include "linksim/parallel.hpp"

namespace linksim {

namespace {

constexpr long long kEvalBatchMessages = 1 << 14;
constexpr std::uint64_t kBatchesPerPoint = 1ull << 20;
constexpr double kPowerFloor = 1e-24;

int dnn_hidden_width(const AeTrainConfig& config) {
    if (config.dnn_hidden > 0) return config.dnn_hidden;
    return std::max(16, config.order);
}

Eigen::MatrixXd raw_codebook(const AeEncoder& encoder) {
    // All M one-hot inputs as one batch.
    Eigen::MatrixXd inputs = Eigen::MatrixXd::Identity(encoder.order, encoder.order);
    return nn::forward(encoder.net, inputs);  // 2 x M
}

Eigen::MatrixXd to_real_pairs(const SymbolSequence& y) {
    Eigen::MatrixXd x(2, y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        x(0, i) = y(i).real();
        x(1, i) = y(i).imag();
    }
    return x;
}

}  // namespace

std::string to_string(AeVariant v) { return v == AeVariant::cnn ? "cnn" : "dnn"; }

AeVariant ae_variant_from_string(const std::string& name) {
    if (name == "cnn") return AeVariant::cnn;
    if (name == "dnn") return AeVariant::dnn;
    throw ConfigInvalid("unknown AE variant '" + name + "'");
}

Eigen::VectorXd one_hot(int message, int order) {
    if (message < 0 || message >= order)
        throw IndexOutOfRange("one_hot: message " + std::to_string(message) +
                              " outside [0, " + std::to_string(order) + ")");
    Eigen::VectorXd v = Eigen::VectorXd::Zero(order);
    v(message) = 1.0;
    return v;
}

AeEncoder build_ae_encoder(const AeTrainConfig& config, RngStream& rng) {
    if (!is_supported_order(config.order))
        throw UnsupportedOrder("build_ae_encoder: unsupported order " +
                               std::to_string(config.order));
    AeEncoder enc;
    enc.order = config.order;
    enc.variant = config.variant;
    enc.train_ebn0_db = config.train_ebn0_db;
    if (config.variant == AeVariant::cnn) {
        const int c = config.conv_channels;
        enc.net.layers.push_back(
            nn::conv1d_layer(1, c, config.kernel_size, nn::Activation::relu, rng));
        enc.net.layers.push_back(
            nn::conv1d_layer(c, c, config.kernel_size, nn::Activation::relu, rng));
        enc.net.layers.push_back(
            nn::dense_layer(c * config.order, 2, nn::Activation::identity, rng));
    } else {
        const int h = dnn_hidden_width(config);
        enc.net.layers.push_back(nn::dense_layer(config.order, h, nn::Activation::relu, rng));
        enc.net.layers.push_back(nn::dense_layer(h, h, nn::Activation::relu, rng));
        enc.net.layers.push_back(nn::dense_layer(h, 2, nn::Activation::identity, rng));
    }
    return enc;
}

AeDecoder build_ae_decoder(const AeTrainConfig& config, RngStream& rng) {
    if (!is_supported_order(config.order))
        throw UnsupportedOrder("build_ae_decoder: unsupported order " +
                               std::to_string(config.order));
    AeDecoder dec;
    dec.order = config.order;
    dec.variant = config.variant;
    dec.train_ebn0_db = config.train_ebn0_db;
    if (config.variant == AeVariant::cnn) {
        const int c = config.conv_channels;
        dec.net.layers.push_back(
            nn::conv1d_layer(2, c, config.kernel_size, nn::Activation::relu, rng));
        dec.net.layers.push_back(
            nn::conv1d_layer(c, c, config.kernel_size, nn::Activation::relu, rng));
        dec.net.layers.push_back(nn::dense_layer(c, config.order, nn::Activation::softmax, rng));
    } else {
        const int h = dnn_hidden_width(config);
        dec.net.layers.push_back(nn::dense_layer(2, h, nn::Activation::relu, rng));
        dec.net.layers.push_back(nn::dense_layer(h, h, nn::Activation::relu, rng));
        dec.net.layers.push_back(nn::dense_layer(h, config.order, nn::Activation::softmax, rng));
    }
    return dec;
}

Calibration calibrate(const AeEncoder& encoder) {
    const Eigen::MatrixXd raw = raw_codebook(encoder);
    const double mean_power = raw.colwise().squaredNorm().mean();
    Calibration cal;
    cal.scale = 1.0 / std::sqrt(std::max(mean_power, kPowerFloor));
    cal.codebook.resize(encoder.order);
    for (int m = 0; m < encoder.order; ++m)
        cal.codebook(m) = cal.scale * Complex(raw(0, m), raw(1, m));
    cal.revision = encoder.revision;
    return cal;
}

Complex encode(const AeEncoder& encoder, int message, const Calibration& calibration) {
    if (calibration.revision != encoder.revision)
        throw StaleCalibration("encode: calibration is stale, re-run calibrate()");
    if (message < 0 || message >= encoder.order)
        throw IndexOutOfRange("encode: message index out of range");
    return calibration.codebook(message);
}

Eigen::VectorXd decode(const AeDecoder& decoder, Complex y) {
    Eigen::MatrixXd input(2, 1);
    input(0, 0) = y.real();
    input(1, 0) = y.imag();
    return nn::forward(decoder.net, input).col(0);
}

Eigen::MatrixXd decode_batch(const AeDecoder& decoder, const SymbolSequence& y) {
    return nn::forward(decoder.net, to_real_pairs(y));
}

int argmax_message(const Eigen::VectorXd& posterior) {
    int best = 0;
    for (Eigen::Index m = 1; m < posterior.size(); ++m)
        if (posterior(m) > posterior(best)) best = static_cast<int>(m);
    return best;
}

int infer_message(const AeDecoder& decoder, Complex y) {
    return argmax_message(decode(decoder, y));
}

LearnedConstellation extract_constellation(const AeEncoder& encoder) {
    const Calibration cal = calibrate(encoder);
    return {encoder.order, cal.codebook, cal.scale};
}

E2eStep e2e_forward_backward(const nn::NeuralModel& encoder_net,
                             const nn::NeuralModel& decoder_net, const Eigen::MatrixXd& onehot,
                             const std::vector<int>& messages, const Eigen::MatrixXd& noise,
                             BottleneckProbe* probe) {
    const long long batch = onehot.cols();
    if (noise.cols() != batch || noise.rows() != 2)
        throw ShapeMismatch("e2e_forward_backward: noise must be 2 x batch");

    nn::ForwardCache enc_cache;
    const Eigen::MatrixXd raw = nn::forward(encoder_net, onehot, &enc_cache);

    // Batch power normalization: scale the whole batch to unit mean symbol
    // power.
    const double mean_power = raw.colwise().squaredNorm().mean();
    const double s = std::sqrt(std::max(mean_power, kPowerFloor));
    const Eigen::MatrixXd z = raw / s;
    const Eigen::MatrixXd y = z + noise;

    nn::ForwardCache dec_cache;
    const Eigen::MatrixXd posterior = nn::forward(decoder_net, y, &dec_cache);

    E2eStep step;
    Eigen::MatrixXd d_posterior;
    step.loss = nn::cce_loss(posterior, messages, &d_posterior);
    step.decoder_grads = nn::backward(decoder_net, dec_cache, d_posterior);

    // Additive channel: the gradient at the encoder output equals the
    // gradient at the decoder input.
    const Eigen::MatrixXd& dz = step.decoder_grads.d_input;
    if (probe != nullptr) {
        probe->grad_decoder_input = step.decoder_grads.d_input;
        probe->grad_encoder_output = dz;
    }

    // Backward through z = raw / s with s = sqrt(mean_j |raw_j|^2):
    // d_raw = dz/s - (sum(dz .* raw) / (B * s^3)) * raw
    const double coupling =
        dz.cwiseProduct(raw).sum() / (static_cast<double>(batch) * s * s * s);
    const Eigen::MatrixXd d_raw = dz / s - coupling * raw;
    step.encoder_grads = nn::backward(encoder_net, enc_cache, d_raw);
    return step;
}

AeTrainResult train_e2e(const AeTrainConfig& config, BottleneckProbe* probe) {
    if (config.batch_messages < 1) throw ConfigInvalid("train_e2e: batch_messages must be >= 1");
    if (config.iterations < 1) throw ConfigInvalid("train_e2e: iterations must be >= 1");
    const int order = config.order;
    const int k = bits_per_symbol(order);
    const long long batch = config.batch_messages;
    const double n0 = ebn0_to_n0(config.train_ebn0_db, k);
    const double component_sd = std::sqrt(n0 / 2.0);

    RngStream init_rng(config.seed, make_stream(StreamDomain::param_init, kTrainingStreamBase));
    RngStream message_rng(config.seed, make_stream(StreamDomain::messages, kTrainingStreamBase));
    RngStream noise_rng(config.seed, make_stream(StreamDomain::channel_noise, kTrainingStreamBase));

    AeTrainResult result;
    result.encoder = build_ae_encoder(config, init_rng);
    result.decoder = build_ae_decoder(config, init_rng);

    nn::AdamState enc_adam = nn::AdamState::for_model(result.encoder.net, config.adam);
    nn::AdamState dec_adam = nn::AdamState::for_model(result.decoder.net, config.adam);
    const int decay_at = static_cast<int>(config.lr_decay_fraction * config.iterations);

    result.loss_trace.reserve(static_cast<std::size_t>(config.iterations));
    std::vector<int> messages(static_cast<std::size_t>(batch));
    Eigen::MatrixXd onehot(order, batch);
    Eigen::MatrixXd noise(2, batch);

    for (int iter = 0; iter < config.iterations; ++iter) {
        if (iter == decay_at && config.lr_decay_factor != 1.0) {
            enc_adam.config.step_size *= config.lr_decay_factor;
            dec_adam.config.step_size *= config.lr_decay_factor;
        }

        onehot.setZero();
        for (long long i = 0; i < batch; ++i) {
            messages[static_cast<std::size_t>(i)] = message_rng.uniform_int(order);
            onehot(messages[static_cast<std::size_t>(i)], i) = 1.0;
        }
        for (Eigen::Index col = 0; col < noise.cols(); ++col) {
            noise(0, col) = component_sd * noise_rng.gaussian();
            noise(1, col) = component_sd * noise_rng.gaussian();
        }

        const bool last = iter + 1 == config.iterations;
        E2eStep step = e2e_forward_backward(result.encoder.net, result.decoder.net, onehot,
                                            messages, noise, last ? probe : nullptr);
        result.loss_trace.push_back(step.loss);
        nn::adam_step(result.decoder.net, step.decoder_grads, dec_adam);
        nn::adam_step(result.encoder.net, step.encoder_grads, enc_adam);
        ++result.encoder.revision;
    }
    return result;
}

std::vector<SweepRecord> evaluate_ser(const AeEncoder& encoder, const AeDecoder& decoder,
                                      const std::vector<double>& ebn0_db_points,
                                      long long messages_per_point, std::uint64_t seed,
                                      int workers) {
    if (messages_per_point < 1000)
        throw ConfigInvalid("evaluate_ser: messages_per_point must be >= 1000");
    if (encoder.order != decoder.order)
        throw ConfigInvalid("evaluate_ser: encoder/decoder order mismatch");
    const int k = bits_per_symbol(encoder.order);
    const Calibration cal = calibrate(encoder);
    const std::string system = decoder.variant == AeVariant::cnn ? "ae_cnn" : "ae_dnn";

    std::vector<SweepRecord> records;
    for (std::size_t p = 0; p < ebn0_db_points.size(); ++p) {
        const double n0 = ebn0_to_n0(ebn0_db_points[p], k);
        const long long n_batches =
            (messages_per_point + kEvalBatchMessages - 1) / kEvalBatchMessages;
        std::vector<long long> batch_errors(static_cast<std::size_t>(n_batches), 0);
        parallel_for(n_batches, workers, [&](long long b) {
            const std::uint64_t stream_index = p * kBatchesPerPoint + static_cast<std::uint64_t>(b);
            RngStream message_rng(seed, make_stream(StreamDomain::messages, stream_index));
            RngStream noise_rng(seed, make_stream(StreamDomain::channel_noise, stream_index));
            const long long n_messages =
                std::min(kEvalBatchMessages, messages_per_point - b * kEvalBatchMessages);
            SymbolSequence y(n_messages);
            std::vector<int> sent(static_cast<std::size_t>(n_messages));
            for (long long i = 0; i < n_messages; ++i) {
                sent[static_cast<std::size_t>(i)] = message_rng.uniform_int(encoder.order);
                y(i) = cal.codebook(sent[static_cast<std::size_t>(i)]) +
                       noise_rng.complex_gaussian(n0);
            }
            const Eigen::MatrixXd posterior = decode_batch(decoder, y);
            long long errors = 0;
            for (long long i = 0; i < n_messages; ++i) {
                int best = 0;
                for (int m = 1; m < encoder.order; ++m)
                    if (posterior(m, i) > posterior(best, i)) best = m;
                errors += best != sent[static_cast<std::size_t>(i)];
            }
            batch_errors[static_cast<std::size_t>(b)] = errors;
        });
        long long errors = 0;
        for (const long long e : batch_errors) errors += e;
        SweepRecord record;
        record.system = system;
        record.variant = to_string(decoder.variant);
        record.order = encoder.order;
        record.train_snr_db = decoder.train_ebn0_db;
        record.ebn0_db = ebn0_db_points[p];
        record.metric = "ser";
        record.value = static_cast<double>(errors) / static_cast<double>(messages_per_point);
        record.errors = errors;
        record.trials = messages_per_point;
        record.seed = seed;
        records.push_back(std::move(record));
    }
    return records;
}

}  // namespace linksim
