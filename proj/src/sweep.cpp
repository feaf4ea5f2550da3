#include "linksim/sweep.hpp"

#include "linksim/app_demapper.hpp"
#include "linksim/channel.hpp"
#include "linksim/model_io.hpp"
#include "linksim/parallel.hpp"
#include "linksim/theory.hpp"

namespace linksim {

namespace {

constexpr long long kEvalBatchSymbols = 1 << 14;
constexpr std::uint64_t kBatchesPerPoint = 1ull << 20;

// Shared batching skeleton: splits `trials_per_point` units into fixed-size
// batches, gives batch b of point p the RNG stream index p*2^20 + b, and
// aggregates error counts in batch order.
template <typename BatchFn>
long long count_point_errors(std::size_t point_index, long long trials_per_point, int workers,
                             BatchFn&& batch_fn) {
    const long long n_batches =
        (trials_per_point + kEvalBatchSymbols - 1) / kEvalBatchSymbols;
    std::vector<long long> batch_errors(static_cast<std::size_t>(n_batches), 0);
    parallel_for(n_batches, workers, [&](long long b) {
        const std::uint64_t stream_index =
            point_index * kBatchesPerPoint + static_cast<std::uint64_t>(b);
        const long long n =
            std::min(kEvalBatchSymbols, trials_per_point - b * kEvalBatchSymbols);
        batch_errors[static_cast<std::size_t>(b)] = batch_fn(stream_index, n);
    });
    long long errors = 0;
    for (const long long e : batch_errors) errors += e;
    return errors;
}

SweepRecord make_record(const std::string& system, int order, double ebn0_db,
                        const std::string& metric, long long errors, long long trials,
                        std::uint64_t seed) {
    SweepRecord r;
    r.system = system;
    r.order = order;
    r.ebn0_db = ebn0_db;
    r.metric = metric;
    r.value = static_cast<double>(errors) / static_cast<double>(trials);
    r.errors = errors;
    r.trials = trials;
    r.seed = seed;
    return r;
}

}  // namespace

std::string to_string(SystemKind kind) {
    switch (kind) {
        case SystemKind::app: return "app";
        case SystemKind::nn_demapper: return "nn_demapper";
        case SystemKind::ae_cnn: return "ae_cnn";
        case SystemKind::ae_dnn: return "ae_dnn";
        case SystemKind::theory: return "theory";
    }
    return "app";
}

SystemKind system_from_string(const std::string& name) {
    if (name == "app") return SystemKind::app;
    if (name == "nn_demapper") return SystemKind::nn_demapper;
    if (name == "ae_cnn") return SystemKind::ae_cnn;
    if (name == "ae_dnn") return SystemKind::ae_dnn;
    if (name == "theory") return SystemKind::theory;
    throw ConfigInvalid("unknown system '" + name + "'");
}

std::vector<SweepRecord> evaluate_app_ber(int order, const std::vector<double>& ebn0_db_points,
                                          long long bits_per_point, std::uint64_t seed,
                                          int workers) {
    const Constellation constellation = build_constellation(order);
    const int k = constellation.bits_per_symbol;
    const long long symbols_per_point = bits_per_point / k;

    std::vector<SweepRecord> records;
    for (std::size_t p = 0; p < ebn0_db_points.size(); ++p) {
        const double n0 = ebn0_to_n0(ebn0_db_points[p], k);
        const long long errors = count_point_errors(
            p, symbols_per_point, workers, [&](std::uint64_t stream_index, long long n) {
                RngStream bits_rng(seed, make_stream(StreamDomain::data_bits, stream_index));
                RngStream noise_rng(seed, make_stream(StreamDomain::channel_noise, stream_index));
                const BitSequence bits = random_bits(static_cast<std::size_t>(n * k), bits_rng);
                const SymbolSequence x = modulate(bits, constellation);
                const SymbolSequence y = awgn(x, n0, noise_rng);
                long long count = 0;
                for (long long i = 0; i < n; ++i) {
                    const LlrFrame frame = llr_no_prior(y(i), constellation, n0);
                    for (int j = 0; j < k; ++j) {
                        const Bit decided = frame(j) > 0.0 ? 1 : 0;
                        count += decided != bits[static_cast<std::size_t>(i * k + j)];
                    }
                }
                return count;
            });
        records.push_back(make_record("app", order, ebn0_db_points[p], "ber", errors,
                                      symbols_per_point * k, seed));
    }
    return records;
}

std::vector<SweepRecord> evaluate_app_ser(int order, const std::vector<double>& ebn0_db_points,
                                          long long symbols_per_point, std::uint64_t seed,
                                          int workers) {
    const Constellation constellation = build_constellation(order);
    const int k = constellation.bits_per_symbol;

    std::vector<SweepRecord> records;
    for (std::size_t p = 0; p < ebn0_db_points.size(); ++p) {
        const double n0 = ebn0_to_n0(ebn0_db_points[p], k);
        const long long errors = count_point_errors(
            p, symbols_per_point, workers, [&](std::uint64_t stream_index, long long n) {
                RngStream bits_rng(seed, make_stream(StreamDomain::data_bits, stream_index));
                RngStream noise_rng(seed, make_stream(StreamDomain::channel_noise, stream_index));
                const BitSequence bits = random_bits(static_cast<std::size_t>(n * k), bits_rng);
                const SymbolSequence x = modulate(bits, constellation);
                const SymbolSequence y = awgn(x, n0, noise_rng);
                long long count = 0;
                for (long long i = 0; i < n; ++i) {
                    const int sent =
                        static_cast<int>(block_label(bits.data() + i * k, k));
                    count += nearest_symbol(y(i), constellation) != sent;
                }
                return count;
            });
        records.push_back(make_record("app", order, ebn0_db_points[p], "ser", errors,
                                      symbols_per_point, seed));
    }
    return records;
}

std::vector<SweepRecord> theory_records(int order, const std::vector<double>& ebn0_db_points) {
    const int k = bits_per_symbol(order);
    std::vector<SweepRecord> records;
    for (const double ebn0_db : ebn0_db_points) {
        const double esn0 = ebn0_db_to_esn0(ebn0_db, k);
        const double ser = ser_mqam(esn0, order);
        SweepRecord ser_row;
        ser_row.system = "theory";
        ser_row.order = order;
        ser_row.ebn0_db = ebn0_db;
        ser_row.metric = "ser";
        ser_row.value = ser;
        records.push_back(ser_row);

        SweepRecord paper_row = ser_row;
        paper_row.variant = "ber_paper";
        paper_row.metric = "ber";
        paper_row.value = ber_paper(ser, order);
        records.push_back(paper_row);

        SweepRecord gray_row = ser_row;
        gray_row.variant = "ber_gray";
        gray_row.metric = "ber";
        gray_row.value = ber_gray_approx(ser, order);
        records.push_back(gray_row);
    }
    return records;
}

std::vector<SweepRecord> mc_sweep(const SweepSpec& spec) {
    if (spec.ebn0_db.empty()) throw ConfigInvalid("mc_sweep: no Eb/N0 points given");
    if (spec.system != SystemKind::theory && spec.trials < 1000)
        throw ConfigInvalid("mc_sweep: trials must be >= 1000");
    switch (spec.system) {
        case SystemKind::app:
            if (spec.metric == "ser")
                return evaluate_app_ser(spec.order, spec.ebn0_db, spec.trials, spec.seed,
                                        spec.workers);
            if (spec.metric == "ber")
                return evaluate_app_ber(spec.order, spec.ebn0_db, spec.trials, spec.seed,
                                        spec.workers);
            throw ConfigInvalid("mc_sweep: app metric must be ber or ser");
        case SystemKind::nn_demapper: {
            if (spec.model_path.empty())
                throw ConfigInvalid("mc_sweep: nn_demapper requires a model path");
            const DemapperModel model = load_demapper(spec.model_path);
            if (model.order != spec.order)
                throw ConfigInvalid("mc_sweep: model order does not match spec");
            return evaluate_demapper_ber(model, spec.ebn0_db, spec.trials, spec.seed,
                                         spec.workers);
        }
        case SystemKind::ae_cnn:
        case SystemKind::ae_dnn: {
            if (spec.encoder_path.empty() || spec.decoder_path.empty())
                throw ConfigInvalid("mc_sweep: ae systems require encoder and decoder paths");
            const AeEncoder enc = load_ae_encoder(spec.encoder_path);
            const AeDecoder dec = load_ae_decoder(spec.decoder_path);
            const AeVariant expected =
                spec.system == SystemKind::ae_cnn ? AeVariant::cnn : AeVariant::dnn;
            if (enc.variant != expected || dec.variant != expected)
                throw ConfigInvalid("mc_sweep: model variant does not match the system");
            if (enc.order != spec.order)
                throw ConfigInvalid("mc_sweep: model order does not match spec");
            return evaluate_ser(enc, dec, spec.ebn0_db, spec.trials, spec.seed, spec.workers);
        }
        case SystemKind::theory:
            return theory_records(spec.order, spec.ebn0_db);
    }
    throw ConfigInvalid("mc_sweep: unhandled system");
}

}  // namespace linksim
