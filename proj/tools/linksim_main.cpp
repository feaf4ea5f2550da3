// Command-line front end: constellation/theory table dumps, Monte Carlo
// sweeps, model training, and the three figure-reproduction pipelines.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "linksim/app_demapper.hpp"
#include "linksim/channel.hpp"
#include "linksim/figures.hpp"
#include "linksim/model_io.hpp"
#include "linksim/parallel.hpp"
#include "linksim/sweep.hpp"
#include "linksim/theory.hpp"

namespace {

using namespace linksim;

std::vector<double> snr_points(double start, double stop, double step) {
    if (step <= 0.0) throw ConfigInvalid("--snr-step must be positive");
    std::vector<double> points;
    for (double v = start; v <= stop + 1e-9; v += step) points.push_back(v);
    if (points.empty()) throw ConfigInvalid("empty SNR range");
    return points;
}

// Writes through to stdout when no path is given.
class OutputTarget {
public:
    explicit OutputTarget(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw IoError("cannot open '" + path + "' for writing");
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

std::string label_bits_string(std::uint32_t label, int k) {
    std::string s(static_cast<std::size_t>(k), '0');
    for (int j = 0; j < k; ++j)
        if ((label >> (k - 1 - j)) & 1u) s[static_cast<std::size_t>(j)] = '1';
    return s;
}

void print_constellation(std::ostream& out, const Eigen::VectorXcd& points, int k,
                         const std::vector<std::uint32_t>& labels) {
    out << "index,label_bits,re,im\n";
    for (Eigen::Index i = 0; i < points.size(); ++i) {
        out << i << ',' << label_bits_string(labels[static_cast<std::size_t>(i)], k) << ','
            << format_double(points(i).real()) << ',' << format_double(points(i).imag())
            << '\n';
    }
}

struct SnrRangeFlags {
    double start = 0.0, stop = 12.0, step = 2.0;
    void attach(CLI::App* cmd) {
        cmd->add_option("--snr-start", start, "First Eb/N0 point (dB)");
        cmd->add_option("--snr-stop", stop, "Last Eb/N0 point (dB)");
        cmd->add_option("--snr-step", step, "Eb/N0 step (dB)");
    }
    std::vector<double> points() const { return snr_points(start, stop, step); }
};

void enable_config(CLI::App* cmd) {
    cmd->set_config("--config", "", "Key=value config file; command-line flags win");
}

int run(int argc, char** argv) {
    CLI::App app{"Link-level simulator: APP soft demapping, neural demappers, and "
                 "autoencoder transceivers over AWGN"};
    app.require_subcommand(1);
    int workers = default_workers();
    app.add_option("--threads", workers, "Worker threads for Monte Carlo evaluation")
        ->capture_default_str();

    // ---- constellation ----
    auto* c_cmd = app.add_subcommand("constellation", "Print constellation points as CSV");
    int c_order = 16;
    bool c_learned = false;
    std::string c_model, c_out;
    c_cmd->add_option("--mod-order", c_order, "Modulation order M")->capture_default_str();
    c_cmd->add_flag("--learned", c_learned, "Dump a trained AE encoder's learned points");
    c_cmd->add_option("--model", c_model, "AE encoder model path (with --learned)");
    c_cmd->add_option("--out", c_out, "Output CSV path (default stdout)");
    enable_config(c_cmd);

    // ---- theory ----
    auto* t_cmd = app.add_subcommand("theory", "Closed-form SER/BER table");
    int t_order = 16;
    SnrRangeFlags t_range;
    std::string t_out;
    t_cmd->add_option("--mod-order", t_order, "Modulation order M")->capture_default_str();
    t_range.attach(t_cmd);
    t_cmd->add_option("--out", t_out, "Output CSV path (default stdout)");
    enable_config(t_cmd);

    // ---- sweep-app ----
    auto* sa_cmd = app.add_subcommand("sweep-app", "Monte Carlo sweep of the APP receiver");
    int sa_order = 4;
    SnrRangeFlags sa_range;
    long long sa_trials = 1000000;
    std::uint64_t sa_seed = 1;
    std::string sa_metric = "ber", sa_out;
    sa_cmd->add_option("--mod-order", sa_order, "Modulation order M")->capture_default_str();
    sa_range.attach(sa_cmd);
    sa_cmd->add_option("--trials", sa_trials, "Bits (ber) or symbols (ser) per point")
        ->capture_default_str();
    sa_cmd->add_option("--seed", sa_seed, "RNG seed")->capture_default_str();
    sa_cmd->add_option("--metric", sa_metric, "ber or ser")->capture_default_str();
    sa_cmd->add_option("--out", sa_out, "Output CSV path (default stdout)");
    enable_config(sa_cmd);

    // ---- train-demapper ----
    auto* td_cmd = app.add_subcommand("train-demapper", "Train the neural bit-wise demapper");
    DemapperTrainConfig td_config;
    double td_train_snr = -1000.0;
    long long td_batch_symbols = 1024;
    std::string td_out = "demapper.json", td_loss_out;
    td_cmd->add_option("--mod-order", td_config.order, "Modulation order M")
        ->capture_default_str();
    td_cmd->add_option("--train-snr", td_train_snr,
                       "Training Eb/N0 (dB); default depends on M");
    td_cmd->add_option("--iterations", td_config.iterations, "Adam iterations")
        ->capture_default_str();
    td_cmd->add_option("--batch-symbols", td_batch_symbols, "Symbols per iteration")
        ->capture_default_str();
    td_cmd->add_option("--lr", td_config.adam.step_size, "Adam step size")
        ->capture_default_str();
    td_cmd->add_option("--seed", td_config.seed, "RNG seed")->capture_default_str();
    td_cmd->add_option("--out", td_out, "Model output path")->capture_default_str();
    td_cmd->add_option("--loss-out", td_loss_out, "Optional per-iteration loss CSV");
    enable_config(td_cmd);

    // ---- eval-demapper ----
    auto* ed_cmd = app.add_subcommand("eval-demapper", "BER sweep of a trained demapper");
    std::string ed_model, ed_out;
    SnrRangeFlags ed_range;
    long long ed_trials = 400000;
    std::uint64_t ed_seed = 1;
    ed_cmd->add_option("--model", ed_model, "Demapper model path")->required();
    ed_range.attach(ed_cmd);
    ed_cmd->add_option("--trials", ed_trials, "Bits per point")->capture_default_str();
    ed_cmd->add_option("--seed", ed_seed, "RNG seed")->capture_default_str();
    ed_cmd->add_option("--out", ed_out, "Output CSV path (default stdout)");
    enable_config(ed_cmd);

    // ---- train-ae ----
    auto* ta_cmd = app.add_subcommand("train-ae", "Train the autoencoder transceiver");
    AeTrainConfig ta_config;
    std::string ta_variant = "cnn", ta_enc_out = "ae_enc.json", ta_dec_out = "ae_dec.json";
    std::string ta_loss_out;
    ta_cmd->add_option("--mod-order", ta_config.order, "Modulation order M")
        ->capture_default_str();
    ta_cmd->add_option("--variant", ta_variant, "cnn or dnn")->capture_default_str();
    ta_cmd->add_option("--train-snr", ta_config.train_ebn0_db, "Training Eb/N0 (dB)")
        ->capture_default_str();
    ta_cmd->add_option("--iterations", ta_config.iterations, "Adam iterations")
        ->capture_default_str();
    ta_cmd->add_option("--batch", ta_config.batch_messages, "Messages per iteration")
        ->capture_default_str();
    ta_cmd->add_option("--lr", ta_config.adam.step_size, "Adam step size")
        ->capture_default_str();
    ta_cmd->add_option("--seed", ta_config.seed, "RNG seed")->capture_default_str();
    ta_cmd->add_option("--enc-out", ta_enc_out, "Encoder model output path")
        ->capture_default_str();
    ta_cmd->add_option("--dec-out", ta_dec_out, "Decoder model output path")
        ->capture_default_str();
    ta_cmd->add_option("--loss-out", ta_loss_out, "Optional per-iteration loss CSV");
    enable_config(ta_cmd);

    // ---- eval-ae ----
    auto* ea_cmd = app.add_subcommand("eval-ae", "SER sweep of a trained autoencoder");
    std::string ea_enc, ea_dec, ea_out;
    SnrRangeFlags ea_range;
    long long ea_trials = 400000;
    std::uint64_t ea_seed = 1;
    ea_cmd->add_option("--enc", ea_enc, "Encoder model path")->required();
    ea_cmd->add_option("--dec", ea_dec, "Decoder model path")->required();
    ea_range.attach(ea_cmd);
    ea_cmd->add_option("--trials", ea_trials, "Messages per point")->capture_default_str();
    ea_cmd->add_option("--seed", ea_seed, "RNG seed")->capture_default_str();
    ea_cmd->add_option("--out", ea_out, "Output CSV path (default stdout)");
    enable_config(ea_cmd);

    // ---- figures ----
    auto* f1_cmd = app.add_subcommand("fig1", "Demapper comparison pipeline (theory/APP/NN)");
    Fig1Config f1;
    f1.csv_path = "fig1.csv";
    f1_cmd->add_option("--out", f1.csv_path, "Output CSV path")->capture_default_str();
    f1_cmd->add_option("--seed", f1.base_seed, "Base seed")->capture_default_str();
    f1_cmd->add_option("--seeds", f1.n_seeds, "Number of independent seeds")
        ->capture_default_str();
    f1_cmd->add_option("--bits-per-point", f1.bits_per_point, "Bits per sweep point")
        ->capture_default_str();
    f1_cmd->add_option("--iterations", f1.train_iterations, "Training iterations")
        ->capture_default_str();
    enable_config(f1_cmd);

    auto* f2_cmd = app.add_subcommand("fig2", "AE comparison pipeline (AE-CNN/AE-DNN)");
    Fig2Config f2;
    f2.csv_path = "fig2.csv";
    f2_cmd->add_option("--out", f2.csv_path, "Output CSV path")->capture_default_str();
    f2_cmd->add_option("--seed", f2.base_seed, "Base seed")->capture_default_str();
    f2_cmd->add_option("--seeds", f2.n_seeds, "Number of independent seeds")
        ->capture_default_str();
    f2_cmd->add_option("--iterations", f2.train.iterations, "Training iterations")
        ->capture_default_str();
    f2_cmd->add_option("--messages", f2.curve_messages, "Messages per curve point")
        ->capture_default_str();
    enable_config(f2_cmd);

    auto* f3_cmd = app.add_subcommand("fig3", "Train-SNR robustness pipeline (8 dB vs 12 dB)");
    Fig3Config f3;
    f3.csv_path = "fig3.csv";
    f3_cmd->add_option("--out", f3.csv_path, "Output CSV path")->capture_default_str();
    f3_cmd->add_option("--seed", f3.base_seed, "Base seed")->capture_default_str();
    f3_cmd->add_option("--seeds", f3.n_seeds, "Number of independent seeds")
        ->capture_default_str();
    f3_cmd->add_option("--iterations", f3.train.iterations, "Training iterations")
        ->capture_default_str();
    f3_cmd->add_option("--messages", f3.messages_per_point, "Messages per sweep point")
        ->capture_default_str();
    enable_config(f3_cmd);

    CLI11_PARSE(app, argc, argv);

    if (c_cmd->parsed()) {
        OutputTarget out(c_out);
        if (c_learned) {
            if (c_model.empty())
                throw ConfigInvalid("constellation --learned requires --model");
            const AeEncoder enc = load_ae_encoder(c_model);
            const LearnedConstellation learned = extract_constellation(enc);
            std::vector<std::uint32_t> labels(static_cast<std::size_t>(learned.order));
            for (int i = 0; i < learned.order; ++i)
                labels[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(i);
            print_constellation(out.stream(), learned.points, bits_per_symbol(learned.order),
                                labels);
        } else {
            const Constellation constellation = build_constellation(c_order);
            print_constellation(out.stream(), constellation.points,
                                constellation.bits_per_symbol, constellation.labels);
        }
        return 0;
    }

    if (t_cmd->parsed()) {
        OutputTarget out(t_out);
        const int k = bits_per_symbol(t_order);
        out.stream() << "snr_db,M,ser,ber_paper,ber_gray\n";
        for (const double snr : t_range.points()) {
            const double ser = ser_mqam(ebn0_db_to_esn0(snr, k), t_order);
            out.stream() << format_double(snr) << ',' << t_order << ',' << format_double(ser)
                         << ',' << format_double(ber_paper(ser, t_order)) << ','
                         << format_double(ber_gray_approx(ser, t_order)) << '\n';
        }
        return 0;
    }

    if (sa_cmd->parsed()) {
        SweepSpec spec;
        spec.system = SystemKind::app;
        spec.order = sa_order;
        spec.ebn0_db = sa_range.points();
        spec.trials = sa_trials;
        spec.seed = sa_seed;
        spec.metric = sa_metric;
        spec.workers = workers;
        std::vector<SweepRecord> records = mc_sweep(spec);
        if (sa_order >= 4) {
            const std::vector<SweepRecord> theory = theory_records(sa_order, spec.ebn0_db);
            records.insert(records.end(), theory.begin(), theory.end());
        }
        OutputTarget out(sa_out);
        write_records_csv(out.stream(), records);
        return 0;
    }

    if (td_cmd->parsed()) {
        if (td_train_snr <= -999.0)
            td_train_snr = default_demapper_train_ebn0_db(td_config.order);
        td_config.train_ebn0_db = td_train_snr;
        td_config.batch_bits = td_batch_symbols * bits_per_symbol(td_config.order);
        const Constellation constellation = build_constellation(td_config.order);
        const DemapperTrainResult result = train_demapper(td_config, constellation);
        save_model(td_out, result.model);
        if (!td_loss_out.empty()) {
            OutputTarget out(td_loss_out);
            out.stream() << "iteration,bce\n";
            for (std::size_t i = 0; i < result.loss_trace.size(); ++i)
                out.stream() << i << ',' << format_double(result.loss_trace[i]) << '\n';
        }
        std::cout << "trained demapper M=" << td_config.order << " at "
                  << format_double(td_config.train_ebn0_db) << " dB, final BCE "
                  << format_double(result.loss_trace.back()) << ", saved to " << td_out << '\n';
        return 0;
    }

    if (ed_cmd->parsed()) {
        const DemapperModel model = load_demapper(ed_model);
        const std::vector<SweepRecord> records =
            evaluate_demapper_ber(model, ed_range.points(), ed_trials, ed_seed, workers);
        OutputTarget out(ed_out);
        write_records_csv(out.stream(), records);
        return 0;
    }

    if (ta_cmd->parsed()) {
        ta_config.variant = ae_variant_from_string(ta_variant);
        const AeTrainResult result = train_e2e(ta_config);
        save_model(ta_enc_out, result.encoder);
        save_model(ta_dec_out, result.decoder);
        if (!ta_loss_out.empty()) {
            OutputTarget out(ta_loss_out);
            out.stream() << "iteration,cce\n";
            for (std::size_t i = 0; i < result.loss_trace.size(); ++i)
                out.stream() << i << ',' << format_double(result.loss_trace[i]) << '\n';
        }
        std::cout << "trained AE-" << (ta_config.variant == AeVariant::cnn ? "CNN" : "DNN")
                  << " M=" << ta_config.order << " at "
                  << format_double(ta_config.train_ebn0_db) << " dB, final CCE "
                  << format_double(result.loss_trace.back()) << ", saved to " << ta_enc_out
                  << " / " << ta_dec_out << '\n';
        return 0;
    }

    if (ea_cmd->parsed()) {
        const AeEncoder enc = load_ae_encoder(ea_enc);
        const AeDecoder dec = load_ae_decoder(ea_dec);
        const std::vector<SweepRecord> records =
            evaluate_ser(enc, dec, ea_range.points(), ea_trials, ea_seed, workers);
        OutputTarget out(ea_out);
        write_records_csv(out.stream(), records);
        return 0;
    }

    const auto finish_figure = [](const FigureReport& report) {
        for (const auto& line : report.lines) std::cout << line << '\n';
        return report.pass ? 0 : 2;
    };
    if (f1_cmd->parsed()) {
        f1.workers = workers;
        return finish_figure(reproduce_fig1(f1));
    }
    if (f2_cmd->parsed()) {
        f2.workers = workers;
        return finish_figure(reproduce_fig2(f2));
    }
    if (f3_cmd->parsed()) {
        f3.workers = workers;
        return finish_figure(reproduce_fig3(f3));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const linksim::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
