#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "linksim/nn_demapper.hpp"

using namespace linksim;

namespace {

// Small, fast training run used by the behavioral tests.
DemapperTrainResult quick_train(int order, double ebn0_db, int iterations,
                                std::uint64_t seed) {
    DemapperTrainConfig config;
    config.order = order;
    config.train_ebn0_db = ebn0_db;
    config.iterations = iterations;
    config.batch_bits = 256LL * bits_per_symbol(order);
    config.seed = seed;
    return train_demapper(config, build_constellation(order));
}

void zero_parameters(nn::NeuralModel& model) {
    for (auto& layer : model.layers) {
        if (auto* dense = std::get_if<nn::DenseLayer>(&layer.op)) {
            dense->weights.setZero();
            dense->bias.setZero();
        } else {
            auto& conv = std::get<nn::Conv1dLayer>(layer.op);
            conv.kernels.setZero();
            conv.bias.setZero();
        }
    }
}

std::vector<double> flat_parameters(const nn::NeuralModel& model) {
    std::vector<double> out;
    for (const auto& layer : model.layers) {
        if (const auto* dense = std::get_if<nn::DenseLayer>(&layer.op)) {
            out.insert(out.end(), dense->weights.data(),
                       dense->weights.data() + dense->weights.size());
            out.insert(out.end(), dense->bias.data(), dense->bias.data() + dense->bias.size());
        }
    }
    return out;
}

}  // namespace

TEST_CASE("build_demapper shapes") {
    const DemapperModel m16 = build_demapper(16, {64, 64}, 1);
    CHECK(m16.net.output_size(2) == 4);
    const DemapperModel m2 = build_demapper(2, {64, 64}, 1);
    CHECK(m2.net.output_size(2) == 1);
    CHECK_THROWS_AS(build_demapper(12, {64, 64}, 1), UnsupportedOrder);

    const DemapperModel again = build_demapper(16, {64, 64}, 1);
    CHECK(flat_parameters(m16.net) == flat_parameters(again.net));
    const DemapperModel other_seed = build_demapper(16, {64, 64}, 2);
    CHECK(flat_parameters(m16.net) != flat_parameters(other_seed.net));
}

TEST_CASE("demap_nn output shape and zero-weight degeneracy") {
    DemapperModel model = build_demapper(16, {32, 32}, 3);
    CHECK(demap_nn(model, Complex(0.4, -0.2)).size() == 4);
    zero_parameters(model.net);
    const LlrFrame frame = demap_nn(model, Complex(0.7, 0.1));
    CHECK(frame.norm() == 0.0);
}

TEST_CASE("logit sign equals sigmoid threshold at one half") {
    RngStream rng(5, 0);
    for (int i = 0; i < 1000; ++i) {
        const double logit = i == 0 ? 0.0 : rng.uniform(-8.0, 8.0);
        const double sigmoid = 1.0 / (1.0 + std::exp(-logit));
        CHECK((logit > 0.0) == (sigmoid > 0.5));
    }
}

TEST_CASE("training config validation") {
    DemapperTrainConfig config;
    config.order = 16;
    config.batch_bits = 6;  // not a multiple of k = 4
    CHECK_THROWS_AS(train_demapper(config, build_constellation(16)), ConfigInvalid);
    config.batch_bits = 0;
    config.iterations = 0;
    CHECK_THROWS_AS(train_demapper(config, build_constellation(16)), ConfigInvalid);
    config.iterations = 1;
    CHECK_THROWS_AS(train_demapper(config, build_constellation(4)), ConfigInvalid);
}

TEST_CASE("one iteration applies exactly one update") {
    DemapperTrainConfig config;
    config.order = 4;
    config.iterations = 1;
    config.batch_bits = 64;
    config.seed = 9;
    const DemapperTrainResult result = train_demapper(config, build_constellation(4));
    CHECK(result.loss_trace.size() == 1);
    const DemapperModel init = build_demapper(4, config.hidden_widths, config.seed);
    CHECK(flat_parameters(result.model.net) != flat_parameters(init.net));
}

TEST_CASE("training is reproducible for a fixed seed") {
    const DemapperTrainResult a = quick_train(4, 7.0, 40, 11);
    const DemapperTrainResult b = quick_train(4, 7.0, 40, 11);
    CHECK(flat_parameters(a.model.net) == flat_parameters(b.model.net));
    CHECK(a.loss_trace == b.loss_trace);
    const DemapperTrainResult c = quick_train(4, 7.0, 40, 12);
    CHECK(flat_parameters(a.model.net) != flat_parameters(c.model.net));
}

TEST_CASE("loss trend decreases over training") {
    const DemapperTrainResult result = quick_train(16, 10.0, 1200, 21);
    const auto& trace = result.loss_trace;
    double first = 0.0, last = 0.0;
    for (int i = 0; i < 100; ++i) {
        first += trace[static_cast<std::size_t>(i)];
        last += trace[trace.size() - 100 + static_cast<std::size_t>(i)];
    }
    CHECK(last < first);
}

TEST_CASE("trained demapper decides clean constellation points correctly") {
    const Constellation c = build_constellation(16);
    const DemapperTrainResult result = quick_train(16, 11.0, 2500, 31);
    for (int m = 0; m < 16; ++m) {
        const BitBlock decided = hard_decide(demap_nn(result.model, c.points(m)));
        for (int j = 0; j < 4; ++j) CHECK(decided[static_cast<std::size_t>(j)] == c.label_bit(m, j));
    }
}

TEST_CASE("evaluate_ber ranges, trend, and clean limit") {
    const DemapperTrainResult result = quick_train(4, 7.0, 1500, 41);
    const std::vector<double> points{0.0, 4.0, 8.0};
    const auto records = evaluate_demapper_ber(result.model, points, 40000, 77);
    CHECK(records.size() == 3);
    for (const auto& r : records) {
        CHECK(r.value >= 0.0);
        CHECK(r.value <= 1.0);
        CHECK(*r.errors == std::llround(r.value * static_cast<double>(*r.trials)));
        CHECK(r.system == "nn_demapper");
        CHECK(r.metric == "ber");
    }
    CHECK(records[0].value > records[2].value);  // decreasing trend over 8 dB

    // Effectively noiseless evaluation of a trained model.
    const auto clean = evaluate_demapper_ber(result.model, {60.0}, 40000, 78);
    CHECK(clean[0].value == 0.0);

    CHECK_THROWS_AS(evaluate_demapper_ber(result.model, points, 10, 1), ConfigInvalid);
}

TEST_CASE("parallel evaluation matches serial") {
    const DemapperTrainResult result = quick_train(4, 7.0, 300, 51);
    const std::vector<double> points{2.0, 6.0};
    const auto serial = evaluate_demapper_ber(result.model, points, 120000, 5, 1);
    const auto parallel = evaluate_demapper_ber(result.model, points, 120000, 5, 4);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(*serial[i].errors == *parallel[i].errors);
        CHECK(serial[i].value == parallel[i].value);
    }
}
