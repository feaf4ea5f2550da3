#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "linksim/neuralnet.hpp"
#include "support/gradcheck.hpp"

using namespace linksim;
using nn::Matrix;
using nn::Vector;

namespace {

nn::Layer manual_dense(const Matrix& w, const Vector& b, nn::Activation act) {
    nn::DenseLayer dense;
    dense.weights = w;
    dense.bias = b;
    return nn::Layer{std::move(dense), act};
}

nn::Layer manual_conv(int in_ch, int out_ch, int kernel, const Matrix& kernels, const Vector& b,
                      nn::Activation act) {
    nn::Conv1dLayer conv;
    conv.in_channels = in_ch;
    conv.out_channels = out_ch;
    conv.kernel_size = kernel;
    conv.kernels = kernels;
    conv.bias = b;
    return nn::Layer{std::move(conv), act};
}

}  // namespace

TEST_CASE("identity dense layer passes input through") {
    nn::NeuralModel model;
    model.layers.push_back(
        manual_dense(Matrix::Identity(3, 3), Vector::Zero(3), nn::Activation::identity));
    Matrix input(3, 2);
    input << 1, -2, 0.5, 4, -1, 0;
    CHECK((nn::forward(model, input) - input).norm() == 0.0);
}

TEST_CASE("relu clamps a single dense unit") {
    nn::NeuralModel model;
    Matrix w(1, 1);
    w << 2.0;
    Vector b(1);
    b << 1.0;
    model.layers.push_back(manual_dense(w, b, nn::Activation::relu));
    Matrix input(1, 1);
    input << -3.0;
    CHECK(nn::forward(model, input)(0, 0) == 0.0);
}

TEST_CASE("delta kernel convolution is the identity") {
    nn::NeuralModel model;
    Matrix kernels(1, 3);
    kernels << 0.0, 1.0, 0.0;
    model.layers.push_back(manual_conv(1, 1, 3, kernels, Vector::Zero(1),
                                       nn::Activation::identity));
    Matrix input(7, 3);
    RngStream rng(3, 0);
    for (Eigen::Index c = 0; c < input.cols(); ++c)
        for (Eigen::Index r = 0; r < input.rows(); ++r) input(r, c) = rng.uniform(-1, 1);
    CHECK((nn::forward(model, input) - input).norm() == 0.0);
}

TEST_CASE("conv1d zero padding at the edges") {
    nn::NeuralModel model;
    Matrix kernels(1, 3);
    kernels << 1.0, 0.0, 0.0;  // shifts the sequence down by one position
    model.layers.push_back(manual_conv(1, 1, 3, kernels, Vector::Zero(1),
                                       nn::Activation::identity));
    Matrix input(4, 1);
    input << 1, 2, 3, 4;
    const Matrix out = nn::forward(model, input);
    CHECK(out(0, 0) == 0.0);  // tap reaches past the left edge
    CHECK(out(1, 0) == 1.0);
    CHECK(out(2, 0) == 2.0);
    CHECK(out(3, 0) == 3.0);
}

TEST_CASE("shape mismatches are rejected") {
    nn::NeuralModel model;
    model.layers.push_back(
        manual_dense(Matrix::Identity(3, 3), Vector::Zero(3), nn::Activation::identity));
    CHECK_THROWS_AS(nn::forward(model, Matrix::Zero(4, 1)), ShapeMismatch);

    nn::NeuralModel conv_model;
    Matrix kernels(1, 3);
    kernels << 0, 1, 0;
    conv_model.layers.push_back(manual_conv(2, 1, 3, kernels, Vector::Zero(1),
                                            nn::Activation::identity));
    CHECK_THROWS_AS(nn::forward(conv_model, Matrix::Zero(5, 1)), ShapeMismatch);
}

TEST_CASE("softmax restricted to the final layer") {
    RngStream rng(4, 0);
    nn::NeuralModel model;
    model.layers.push_back(nn::dense_layer(2, 3, nn::Activation::softmax, rng));
    model.layers.push_back(nn::dense_layer(3, 2, nn::Activation::identity, rng));
    CHECK_THROWS_AS(nn::forward(model, Matrix::Zero(2, 1)), ConfigInvalid);
}

TEST_CASE("softmax columns form a simplex") {
    RngStream rng(5, 0);
    nn::NeuralModel model;
    model.layers.push_back(nn::dense_layer(4, 8, nn::Activation::relu, rng));
    model.layers.push_back(nn::dense_layer(8, 5, nn::Activation::softmax, rng));
    Matrix input(4, 6);
    for (Eigen::Index c = 0; c < input.cols(); ++c)
        for (Eigen::Index r = 0; r < input.rows(); ++r) input(r, c) = rng.uniform(-3, 3);
    const Matrix out = nn::forward(model, input);
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
        CHECK(std::abs(out.col(c).sum() - 1.0) < 1e-9);
        CHECK(out.col(c).minCoeff() > 0.0);
    }
}

TEST_CASE("bce_loss values") {
    Matrix half = Matrix::Constant(2, 2, 0.5);
    Matrix bits(2, 2);
    bits << 1, 0, 0, 1;
    CHECK(nn::bce_loss(half, bits) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(nn::bce_loss(bits, bits) == doctest::Approx(0.0).epsilon(1e-5));

    Matrix p(2, 1), b(2, 1);
    p << 0.9, 0.2;
    b << 1, 0;
    CHECK(nn::bce_loss(p, b) ==
          doctest::Approx(-(std::log(0.9) + std::log(0.8)) / 2.0).epsilon(1e-12));
    CHECK(nn::bce_loss(p, b) == doctest::Approx(0.164252).epsilon(1e-5));
    CHECK_THROWS_AS(nn::bce_loss(p, Matrix::Zero(3, 1)), ShapeMismatch);
}

TEST_CASE("cce_loss values") {
    Matrix exact(3, 1);
    exact << 0, 1, 0;
    CHECK(nn::cce_loss(exact, {1}) == doctest::Approx(0.0).epsilon(1e-6));

    Matrix uniform = Matrix::Constant(4, 2, 0.25);
    CHECK(nn::cce_loss(uniform, {0, 3}) == doctest::Approx(std::log(4.0)).epsilon(1e-12));

    Matrix p(3, 1);
    p << 0.7, 0.2, 0.1;
    CHECK(nn::cce_loss(p, {1}) == doctest::Approx(-std::log(0.2)).epsilon(1e-12));
    CHECK(nn::cce_loss(p, {1}) == doctest::Approx(1.609438).epsilon(1e-5));

    Matrix unnormalized(2, 1);
    unnormalized << 0.5, 0.6;
    CHECK_THROWS_AS(nn::cce_loss(unnormalized, {0}), NotNormalized);
    CHECK_THROWS_AS(nn::cce_loss(p, {0, 1}), ShapeMismatch);
}

TEST_CASE("backward zero seed gives zero gradients") {
    RngStream rng(6, 0);
    nn::NeuralModel model;
    model.layers.push_back(nn::conv1d_layer(1, 2, 3, nn::Activation::relu, rng));
    model.layers.push_back(nn::dense_layer(10, 3, nn::Activation::sigmoid, rng));
    Matrix input = Matrix::Random(5, 4);
    nn::ForwardCache cache;
    nn::forward(model, input, &cache);
    const nn::Gradients grads = nn::backward(model, cache, Matrix::Zero(3, 4));
    for (const auto& g : grads.d_weights) CHECK(g.norm() == 0.0);
    for (const auto& g : grads.d_bias) CHECK(g.norm() == 0.0);
    CHECK(grads.d_input.norm() == 0.0);
}

TEST_CASE("dense identity gradient is the outer product") {
    nn::NeuralModel model;
    Matrix w = Matrix::Random(3, 2);
    model.layers.push_back(manual_dense(w, Vector::Zero(3), nn::Activation::identity));
    Matrix input(2, 1);
    input << 0.7, -0.3;
    nn::ForwardCache cache;
    nn::forward(model, input, &cache);
    Matrix seed(3, 1);
    seed << 1.0, -2.0, 0.5;
    const nn::Gradients grads = nn::backward(model, cache, seed);
    CHECK((grads.d_weights[0] - seed * input.transpose()).norm() < 1e-15);
    CHECK((grads.d_bias[0] - seed.col(0)).norm() < 1e-15);
    CHECK((grads.d_input - w.transpose() * seed).norm() < 1e-15);
}

TEST_CASE("stale caches are rejected") {
    RngStream rng(7, 0);
    nn::NeuralModel model;
    model.layers.push_back(nn::dense_layer(2, 3, nn::Activation::relu, rng));
    nn::ForwardCache cache;
    nn::forward(model, Matrix::Zero(2, 2), &cache);

    nn::NeuralModel other;
    other.layers.push_back(nn::dense_layer(2, 4, nn::Activation::relu, rng));
    CHECK_THROWS_AS(nn::backward(other, cache, Matrix::Zero(4, 2)), StaleCache);
    CHECK_THROWS_AS(nn::backward(model, cache, Matrix::Zero(3, 5)), StaleCache);
    CHECK_THROWS_AS(nn::backward(model, nn::ForwardCache{}, Matrix::Zero(3, 2)), StaleCache);
}

TEST_CASE("gradients match finite differences across random models") {
    for (int index = 0; index < 8; ++index) {
        const double max_rel = testing::gradcheck_random_model(index, 900 + index);
        CHECK(max_rel < 1e-4);
    }
}

TEST_CASE("adam first step moves by about the step size") {
    nn::AdamConfig config;
    Matrix p = Matrix::Zero(2, 2);
    Matrix g(2, 2);
    g << 0.3, -2.0, 11.0, -0.004;
    Matrix m = Matrix::Zero(2, 2), v = Matrix::Zero(2, 2);
    nn::adam_update(p, g, m, v, 1, config);
    for (Eigen::Index r = 0; r < 2; ++r)
        for (Eigen::Index c = 0; c < 2; ++c) {
            const double expected = -config.step_size * (g(r, c) > 0 ? 1.0 : -1.0);
            CHECK(p(r, c) == doctest::Approx(expected).epsilon(1e-4));
        }
}

TEST_CASE("adam leaves parameters alone for zero gradients") {
    nn::AdamConfig config;
    Matrix p(1, 2);
    p << 0.5, -1.5;
    const Matrix before = p;
    Matrix m = Matrix::Zero(1, 2), v = Matrix::Zero(1, 2);
    for (long step = 1; step <= 5; ++step)
        nn::adam_update(p, Matrix::Zero(1, 2), m, v, step, config);
    CHECK((p - before).norm() == 0.0);
}

TEST_CASE("adam update magnitude does not grow under constant gradient") {
    nn::AdamConfig config;
    Matrix p = Matrix::Zero(1, 1);
    Matrix g(1, 1);
    g << 1.7;
    Matrix m = Matrix::Zero(1, 1), v = Matrix::Zero(1, 1);
    nn::adam_update(p, g, m, v, 1, config);
    const double first = std::abs(p(0, 0));
    const double before_second = p(0, 0);
    nn::adam_update(p, g, m, v, 2, config);
    const double second = std::abs(p(0, 0) - before_second);
    CHECK(second <= first + 1e-12);
}

TEST_CASE("initialization is seeded and bounded") {
    RngStream rng_a(11, 0), rng_b(11, 0);
    const nn::Layer a = nn::dense_layer(32, 16, nn::Activation::relu, rng_a);
    const nn::Layer b = nn::dense_layer(32, 16, nn::Activation::relu, rng_b);
    const auto& wa = std::get<nn::DenseLayer>(a.op).weights;
    const auto& wb = std::get<nn::DenseLayer>(b.op).weights;
    CHECK((wa - wb).norm() == 0.0);
    CHECK(wa.cwiseAbs().maxCoeff() <= std::sqrt(6.0 / 32.0));
    CHECK(std::get<nn::DenseLayer>(a.op).bias.norm() == 0.0);

    RngStream rng_c(11, 0);
    const nn::Layer c = nn::dense_layer(32, 16, nn::Activation::softmax, rng_c);
    CHECK(std::get<nn::DenseLayer>(c.op).weights.cwiseAbs().maxCoeff() <=
          std::sqrt(6.0 / 48.0));
}

TEST_CASE("parameter_count sums layer sizes") {
    RngStream rng(13, 0);
    nn::NeuralModel model;
    model.layers.push_back(nn::conv1d_layer(1, 8, 3, nn::Activation::relu, rng));
    model.layers.push_back(nn::dense_layer(8, 4, nn::Activation::identity, rng));
    CHECK(model.parameter_count() == (8 * 3 + 8) + (8 * 4 + 4));
}
