#pragma once

#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "linksim/errors.hpp"
#include "linksim/rng.hpp"

namespace linksim::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Activation { identity, relu, sigmoid, softmax };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& name);

struct DenseLayer {
    Matrix weights;  // out x in
    Vector bias;     // out
};

// Stride-1 1-D convolution with same-length zero padding; kernel size must
// be odd. kernels(o, c*kernel_size + dk) is the tap dk of the filter from
// input channel c to output channel o. The sequence length is inferred from
// the input at run time (rows / in_channels), so one layer serves any L.
struct Conv1dLayer {
    int in_channels = 0;
    int out_channels = 0;
    int kernel_size = 0;
    Matrix kernels;  // out_channels x (in_channels * kernel_size)
    Vector bias;     // out_channels
};

struct Layer {
    std::variant<DenseLayer, Conv1dLayer> op;
    Activation activation = Activation::identity;
};

// Ordered layer stack. Activations are column vectors; batches are matrices
// with one sample per column. Conv activations use channel-major rows
// (row = channel * length + position).
struct NeuralModel {
    std::vector<Layer> layers;

    std::size_t parameter_count() const;
    // Output rows for a given input row count; throws ShapeMismatch if the
    // layers do not compose, ConfigInvalid if softmax is not last.
    int output_size(int input_size) const;
};

// Seeded initialization: He-style uniform fan-in bound for relu layers,
// Xavier-style fan-in + fan-out bound otherwise; biases start at zero.
Layer dense_layer(int in, int out, Activation activation, RngStream& rng);
Layer conv1d_layer(int in_channels, int out_channels, int kernel_size, Activation activation,
                   RngStream& rng);

struct ForwardCache {
    std::vector<Matrix> activations;  // [input, a_1, ..., a_L]
};

// Forward pass over a batch (input: features x batch). When `cache` is given
// it is filled with everything backward() needs.
Matrix forward(const NeuralModel& model, const Matrix& input, ForwardCache* cache = nullptr);

struct Gradients {
    std::vector<Matrix> d_weights;  // shaped like weights/kernels per layer
    std::vector<Vector> d_bias;
    Matrix d_input;  // gradient w.r.t. the model input
};

// Exact reverse-mode gradients of a scalar loss, seeded with dL/d(output).
Gradients backward(const NeuralModel& model, const ForwardCache& cache,
                   const Matrix& output_grad);

// Probability clamp used inside the cross-entropy losses.
inline constexpr double kProbClamp = 1e-7;

// Mean of -[b log p + (1-b) log(1-p)] over all entries; predictions are
// clamped to [kProbClamp, 1-kProbClamp] inside the logs. Optional gradient
// w.r.t. the predictions.
double bce_loss(const Matrix& predictions, const Matrix& targets, Matrix* grad = nullptr);

// Mean over columns of -log p[target]; throws NotNormalized when a column
// does not sum to 1 within 1e-6.
double cce_loss(const Matrix& probabilities, const std::vector<int>& target_index,
                Matrix* grad = nullptr);

struct AdamConfig {
    double step_size = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    AdamConfig config;
    long step = 0;
    std::vector<Matrix> m_weights, v_weights;
    std::vector<Vector> m_bias, v_bias;

    static AdamState for_model(const NeuralModel& model, AdamConfig config = {});
};

// One bias-corrected Adam update of every parameter in the model.
void adam_step(NeuralModel& model, const Gradients& grads, AdamState& state);

// Single-tensor Adam update at step `step` (1-based), exposed for tests.
void adam_update(Matrix& param, const Matrix& grad, Matrix& m, Matrix& v, long step,
                 const AdamConfig& config);

}  // namespace linksim::nn
