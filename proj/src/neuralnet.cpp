#include "linksim/neuralnet.hpp"

#include <cmath>

namespace linksim::nn {

std::string to_string(Activation a) {
    switch (a) {
        case Activation::identity: return "identity";
        case Activation::relu: return "relu";
        case Activation::sigmoid: return "sigmoid";
        case Activation::softmax: return "softmax";
    }
    return "identity";
}

Activation activation_from_string(const std::string& name) {
    if (name == "identity") return Activation::identity;
    if (name == "relu") return Activation::relu;
    if (name == "sigmoid") return Activation::sigmoid;
    if (name == "softmax") return Activation::softmax;
    throw ModelLoadError("unknown activation '" + name + "'");
}

namespace {

int layer_output_rows(const Layer& layer, int input_rows) {
    if (const auto* dense = std::get_if<DenseLayer>(&layer.op)) {
        if (input_rows != dense->weights.cols())
            throw ShapeMismatch("dense layer expects " + std::to_string(dense->weights.cols()) +
                                " inputs, got " + std::to_string(input_rows));
        return static_cast<int>(dense->weights.rows());
    }
    const auto& conv = std::get<Conv1dLayer>(layer.op);
    if (input_rows % conv.in_channels != 0)
        throw ShapeMismatch("conv1d input rows " + std::to_string(input_rows) +
                            " not divisible by " + std::to_string(conv.in_channels) +
                            " channels");
    const int length = input_rows / conv.in_channels;
    return conv.out_channels * length;
}

void apply_activation(Activation activation, Matrix& z) {
    switch (activation) {
        case Activation::identity:
            return;
        case Activation::relu:
            z = z.cwiseMax(0.0);
            return;
        case Activation::sigmoid:
            z = (1.0 + (-z.array()).exp()).inverse().matrix();
            return;
        case Activation::softmax:
            for (Eigen::Index col = 0; col < z.cols(); ++col) {
                Eigen::ArrayXd e = (z.col(col).array() - z.col(col).maxCoeff()).exp();
                z.col(col) = (e / e.sum()).matrix();
            }
            return;
    }
}

// dL/dZ from dL/dA and the cached post-activation values.
Matrix activation_backward(Activation activation, const Matrix& activated, const Matrix& grad) {
    switch (activation) {
        case Activation::identity:
            return grad;
        case Activation::relu:
            return (activated.array() > 0.0).cast<double>().matrix().cwiseProduct(grad);
        case Activation::sigmoid:
            return (activated.array() * (1.0 - activated.array()) * grad.array()).matrix();
        case Activation::softmax: {
            // dZ = p .* (dA - colwise_dot(dA, p))
            Matrix out(grad.rows(), grad.cols());
            for (Eigen::Index col = 0; col < grad.cols(); ++col) {
                const double dot = grad.col(col).dot(activated.col(col));
                out.col(col) =
                    activated.col(col).array() * (grad.col(col).array() - dot);
            }
            return out;
        }
    }
    return grad;
}

// y[o, t] += sum_{c, dk} w(o, c*K+dk) * x[c, t + dk - K/2], zero padded.
void conv1d_forward(const Conv1dLayer& conv, const Matrix& x, Matrix& y) {
    const int length = static_cast<int>(x.rows()) / conv.in_channels;
    const int half = conv.kernel_size / 2;
    y.setZero(static_cast<Eigen::Index>(conv.out_channels) * length, x.cols());
    for (int o = 0; o < conv.out_channels; ++o) {
        for (int c = 0; c < conv.in_channels; ++c) {
            for (int dk = 0; dk < conv.kernel_size; ++dk) {
                const int d = dk - half;
                const int t0 = std::max(0, -d);
                const int len = length - std::abs(d);
                if (len <= 0) continue;
                y.middleRows(o * length + t0, len).noalias() +=
                    conv.kernels(o, c * conv.kernel_size + dk) *
                    x.middleRows(c * length + t0 + d, len);
            }
        }
        y.middleRows(o * length, length).array() += conv.bias(o);
    }
}

void conv1d_backward(const Conv1dLayer& conv, const Matrix& x, const Matrix& dz,
                     Matrix& d_kernels, Vector& d_bias, Matrix& dx) {
    const int length = static_cast<int>(x.rows()) / conv.in_channels;
    const int half = conv.kernel_size / 2;
    d_kernels.setZero(conv.kernels.rows(), conv.kernels.cols());
    d_bias.setZero(conv.bias.size());
    dx.setZero(x.rows(), x.cols());
    for (int o = 0; o < conv.out_channels; ++o) {
        d_bias(o) = dz.middleRows(o * length, length).sum();
        for (int c = 0; c < conv.in_channels; ++c) {
            for (int dk = 0; dk < conv.kernel_size; ++dk) {
                const int d = dk - half;
                const int t0 = std::max(0, -d);
                const int len = length - std::abs(d);
                if (len <= 0) continue;
                const auto dz_block = dz.middleRows(o * length + t0, len);
                const auto x_block = x.middleRows(c * length + t0 + d, len);
                d_kernels(o, c * conv.kernel_size + dk) =
                    dz_block.cwiseProduct(x_block).sum();
                dx.middleRows(c * length + t0 + d, len).noalias() +=
                    conv.kernels(o, c * conv.kernel_size + dk) * dz_block;
            }
        }
    }
}

double init_bound(Activation activation, int fan_in, int fan_out) {
    if (activation == Activation::relu) return std::sqrt(6.0 / fan_in);
    return std::sqrt(6.0 / (fan_in + fan_out));
}

void fill_uniform(Matrix& m, double bound, RngStream& rng) {
    // Column-major fill order, matching Eigen storage, for determinism.
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            m(r, c) = bound * (2.0 * rng.uniform() - 1.0);
}

}  // namespace

std::size_t NeuralModel::parameter_count() const {
    std::size_t count = 0;
    for (const auto& layer : layers) {
        if (const auto* dense = std::get_if<DenseLayer>(&layer.op)) {
            count += static_cast<std::size_t>(dense->weights.size() + dense->bias.size());
        } else {
            const auto& conv = std::get<Conv1dLayer>(layer.op);
            count += static_cast<std::size_t>(conv.kernels.size() + conv.bias.size());
        }
    }
    return count;
}

int NeuralModel::output_size(int input_size) const {
    int rows = input_size;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        if (layers[i].activation == Activation::softmax && i + 1 != layers.size())
            throw ConfigInvalid("softmax is only supported on the final layer");
        rows = layer_output_rows(layers[i], rows);
    }
    return rows;
}

Layer dense_layer(int in, int out, Activation activation, RngStream& rng) {
    DenseLayer dense;
    dense.weights.resize(out, in);
    fill_uniform(dense.weights, init_bound(activation, in, out), rng);
    dense.bias = Vector::Zero(out);
    return Layer{std::move(dense), activation};
}

Layer conv1d_layer(int in_channels, int out_channels, int kernel_size, Activation activation,
                   RngStream& rng) {
    if (kernel_size % 2 == 0 || kernel_size < 1)
        throw ConfigInvalid("conv1d kernel size must be odd and positive");
    Conv1dLayer conv;
    conv.in_channels = in_channels;
    conv.out_channels = out_channels;
    conv.kernel_size = kernel_size;
    conv.kernels.resize(out_channels, in_channels * kernel_size);
    fill_uniform(conv.kernels,
                 init_bound(activation, in_channels * kernel_size, out_channels * kernel_size),
                 rng);
    conv.bias = Vector::Zero(out_channels);
    return Layer{std::move(conv), activation};
}

Matrix forward(const NeuralModel& model, const Matrix& input, ForwardCache* cache) {
    model.output_size(static_cast<int>(input.rows()));  // shape + softmax checks
    if (cache != nullptr) {
        cache->activations.clear();
        cache->activations.reserve(model.layers.size() + 1);
        cache->activations.push_back(input);
    }
    Matrix a = input;
    for (const auto& layer : model.layers) {
        Matrix z;
        if (const auto* dense = std::get_if<DenseLayer>(&layer.op)) {
            z.noalias() = dense->weights * a;
            z.colwise() += dense->bias;
        } else {
            conv1d_forward(std::get<Conv1dLayer>(layer.op), a, z);
        }
        apply_activation(layer.activation, z);
        a = std::move(z);
        if (cache != nullptr) cache->activations.push_back(a);
    }
    return a;
}

Gradients backward(const NeuralModel& model, const ForwardCache& cache,
                   const Matrix& output_grad) {
    const std::size_t n_layers = model.layers.size();
    if (cache.activations.size() != n_layers + 1)
        throw StaleCache("backward: cache does not match the model's layer count");
    for (std::size_t i = 0; i < n_layers; ++i) {
        const int expected =
            layer_output_rows(model.layers[i], static_cast<int>(cache.activations[i].rows()));
        if (cache.activations[i + 1].rows() != expected ||
            cache.activations[i + 1].cols() != cache.activations[i].cols())
            throw StaleCache("backward: cached activation shapes do not match the model");
    }
    if (output_grad.rows() != cache.activations.back().rows() ||
        output_grad.cols() != cache.activations.back().cols())
        throw StaleCache("backward: output gradient shape does not match the forward output");

    Gradients grads;
    grads.d_weights.resize(n_layers);
    grads.d_bias.resize(n_layers);

    Matrix da = output_grad;
    for (std::size_t i = n_layers; i-- > 0;) {
        const Layer& layer = model.layers[i];
        const Matrix& input = cache.activations[i];
        const Matrix& activated = cache.activations[i + 1];
        Matrix dz = activation_backward(layer.activation, activated, da);
        if (const auto* dense = std::get_if<DenseLayer>(&layer.op)) {
            grads.d_weights[i].noalias() = dz * input.transpose();
            grads.d_bias[i] = dz.rowwise().sum();
            da.noalias() = dense->weights.transpose() * dz;
        } else {
            conv1d_backward(std::get<Conv1dLayer>(layer.op), input, dz, grads.d_weights[i],
                            grads.d_bias[i], da);
        }
    }
    grads.d_input = std::move(da);
    return grads;
}

double bce_loss(const Matrix& predictions, const Matrix& targets, Matrix* grad) {
    if (predictions.rows() != targets.rows() || predictions.cols() != targets.cols())
        throw ShapeMismatch("bce_loss: prediction/target shape mismatch");
    const double n = static_cast<double>(predictions.size());
    const Eigen::ArrayXXd p =
        predictions.array().max(kProbClamp).min(1.0 - kProbClamp);
    const Eigen::ArrayXXd b = targets.array();
    const double loss = -(b * p.log() + (1.0 - b) * (1.0 - p).log()).sum() / n;
    if (grad != nullptr) *grad = ((p - b) / (p * (1.0 - p)) / n).matrix();
    return loss;
}

double cce_loss(const Matrix& probabilities, const std::vector<int>& target_index, Matrix* grad) {
    if (static_cast<std::size_t>(probabilities.cols()) != target_index.size())
        throw ShapeMismatch("cce_loss: one target per column required");
    for (Eigen::Index col = 0; col < probabilities.cols(); ++col) {
        if (std::abs(probabilities.col(col).sum() - 1.0) > 1e-6)
            throw NotNormalized("cce_loss: column " + std::to_string(col) +
                                " does not sum to 1");
    }
    const double batch = static_cast<double>(probabilities.cols());
    if (grad != nullptr) grad->setZero(probabilities.rows(), probabilities.cols());
    double loss = 0.0;
    for (Eigen::Index col = 0; col < probabilities.cols(); ++col) {
        const int t = target_index[static_cast<std::size_t>(col)];
        if (t < 0 || t >= probabilities.rows())
            throw ShapeMismatch("cce_loss: target index out of range");
        const double p = std::max(probabilities(t, col), kProbClamp);
        loss -= std::log(p);
        if (grad != nullptr) (*grad)(t, col) = -1.0 / (p * batch);
    }
    return loss / batch;
}

AdamState AdamState::for_model(const NeuralModel& model, AdamConfig config) {
    AdamState state;
    state.config = config;
    for (const auto& layer : model.layers) {
        Eigen::Index rows, cols, bias_size;
        if (const auto* dense = std::get_if<DenseLayer>(&layer.op)) {
            rows = dense->weights.rows();
            cols = dense->weights.cols();
            bias_size = dense->bias.size();
        } else {
            const auto& conv = std::get<Conv1dLayer>(layer.op);
            rows = conv.kernels.rows();
            cols = conv.kernels.cols();
            bias_size = conv.bias.size();
        }
        state.m_weights.push_back(Matrix::Zero(rows, cols));
        state.v_weights.push_back(Matrix::Zero(rows, cols));
        state.m_bias.push_back(Vector::Zero(bias_size));
        state.v_bias.push_back(Vector::Zero(bias_size));
    }
    return state;
}

namespace {

template <typename Tensor>
void adam_update_impl(Tensor& param, const Tensor& grad, Tensor& m, Tensor& v, long step,
                      const AdamConfig& config) {
    if (param.rows() != grad.rows() || param.cols() != grad.cols())
        throw ShapeMismatch("adam_update: parameter/gradient shape mismatch");
    m = config.beta1 * m + (1.0 - config.beta1) * grad;
    v = (config.beta2 * v.array() + (1.0 - config.beta2) * grad.array().square()).matrix();
    const double m_correction = 1.0 - std::pow(config.beta1, static_cast<double>(step));
    const double v_correction = 1.0 - std::pow(config.beta2, static_cast<double>(step));
    param.array() -= config.step_size * (m.array() / m_correction) /
                     ((v.array() / v_correction).sqrt() + config.epsilon);
}

}  // namespace

void adam_update(Matrix& param, const Matrix& grad, Matrix& m, Matrix& v, long step,
                 const AdamConfig& config) {
    adam_update_impl(param, grad, m, v, step, config);
}

void adam_step(NeuralModel& model, const Gradients& grads, AdamState& state) {
    if (grads.d_weights.size() != model.layers.size())
        throw ShapeMismatch("adam_step: gradient layer count mismatch");
    ++state.step;
    for (std::size_t i = 0; i < model.layers.size(); ++i) {
        Matrix* weights;
        Vector* bias;
        if (auto* dense = std::get_if<DenseLayer>(&model.layers[i].op)) {
            weights = &dense->weights;
            bias = &dense->bias;
        } else {
            auto& conv = std::get<Conv1dLayer>(model.layers[i].op);
            weights = &conv.kernels;
            bias = &conv.bias;
        }
        adam_update_impl(*weights, grads.d_weights[i], state.m_weights[i], state.v_weights[i],
                         state.step, state.config);
        adam_update_impl(*bias, grads.d_bias[i], state.m_bias[i], state.v_bias[i], state.step,
                         state.config);
    }
}

}  // namespace linksim::nn
