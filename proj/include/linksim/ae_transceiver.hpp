#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "linksim/channel.hpp"
#include "linksim/modem.hpp"
#include "linksim/neuralnet.hpp"
#include "linksim/records.hpp"

namespace linksim {

enum class AeVariant { cnn, dnn };

std::string to_string(AeVariant v);
AeVariant ae_variant_from_string(const std::string& name);

// Transmitter network. For the cnn variant the one-hot input is a 1-channel
// sequence of length M feeding conv-conv-dense; the dnn variant uses three
// dense layers. The raw head output is a real pair (Re, Im); the power
// normalization stage lives in encode()/train_e2e(). `revision` advances on
// every parameter mutation so calibrations can be checked for staleness.
struct AeEncoder {
    nn::NeuralModel net;
    int order = 0;
    AeVariant variant = AeVariant::cnn;
    double train_ebn0_db = 0.0;
    std::uint64_t revision = 0;
};

// Receiver network: (Re, Im) -> conv-conv-dense-softmax (cnn variant, the
// pair forming a 2-channel length-1 sequence) or dense-dense-dense-softmax.
struct AeDecoder {
    nn::NeuralModel net;
    int order = 0;
    AeVariant variant = AeVariant::cnn;
    double train_ebn0_db = 0.0;
};

// Codebook-average power calibration for inference-time encoding.
struct Calibration {
    double scale = 1.0;
    Eigen::VectorXcd codebook;  // scale * raw encoder outputs, unit mean power
    std::uint64_t revision = 0;
};

// The M learned transmit points under codebook normalization.
struct LearnedConstellation {
    int order = 0;
    Eigen::VectorXcd points;
    double scale = 1.0;
};

struct AeTrainConfig {
    int order = 16;
    AeVariant variant = AeVariant::cnn;
    long long batch_messages = 1024;
    int iterations = 8000;
    nn::AdamConfig adam;
    // Step size is multiplied by decay_factor once the iteration counter
    // passes decay_fraction * iterations (1.0 disables the decay).
    double lr_decay_factor = 0.1;
    double lr_decay_fraction = 2.0 / 3.0;
    double train_ebn0_db = 10.0;
    std::uint64_t seed = 1;
    int conv_channels = 8;   // cnn variant: C1 = C2
    int kernel_size = 3;     // cnn variant
    int dnn_hidden = 0;      // dnn variant; 0 -> max(16, order)
};

// Indicator vector with a single 1 at `message` (0-based); IndexOutOfRange
// outside [0, order).
Eigen::VectorXd one_hot(int message, int order);

AeEncoder build_ae_encoder(const AeTrainConfig& config, RngStream& rng);
AeDecoder build_ae_decoder(const AeTrainConfig& config, RngStream& rng);

// Codebook power calibration snapshot for the encoder's current parameters.
Calibration calibrate(const AeEncoder& encoder);

// Normalized transmit symbol for one message; throws StaleCalibration when
// the calibration predates a parameter update.
Complex encode(const AeEncoder& encoder, int message, const Calibration& calibration);

// Posterior over the M messages (softmax output).
Eigen::VectorXd decode(const AeDecoder& decoder, Complex y);
Eigen::MatrixXd decode_batch(const AeDecoder& decoder, const SymbolSequence& y);

// argmax of the posterior, lowest index on ties.
int argmax_message(const Eigen::VectorXd& posterior);
int infer_message(const AeDecoder& decoder, Complex y);

LearnedConstellation extract_constellation(const AeEncoder& encoder);

// Captures the loss gradient on both sides of the channel bottleneck during
// the final training iteration.
struct BottleneckProbe {
    Eigen::MatrixXd grad_decoder_input;
    Eigen::MatrixXd grad_encoder_output;
};

struct AeTrainResult {
    AeEncoder encoder;
    AeDecoder decoder;
    std::vector<double> loss_trace;  // one CCE value per iteration
};

// One end-to-end evaluation on a fixed noise realization: one-hot batch ->
// encoder -> batch power normalization -> + noise -> decoder -> CCE.
// Exposed so tests can finite-difference the whole chain, including the
// normalization Jacobian; train_e2e runs this every iteration.
struct E2eStep {
    double loss = 0.0;
    nn::Gradients encoder_grads;
    nn::Gradients decoder_grads;
};

E2eStep e2e_forward_backward(const nn::NeuralModel& encoder_net,
                             const nn::NeuralModel& decoder_net, const Eigen::MatrixXd& onehot,
                             const std::vector<int>& messages, const Eigen::MatrixXd& noise,
                             BottleneckProbe* probe = nullptr);

// Joint end-to-end training: uniform messages -> one-hot -> encoder ->
// batch-power normalization -> AWGN at the training Eb/N0 -> decoder -> CCE;
// Adam updates encoder and decoder parameters together each iteration.
AeTrainResult train_e2e(const AeTrainConfig& config, BottleneckProbe* probe = nullptr);

// Monte Carlo SER sweep, deterministic given the seed and worker-count
// independent. Noise and message streams depend only on (seed, point, batch),
// so runs with equal seeds are paired across models.
std::vector<SweepRecord> evaluate_ser(const AeEncoder& encoder, const AeDecoder& decoder,
                                      const std::vector<double>& ebn0_db_points,
                                      long long messages_per_point, std::uint64_t seed,
                                      int workers = 1);

}  // namespace linksim
