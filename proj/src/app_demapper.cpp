#include "linksim/app_demapper.hpp"

#include <cmath>
#include <limits>

namespace linksim {

namespace {

// log(sigmoid(t)) = -softplus(-t), overflow-safe on both tails.
double log_sigmoid(double t) {
    if (t >= 0.0) return -std::log1p(std::exp(-t));
    return t - std::log1p(std::exp(t));
}

// Log-sum-exp over the metric entries whose label bit j equals `bit`.
double lse_over_subset(const Eigen::ArrayXd& metrics, const Constellation& c, int j, int bit) {
    const int shift = c.bits_per_symbol - 1 - j;
    double max_metric = -std::numeric_limits<double>::infinity();
    for (int m = 0; m < c.order; ++m) {
        if (static_cast<int>((c.labels[static_cast<std::size_t>(m)] >> shift) & 1u) == bit)
            max_metric = std::max(max_metric, metrics(m));
    }
    double acc = 0.0;
    for (int m = 0; m < c.order; ++m) {
        if (static_cast<int>((c.labels[static_cast<std::size_t>(m)] >> shift) & 1u) == bit)
            acc += std::exp(metrics(m) - max_metric);
    }
    return max_metric + std::log(acc);
}

LlrFrame llr_impl(Complex y, const Constellation& c, double n0, const PriorLlrs* priors) {
    if (n0 <= 0.0) throw InvalidNoise("llr: n0 must be > 0");
    const int k = c.bits_per_symbol;

    // Per-point metric log Pr(x|p) - |y-x|^2/n0. The prior factorizes over
    // bits, so two k-entry tables cover all M points.
    Eigen::ArrayXd metrics(c.order);
    Eigen::ArrayXd prior_bit1, prior_bit0;
    if (priors != nullptr) {
        prior_bit1.resize(k);
        prior_bit0.resize(k);
        for (int j = 0; j < k; ++j) {
            prior_bit1(j) = log_sigmoid((*priors)(j));
            prior_bit0(j) = log_sigmoid(-(*priors)(j));
        }
    }
    for (int m = 0; m < c.order; ++m) {
        double metric = -std::norm(y - c.points(m)) / n0;
        if (priors != nullptr) {
            for (int j = 0; j < k; ++j)
                metric += c.label_bit(m, j) ? prior_bit1(j) : prior_bit0(j);
        }
        metrics(m) = metric;
    }

    LlrFrame out(k);
    for (int j = 0; j < k; ++j)
        out(j) = lse_over_subset(metrics, c, j, 1) - lse_over_subset(metrics, c, j, 0);
    return out;
}

}  // namespace

double symbol_prior(const Eigen::VectorXd& bipolar_labels, const PriorLlrs& priors) {
    if (bipolar_labels.size() != priors.size())
        throw ShapeMismatch("symbol_prior: label/prior length mismatch");
    double p = 1.0;
    for (Eigen::Index j = 0; j < priors.size(); ++j)
        p *= 1.0 / (1.0 + std::exp(-priors(j) * bipolar_labels(j)));
    return p;
}

LlrFrame llr(Complex y, const Constellation& constellation, double n0, const PriorLlrs& priors) {
    if (priors.size() != constellation.bits_per_symbol)
        throw ShapeMismatch("llr: priors length must equal bits per symbol");
    if (priors.isZero(0.0)) return llr_impl(y, constellation, n0, nullptr);
    return llr_impl(y, constellation, n0, &priors);
}

LlrFrame llr_no_prior(Complex y, const Constellation& constellation, double n0) {
    return llr_impl(y, constellation, n0, nullptr);
}

BitBlock hard_decide(const LlrFrame& llrs) {
    BitBlock bits(static_cast<std::size_t>(llrs.size()));
    for (Eigen::Index j = 0; j < llrs.size(); ++j)
        bits[static_cast<std::size_t>(j)] = llrs(j) > 0.0 ? 1 : 0;
    return bits;
}

BitSequence demap_sequence(const SymbolSequence& y, const Constellation& constellation, double n0,
                           const std::vector<PriorLlrs>* priors_per_symbol) {
    if (priors_per_symbol != nullptr &&
        priors_per_symbol->size() != static_cast<std::size_t>(y.size()))
        throw ShapeMismatch("demap_sequence: one PriorLlrs per symbol required");
    const int k = constellation.bits_per_symbol;
    BitSequence bits;
    bits.reserve(static_cast<std::size_t>(y.size()) * static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const LlrFrame frame =
            priors_per_symbol != nullptr
                ? llr(y(i), constellation, n0, (*priors_per_symbol)[static_cast<std::size_t>(i)])
                : llr_no_prior(y(i), constellation, n0);
        for (Eigen::Index j = 0; j < frame.size(); ++j) bits.push_back(frame(j) > 0.0 ? 1 : 0);
    }
    return bits;
}

}  // namespace linksim
