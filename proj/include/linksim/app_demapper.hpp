#pragma once

#include <vector>

#include <Eigen/Core>

#include "linksim/errors.hpp"
#include "linksim/modem.hpp"

namespace linksim {

// Per-bit prior log-odds, natural log, positive favors bit 1.
using PriorLlrs = Eigen::VectorXd;

// Per-bit LLRs for one received symbol; positive means bit 1.
using LlrFrame = Eigen::VectorXd;

// Prior probability of a constellation point given per-bit priors:
// prod_j sigmoid(priors[j] * bipolar_labels[j]), bipolar labels in {-1,+1}.
double symbol_prior(const Eigen::VectorXd& bipolar_labels, const PriorLlrs& priors);

// Exact APP LLRs with per-bit priors, log-sum-exp stabilized:
//   l(j) = LSE_{x: bit_j=1}[log Pr(x|p) - |y-x|^2/n0]
//        - LSE_{x: bit_j=0}[log Pr(x|p) - |y-x|^2/n0]
// All-zero priors take the uniform-prior code path so the reduction to
// llr_no_prior is bit-exact.
LlrFrame llr(Complex y, const Constellation& constellation, double n0, const PriorLlrs& priors);

// Uniform-prior APP LLRs.
LlrFrame llr_no_prior(Complex y, const Constellation& constellation, double n0);

// bit = 1 iff l > 0; the boundary l = 0 decides 0.
BitBlock hard_decide(const LlrFrame& llrs);

// Per-symbol LLR + hard decision over a whole sequence; priors are optional
// (one PriorLlrs per symbol) and default to uniform.
BitSequence demap_sequence(const SymbolSequence& y, const Constellation& constellation, double n0,
                           const std::vector<PriorLlrs>* priors_per_symbol = nullptr);

}  // namespace linksim
