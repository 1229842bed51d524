// LLR and symbol-probability calculus shared by both receivers: posterior
// bit LLRs from symbol posteriors, extrinsic subtraction, symbol priors from
// coded-bit LLRs, hard decision, and the MMSE-output soft demapper.
//
// Bit j_c of a user's coded stream maps to data symbol j_c / bits_per_symbol
// at bit position j_c % bits_per_symbol (0-based).
#pragma once

#include <vector>

#include <Eigen/Dense>

#include "mra/common.hpp"
#include "mra/constellation.hpp"

namespace mra::phy {

// Per-user LLR buffers; posterior = extrinsic + prior wherever all three are
// defined, up to the +/- kLlrClamp saturation.
struct SoftBits {
  Eigen::VectorXd prior;
  Eigen::VectorXd posterior;
  Eigen::VectorXd extrinsic;
};

// eta_tilde: data_len x order, each row a distribution over constellation
// points (must sum to 1 within 1e-6). Returns the n_c posterior LLRs.
Eigen::VectorXd bit_posteriors_from_symbol_posteriors(const Eigen::MatrixXd& eta_tilde,
                                                      const Constellation& constel);

// Elementwise posterior - prior, clamped.
Eigen::VectorXd extrinsic(const Eigen::VectorXd& posterior, const Eigen::VectorXd& prior);

// Per-symbol prior distributions from coded-bit LLRs; rows normalized to 1.
Eigen::MatrixXd symbol_priors_from_llrs(const Eigen::VectorXd& llr,
                                        const Constellation& constel);

// Bit 0 iff LLR >= 0.
std::vector<std::uint8_t> hard_decision(const Eigen::VectorXd& llr);

// Max-log-free soft demapper for equalized symbols: per-bit log-sum-exp of
// exp(-|x - s|^2 / noise_var) over the bit-set partition, clamped.
Eigen::VectorXd soft_demod(const Eigen::VectorXcd& x_hat, double noise_var,
                           const Constellation& constel);

}  // namespace mra::phy
