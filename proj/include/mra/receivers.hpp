// The two full receivers and their shared pieces. The turbo receiver iterates
// the joint estimator against the channel decoder, exchanging extrinsic LLRs.
// The SI-aided receiver iterates pilot-only AMP, an MMSE equalizer and the
// decoder, feeding parity results and decoding reliability back as per-user
// activity likelihoods; CRC-passed users are never re-decoded.
#pragma once

#include <map>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "mra/amp.hpp"
#include "mra/bigamp.hpp"
#include "mra/config.hpp"
#include "mra/modem.hpp"

namespace mra::recv {

struct IterTrace {
  int iteration = 0;
  std::vector<int> detected;
  Eigen::VectorXd lambda;  // after this iteration's update
  double residual = 0.0;
};

struct ReceiverOutput {
  std::vector<int> detected;    // final reported active set, sorted
  std::vector<int> crc_passed;  // subset of detected, sorted
  std::map<int, std::vector<std::uint8_t>> payloads;  // per CRC-passed user
  Eigen::MatrixXcd h_hat;
  int iterations = 0;
  std::vector<IterTrace> trace;
};

struct ReceiverOptions {
  // Known-activity mode: detection is bypassed and the activity likelihoods
  // stay saturated at the given set.
  const std::vector<int>* forced_activity = nullptr;
};

enum class Provenance { crc_passed, decoded_unreliable, undetected };

struct SideInformation {
  Eigen::VectorXd lambda;
  std::vector<Provenance> tag;
};

struct EqualizerResult {
  Eigen::MatrixXcd x;  // one row per equalized user
  bool regularized = false;
};

// X = (H_a^H H_a + noise_var I)^{-1} H_a^H Y_d via a Cholesky-type solve.
// A relative regularization floor is added when the normal matrix is
// near-singular, and the result is flagged.
EqualizerResult mmse_equalize(const Eigen::MatrixXcd& y_d, const Eigen::MatrixXcd& h_active,
                              double noise_var);

// Activity likelihood update from parity results, decoding reliability and
// the average sparsity levels. posterior_llrs holds one row of n_c posterior
// LLRs per user (rows of undecoded users are ignored).
SideInformation si_update(const Eigen::VectorXd& lambda_prev, const Eigen::VectorXd& rho_bar,
                          const Eigen::MatrixXd& posterior_llrs,
                          const std::vector<int>& detected, const std::vector<int>& crc_passed,
                          double kappa1, double kappa2);

ReceiverOutput turbo_receive(const Eigen::MatrixXcd& y, const Eigen::MatrixXcd& x_p,
                             const Eigen::VectorXd& beta, const SystemConfig& cfg,
                             const phy::CodedModem& modem, const ReceiverOptions& opts = {});

ReceiverOutput si_receive(const Eigen::MatrixXcd& y, const Eigen::MatrixXcd& x_p,
                          const Eigen::VectorXd& beta, const SystemConfig& cfg,
                          const phy::CodedModem& modem, const ReceiverOptions& opts = {});

}  // namespace mra::recv
