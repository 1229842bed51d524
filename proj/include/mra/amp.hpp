// Pilot-only AMP for joint activity detection and channel estimation with a
// Bernoulli-Gaussian prior on the effective channel coefficients. Initializes
// the turbo receiver and drives the SI-aided receiver.
#pragma once

#include <vector>

#include <Eigen/Dense>

#include "mra/common.hpp"

namespace mra::amp {

struct JadceResult {
  Eigen::MatrixXcd h_hat;      // M x N
  Eigen::MatrixXd v_h;         // M x N, nonnegative
  Eigen::MatrixXd rho_tilde;   // M x N posterior sparsity levels in [0,1]
  Eigen::VectorXd rho_bar;     // per-user mean of rho_tilde over antennas
  int iterations = 0;
  long floored = 0;            // divisor-floor activations, for diagnostics
};

struct AmpOptions {
  int max_iters = 100;
  double tol = 1e-5;    // on the relative change of h_hat
  double omega = 1.0;   // damping on M^p, V^p, h_hat
};

// lambda: per-user activity likelihoods in [0,1]; beta: per-user large-scale
// gains; noise_var: per-entry variance of the normalized noise.
JadceResult amp_jadce(const Eigen::MatrixXcd& y_p, const Eigen::MatrixXcd& x_p,
                      const Eigen::VectorXd& lambda, const Eigen::VectorXd& beta,
                      double noise_var, const AmpOptions& opts);

// {n : rho_bar_n >= theta}, sorted.
std::vector<int> detect_active(const Eigen::VectorXd& rho_bar, double theta);

}  // namespace mra::amp
