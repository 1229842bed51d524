// Bilinear message-passing joint estimator: iterates Gaussian estimation of
// the linear-mixing variables z = Hx, a spike-and-slab denoiser for the
// effective channel coefficients (pilot and data likelihoods combined by a
// Gaussian product), and discrete-prior estimation of the soft data symbols.
// One sweep reads only the previous iterate; damping applies to M^p, V^p,
// h_hat and x_hat.
#pragma once

#include <vector>

#include <Eigen/Dense>

#include "mra/common.hpp"
#include "mra/constellation.hpp"

namespace mra::bigamp {

using SymbolProbs = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct EstimatorOptions {
  double noise_var = 0.0;  // sigma^2 / gamma
  double theta = 0.4;
  double kappa = 0.5;
  double omega = 0.6;
  int max_iters = 100;  // Q2
  double tol = 1e-5;    // eps2, on the relative change of z_hat
  bool rho_bar_symbol_scaling = true;
  // When set, the data symbols are pinned to this N x L_d matrix with zero
  // variance and the soft-symbol block is skipped (oracle/equivalence mode).
  const Eigen::MatrixXcd* pinned_data = nullptr;
};

struct JointPriors {
  Eigen::MatrixXcd h_init;   // M x N
  Eigen::MatrixXd v_h_init;  // M x N
  Eigen::VectorXd rho_bar;   // N, average sparsity levels from the previous pass
  Eigen::VectorXd lambda;    // N, activity likelihoods
  SymbolProbs eta;           // (N*L_d) x order symbol priors; empty means uniform
};

struct IterationDiag {
  int iteration = 0;
  double residual = 0.0;
  double mean_rho_bar = 0.0;
  long floored = 0;
};

struct JointResult {
  std::vector<int> active;   // threshold rule on the updated rho_bar
  SymbolProbs eta_tilde;     // (N*L_d) x order posterior symbol probabilities
  Eigen::MatrixXcd x_hat;    // N x L_d soft data symbols
  Eigen::MatrixXcd h_hat;    // M x N
  Eigen::MatrixXd v_h;       // M x N
  Eigen::VectorXd rho_bar;   // updated average sparsity levels
  Eigen::VectorXd lambda_next;
  int iterations = 0;
  std::vector<IterationDiag> diag;
};

// All per-iteration quantities; exposed for the step-level tests.
struct EstimatorState {
  Eigen::MatrixXcd z_hat, s_hat, m_p;  // M x T
  Eigen::MatrixXd v_z, v_s, v_p;       // M x T
  Eigen::MatrixXcd h_hat;              // M x N
  Eigen::MatrixXd v_h;                 // M x N
  Eigen::MatrixXcd p_h_pilot, p_h_data, p_h;  // M x N
  Eigen::MatrixXd q_h_pilot, q_h_data, q_h;   // M x N
  Eigen::MatrixXd k_llr, l_llr, rho, rho_tilde;  // M x N
  Eigen::MatrixXcd mu;                 // M x N
  Eigen::MatrixXd tau;                 // M x N
  Eigen::MatrixXcd x_hat;              // N x T, pilot block pinned
  Eigen::MatrixXd v_x;                 // N x T, zero on the pilot block
  SymbolProbs eta_tilde;               // (N*L_d) x order
  Eigen::VectorXd rho_bar_prev;        // N, fixed during the inner loop
  Eigen::VectorXd lambda;              // N
  long floored = 0;
  int iteration = 0;
};

class JointEstimator {
 public:
  // Works in the units of its inputs; callers normalize (see joint_estimate).
  JointEstimator(const Eigen::MatrixXcd& y, const Eigen::MatrixXcd& x_p,
                 const Eigen::VectorXd& beta, const phy::Constellation& constel,
                 const EstimatorOptions& opts);

  void init(const JointPriors& priors);
  // Recomputes the cached product H X; call after editing the state directly.
  void resync_product();
  void sweep();  // one full iteration over the z, h, x blocks
  double last_residual() const { return residual_; }
  EstimatorState& state() { return st_; }
  const EstimatorState& state() const { return st_; }

  JointResult run(const JointPriors& priors);
  JointResult finish() const;  // sparsity/lambda update and threshold rule

 private:
  void x_step(const Eigen::MatrixXcd& h_prev, const Eigen::MatrixXd& v_h_prev,
              Eigen::MatrixXcd& x_new, Eigen::MatrixXd& v_x_new);

  const Eigen::MatrixXcd& y_;
  Eigen::MatrixXcd x_p_;
  Eigen::VectorXd beta_;
  const phy::Constellation& constel_;
  EstimatorOptions opts_;
  int m_, n_, l_, ld_;
  Eigen::MatrixXd xp_abs2_;
  Eigen::VectorXd log_odds_;
  SymbolProbs log_eta_;
  EstimatorState st_;
  Eigen::MatrixXcd z_prod_;  // H X of the committed state, also the residual basis
  double residual_ = 0.0;
};

// Normalizes the problem scale, runs the estimator to convergence, and maps
// the outputs back to the caller's units.
JointResult joint_estimate(const Eigen::MatrixXcd& y, const Eigen::MatrixXcd& x_p,
                           const Eigen::VectorXd& beta, const JointPriors& priors,
                           const phy::Constellation& constel, const EstimatorOptions& opts);

}  // namespace mra::bigamp
