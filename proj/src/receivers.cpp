#include "mra/receivers.hpp"

#include <algorithm>
#include <cmath>

#include "mra/crc.hpp"
#include "mra/softbits.hpp"

namespace mra::recv {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

bool contains(const std::vector<int>& sorted, int n) {
  return std::binary_search(sorted.begin(), sorted.end(), n);
}

double relative_change(const MatrixXcd& now, const MatrixXcd& prev) {
  const double den = prev.squaredNorm();
  const double num = (now - prev).squaredNorm();
  if (den > 0.0) return num / den;
  return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

VectorXd saturated_lambda(int n, const std::vector<int>& active) {
  VectorXd lambda = VectorXd::Zero(n);
  for (const int j : active) lambda[j] = 1.0;
  return lambda;
}

}  // namespace

EqualizerResult mmse_equalize(const MatrixXcd& y_d, const MatrixXcd& h_active,
                              double noise_var) {
  const int k2 = static_cast<int>(h_active.cols());
  if (h_active.rows() != y_d.rows())
    throw std::invalid_argument("channel/observation antenna counts differ");
  EqualizerResult out;
  if (k2 == 0) {
    out.x.resize(0, y_d.cols());
    return out;
  }
  MatrixXcd a = h_active.adjoint() * h_active;
  a.diagonal().array() += noise_var;
  Eigen::LDLT<MatrixXcd> ldlt(a);
  VectorXd d = ldlt.vectorD().real();
  double dmax = d.maxCoeff();
  if (!(dmax > 0.0)) dmax = 1.0;
  if (ldlt.info() != Eigen::Success || d.minCoeff() < 1e-12 * dmax) {
    a.diagonal().array() += 1e-12 * dmax;
    ldlt.compute(a);
    out.regularized = true;
  }
  out.x = ldlt.solve(h_active.adjoint() * y_d);
  return out;
}

SideInformation si_update(const VectorXd& lambda_prev, const VectorXd& rho_bar,
                          const MatrixXd& posterior_llrs, const std::vector<int>& detected,
                          const std::vector<int>& crc_passed, double kappa1, double kappa2) {
  const int n = static_cast<int>(lambda_prev.size());
  SideInformation out;
  out.lambda.resize(n);
  out.tag.resize(n);
  for (int j = 0; j < n; ++j) {
    if (contains(crc_passed, j)) {
      out.lambda[j] = 1.0;
      out.tag[j] = Provenance::crc_passed;
    } else if (contains(detected, j)) {
      double rel = 0.0;
      for (Eigen::Index i = 0; i < posterior_llrs.cols(); ++i) {
        const double a = std::abs(posterior_llrs(j, i));
        rel += a / (1.0 + a);
      }
      rel /= static_cast<double>(posterior_llrs.cols());
      out.lambda[j] = kappa1 * rho_bar[j] + (1.0 - kappa1) * rel;
      out.tag[j] = Provenance::decoded_unreliable;
    } else {
      out.lambda[j] = kappa2 * rho_bar[j] + (1.0 - kappa2) * lambda_prev[j];
      out.tag[j] = Provenance::undetected;
    }
  }
  return out;
}

ReceiverOutput turbo_receive(const MatrixXcd& y, const MatrixXcd& x_p, const VectorXd& beta,
                             const SystemConfig& cfg, const phy::CodedModem& modem,
                             const ReceiverOptions& opts) {
  const int n = cfg.n_users;
  const int l = cfg.pilot_len;
  const int ld = cfg.data_len();
  const int nc = cfg.coded_bits;
  const double nv = cfg.noise_var_normalized();
  const auto& constel = modem.constellation();
  const bool forced = opts.forced_activity != nullptr;

  const VectorXd lambda0 = forced ? saturated_lambda(n, *opts.forced_activity)
                                  : VectorXd::Constant(n, double(cfg.n_active) / n);

  amp::AmpOptions aopts{cfg.q2, cfg.eps2, cfg.damping};
  const auto init = amp::amp_jadce(y.leftCols(l), x_p, lambda0, beta, nv, aopts);

  MatrixXcd h = init.h_hat;
  MatrixXd vh = init.v_h;
  VectorXd rho_bar = init.rho_bar;
  VectorXd lambda =
      forced ? lambda0 : (cfg.kappa * rho_bar + (1.0 - cfg.kappa) * lambda0).eval();

  bigamp::SymbolProbs eta(static_cast<Eigen::Index>(n) * ld, constel.order());
  eta.setConstant(1.0 / constel.order());
  MatrixXd le_prior = MatrixXd::Zero(n, nc);   // L_E^a, decoder extrinsic feedback
  MatrixXd ld_post = MatrixXd::Zero(n, nc);    // decoder posteriors, by user
  MatrixXcd x_prev = MatrixXcd::Zero(n, ld);

  ReceiverOutput out;
  std::vector<int> detected;
  for (int j = 1; j <= cfg.q1; ++j) {
    bigamp::JointPriors priors{h, vh, rho_bar, lambda, eta};
    bigamp::EstimatorOptions eopts;
    eopts.noise_var = nv;
    eopts.theta = cfg.theta;
    eopts.kappa = cfg.kappa;
    eopts.omega = cfg.damping;
    eopts.max_iters = cfg.q2;
    eopts.tol = cfg.eps2;
    eopts.rho_bar_symbol_scaling = cfg.rho_bar_symbol_scaling;
    const auto res = bigamp::joint_estimate(y, x_p, beta, priors, constel, eopts);

    h = res.h_hat;
    vh = res.v_h;
    rho_bar = res.rho_bar;
    lambda = forced ? lambda0 : res.lambda_next;
    detected = forced ? *opts.forced_activity : res.active;

    for (const int u : detected) {
      const MatrixXd eta_user = res.eta_tilde.middleRows(static_cast<Eigen::Index>(u) * ld, ld);
      const VectorXd lp_est = phy::bit_posteriors_from_symbol_posteriors(eta_user, constel);
      const VectorXd le_est = phy::extrinsic(lp_est, le_prior.row(u).transpose());
      const VectorXd dec_prior = le_est;
      const VectorXd dec_post = modem.code().decode(dec_prior, cfg.max_bp_iters);
      const VectorXd dec_ext = phy::extrinsic(dec_post, dec_prior);
      le_prior.row(u) = dec_ext.transpose();
      eta.middleRows(static_cast<Eigen::Index>(u) * ld, ld) =
          phy::symbol_priors_from_llrs(dec_ext, constel);
      ld_post.row(u) = dec_post.transpose();
    }
    // Undetected users keep their previous priors.

    const double resid = relative_change(res.x_hat, x_prev);
    x_prev = res.x_hat;
    out.trace.push_back({j, detected, lambda, resid});
    out.iterations = j;
    if (resid <= cfg.eps1) break;
  }

  out.detected = detected;
  for (const int u : detected) {
    const auto block = modem.code().extract_info(phy::hard_decision(ld_post.row(u).transpose()));
    if (phy::crc_check(block)) {
      out.crc_passed.push_back(u);
      out.payloads[u] = std::vector<std::uint8_t>(block.begin(), block.begin() + cfg.payload_bits);
    }
  }
  out.h_hat = h;
  return out;
}

ReceiverOutput si_receive(const MatrixXcd& y, const MatrixXcd& x_p, const VectorXd& beta,
                          const SystemConfig& cfg, const phy::CodedModem& modem,
                          const ReceiverOptions& opts) {
  const int n = cfg.n_users;
  const int l = cfg.pilot_len;
  const int ld = cfg.data_len();
  const int nc = cfg.coded_bits;
  const double nv = cfg.noise_var_normalized();
  const auto& constel = modem.constellation();
  const bool forced = opts.forced_activity != nullptr;

  VectorXd lambda = forced ? saturated_lambda(n, *opts.forced_activity)
                           : VectorXd::Constant(n, double(cfg.n_active) / n);
  const auto y_d = y.rightCols(ld);

  MatrixXcd x_hat = MatrixXcd::Zero(n, ld);  // rows of undetected users stay frozen
  MatrixXd ld_post = MatrixXd::Zero(n, nc);
  std::vector<int> crc_set;
  std::map<int, std::vector<std::uint8_t>> payloads;

  ReceiverOutput out;
  std::vector<int> detected;
  MatrixXcd h;
  for (int j = 1; j <= cfg.q3; ++j) {
    amp::AmpOptions aopts{cfg.q2, cfg.eps2, cfg.damping};
    const auto jad = amp::amp_jadce(y.leftCols(l), x_p, lambda, beta, nv, aopts);
    h = jad.h_hat;
    detected = forced ? *opts.forced_activity : amp::detect_active(jad.rho_bar, cfg.theta);

    MatrixXcd h_a(h.rows(), detected.size());
    for (std::size_t i = 0; i < detected.size(); ++i) h_a.col(i) = h.col(detected[i]);
    const MatrixXcd x_prev = x_hat;
    const auto eq = mmse_equalize(y_d, h_a, nv);
    for (std::size_t i = 0; i < detected.size(); ++i) x_hat.row(detected[i]) = eq.x.row(i);

    // Decode only the detected users that have not yet passed parity.
    std::vector<int> passed_now;
    for (const int u : detected) {
      if (contains(crc_set, u)) continue;
      const VectorXd prior = phy::soft_demod(x_hat.row(u).transpose(), nv, constel);
      const VectorXd post = modem.code().decode(prior, cfg.max_bp_iters);
      ld_post.row(u) = post.transpose();
      const auto block = modem.code().extract_info(phy::hard_decision(post));
      if (phy::crc_check(block)) {
        passed_now.push_back(u);
        payloads[u] =
            std::vector<std::uint8_t>(block.begin(), block.begin() + cfg.payload_bits);
      }
    }
    if (!passed_now.empty()) {
      crc_set.insert(crc_set.end(), passed_now.begin(), passed_now.end());
      std::sort(crc_set.begin(), crc_set.end());
    }

    if (!forced) {
      lambda = si_update(lambda, jad.rho_bar, ld_post, detected, crc_set, cfg.kappa1,
                         cfg.kappa2)
                   .lambda;
    }

    const double resid = relative_change(x_hat, x_prev);
    out.trace.push_back({j, detected, lambda, resid});
    out.iterations = j;
    if (resid <= cfg.eps3) break;
  }

  // CRC-passed users are reported active even if a later pass dropped them.
  std::vector<int> final_set = detected;
  final_set.insert(final_set.end(), crc_set.begin(), crc_set.end());
  std::sort(final_set.begin(), final_set.end());
  final_set.erase(std::unique(final_set.begin(), final_set.end()), final_set.end());

  out.detected = std::move(final_set);
  out.crc_passed = crc_set;
  out.payloads = std::move(payloads);
  out.h_hat = h;
  return out;
}

}  // namespace mra::recv
