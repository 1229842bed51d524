#include "mra/softbits.hpp"

#include <cmath>
#include <stdexcept>

namespace mra::phy {

Eigen::VectorXd bit_posteriors_from_symbol_posteriors(const Eigen::MatrixXd& eta_tilde,
                                                      const Constellation& constel) {
  const int bps = constel.bits_per_symbol();
  const int data_len = static_cast<int>(eta_tilde.rows());
  if (eta_tilde.cols() != constel.order())
    throw std::invalid_argument("eta_tilde column count does not match the constellation order");
  Eigen::VectorXd llr(data_len * bps);
  for (int t = 0; t < data_len; ++t) {
    const double total = eta_tilde.row(t).sum();
    if (std::abs(total - 1.0) > 1e-6)
      throw std::invalid_argument("symbol posterior row is not normalized");
    for (int l = 0; l < bps; ++l) {
      double p0 = 0.0, p1 = 0.0;
      for (const int s : constel.bit_set(l, 0)) p0 += eta_tilde(t, s);
      for (const int s : constel.bit_set(l, 1)) p1 += eta_tilde(t, s);
      llr[t * bps + l] = clamp_llr(std::log(p0) - std::log(p1));
    }
  }
  return llr;
}

Eigen::VectorXd extrinsic(const Eigen::VectorXd& posterior, const Eigen::VectorXd& prior) {
  if (posterior.size() != prior.size())
    throw std::invalid_argument("posterior/prior length mismatch");
  Eigen::VectorXd e(posterior.size());
  for (Eigen::Index i = 0; i < e.size(); ++i) e[i] = clamp_llr(posterior[i] - prior[i]);
  return e;
}

Eigen::MatrixXd symbol_priors_from_llrs(const Eigen::VectorXd& llr,
                                        const Constellation& constel) {
  const int bps = constel.bits_per_symbol();
  if (llr.size() % bps != 0)
    throw std::invalid_argument("LLR count is not a multiple of bits per symbol");
  const int data_len = static_cast<int>(llr.size()) / bps;
  Eigen::MatrixXd eta(data_len, constel.order());
  for (int t = 0; t < data_len; ++t) {
    for (int s = 0; s < constel.order(); ++s) {
      double p = 1.0;
      for (int l = 0; l < bps; ++l) {
        const double p0 = logistic(llr[t * bps + l]);
        p *= constel.pattern_bit(s, l) == 0 ? p0 : 1.0 - p0;
      }
      eta(t, s) = p;
    }
    eta.row(t) /= eta.row(t).sum();
  }
  return eta;
}

std::vector<std::uint8_t> hard_decision(const Eigen::VectorXd& llr) {
  std::vector<std::uint8_t> bits(llr.size());
  for (Eigen::Index i = 0; i < llr.size(); ++i) bits[i] = llr[i] >= 0.0 ? 0 : 1;
  return bits;
}

Eigen::VectorXd soft_demod(const Eigen::VectorXcd& x_hat, double noise_var,
                           const Constellation& constel) {
  const int bps = constel.bits_per_symbol();
  const double inv_nv = 1.0 / floored(noise_var);
  Eigen::VectorXd llr(x_hat.size() * bps);
  std::vector<double> metric(constel.order());
  for (Eigen::Index t = 0; t < x_hat.size(); ++t) {
    for (int s = 0; s < constel.order(); ++s)
      metric[s] = -std::norm(x_hat[t] - constel.points()[s]) * inv_nv;
    for (int l = 0; l < bps; ++l) {
      auto lse = [&](const std::vector<int>& set) {
        double m = -std::numeric_limits<double>::infinity();
        for (const int s : set) m = std::max(m, metric[s]);
        double acc = 0.0;
        for (const int s : set) acc += std::exp(metric[s] - m);
        return m + std::log(acc);
      };
      llr[t * bps + l] = clamp_llr(lse(constel.bit_set(l, 0)) - lse(constel.bit_set(l, 1)));
    }
  }
  return llr;
}

}  // namespace mra::phy
