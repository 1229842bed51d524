// Scalar building blocks of the message-passing estimators: the Gaussian
// observation posterior, the product of two Gaussian likelihoods, and the
// Bernoulli-Gaussian (spike-and-slab) channel denoiser.
#pragma once

#include "mra/common.hpp"

namespace mra::bigamp {

struct Gaussian {
  cd mean;
  double var = 0.0;
};

// Product of two complex Gaussian PDFs in the same variable, renormalized:
// mean (Pa Qb + Pb Qa)/(Qa + Qb), variance Qa Qb/(Qa + Qb). Computed through
// the weight Qb/(Qa+Qb), which is scale-free; flooring this divisor would
// bias the mean whenever both variances are small.
inline Gaussian gaussian_product(const Gaussian& a, const Gaussian& b) {
  const double s = a.var + b.var;
  if (s <= 0.0) return {0.5 * (a.mean + b.mean), 0.0};
  const double wa = b.var / s;
  return {a.mean * wa + b.mean * (1.0 - wa), a.var * wa};
}

// Posterior of z from prior CN(z; m_p, v_p) and observation y = z + noise:
// mean (y v_p + nv m_p)/(nv + v_p), variance nv v_p/(nv + v_p). A zero
// denominator means both are certain; the observation wins.
inline Gaussian z_posterior(cd y, cd m_p, double v_p, double noise_var) {
  const double s = noise_var + v_p;
  if (s <= 0.0) return {y, 0.0};
  const double w = v_p / s;
  return {y * w + m_p * (1.0 - w), noise_var * w};
}

// Smallest admissible likelihood variance: keeps the q -> 0 limit exact
// (infinite slab-vs-spike ratio for p != 0) without dividing by zero.
inline double guarded_var(double q) { return q > 1e-300 ? q : 1e-300; }

// Log likelihood ratio of "slab" vs "spike" given the Gaussian likelihood
// CN(h; p, q) and slab variance beta:
//   K = ln(q/(q+beta)) + |p|^2 beta / ((q+beta) q).
inline double spike_slab_llr(cd p, double q, double beta) {
  const double qf = guarded_var(q);
  return std::log(qf / (qf + beta)) + std::norm(p) * beta / ((qf + beta) * qf);
}

struct SpikeSlabPosterior {
  double rho_tilde = 0.0;  // posterior non-zero probability
  cd mu;                   // slab posterior mean
  double tau = 0.0;        // slab posterior variance
  cd mean;                 // MMSE estimate rho_tilde * mu
  double var = 0.0;        // posterior variance
};

// Posterior of h under the prior (1-rho) delta(h) + rho CN(h; 0, beta) with
// rho = logistic(log_odds) and likelihood CN(h; p, q). The posterior non-zero
// probability is logistic(log_odds + K).
inline SpikeSlabPosterior spike_slab_posterior(cd p, double q, double beta, double log_odds) {
  const double qf = guarded_var(q);
  SpikeSlabPosterior out;
  const double k = spike_slab_llr(p, qf, beta);
  out.rho_tilde = logistic(log_odds + k);
  out.mu = p * (beta / (beta + qf));
  out.tau = beta * qf / (beta + qf);
  out.mean = out.rho_tilde * out.mu;
  const double v = out.rho_tilde * (std::norm(out.mu) + out.tau) - std::norm(out.mean);
  out.var = v > 0.0 ? v : 0.0;
  return out;
}

}  // namespace mra::bigamp
