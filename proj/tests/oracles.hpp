// Independent test oracles. Everything here recomputes expected values from
// first principles (quadrature, long division, exhaustive search) and must not
// call into the closed-form implementation paths it checks.
#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "mra/ldpc.hpp"

namespace oracles {

using cd = std::complex<double>;

// Composite Simpson rule, n must be even.
template <class F>
double simpson(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * ((i & 1) ? 4.0 : 2.0);
  return s * h / 3.0;
}

inline double gauss_pdf(double x, double mean, double var) {
  return std::exp(-(x - mean) * (x - mean) / (2.0 * var)) / std::sqrt(2.0 * M_PI * var);
}

struct Moments1D {
  double mass = 0.0;
  double mean = 0.0;
  double var = 0.0;
};

// Moments of the (unnormalized) product N(x; m1, v1) N(x; m2, v2) by
// quadrature over a window centered on the analytic product Gaussian.
inline Moments1D product_moments_1d(double m1, double v1, double m2, double v2) {
  const double vc = v1 * v2 / (v1 + v2);
  const double c = (m1 * v2 + m2 * v1) / (v1 + v2);
  const double half = 12.0 * std::sqrt(vc);
  const int n = 50000;
  auto f = [&](double x) { return gauss_pdf(x, m1, v1) * gauss_pdf(x, m2, v2); };
  Moments1D out;
  out.mass = simpson(f, c - half, c + half, n);
  out.mean = simpson([&](double x) { return x * f(x); }, c - half, c + half, n) / out.mass;
  const double ex2 = simpson([&](double x) { return x * x * f(x); }, c - half, c + half, n) / out.mass;
  out.var = ex2 - out.mean * out.mean;
  return out;
}

struct ComplexMoments {
  double mass = 0.0;  // integral of the product
  cd mean;
  double var = 0.0;   // E|h - mean|^2
};

// Product of two circular complex Gaussians CN(h; ma, va) CN(h; mb, vb);
// separates into independent real and imaginary axes of variance v/2.
inline ComplexMoments complex_product_moments(cd ma, double va, cd mb, double vb) {
  const auto re = product_moments_1d(ma.real(), va / 2, mb.real(), vb / 2);
  const auto im = product_moments_1d(ma.imag(), va / 2, mb.imag(), vb / 2);
  ComplexMoments out;
  out.mass = re.mass * im.mass;
  out.mean = {re.mean, im.mean};
  out.var = re.var + im.var;
  return out;
}

inline double cgauss_pdf_at_zero(cd mean, double var) {
  return std::exp(-std::norm(mean) / var) / (M_PI * var);
}

struct SpikeSlabMoments {
  double rho_tilde = 0.0;
  cd mean;
  double var = 0.0;
};

// Posterior of h under (1-rho) delta(h) + rho CN(h; 0, beta) and the Gaussian
// likelihood CN(h; p, q). The atom mass is the likelihood evaluated at zero;
// the slab piece is integrated numerically.
inline SpikeSlabMoments spike_slab_moments(cd p, double q, double beta, double rho) {
  const double atom = (1.0 - rho) * cgauss_pdf_at_zero(p, q);
  const auto slab = complex_product_moments(cd(0.0, 0.0), beta, p, q);
  const double slab_mass = rho * slab.mass;
  SpikeSlabMoments out;
  out.rho_tilde = slab_mass / (atom + slab_mass);
  out.mean = out.rho_tilde * slab.mean;
  const double e2 = out.rho_tilde * (std::norm(slab.mean) + slab.var);
  out.var = e2 - std::norm(out.mean);
  return out;
}

// Remainder of payload * D^8 by g(D) = D^8+D^7+D^4+D^3+D+1 via schoolbook
// GF(2) long division on the coefficient array.
inline std::vector<std::uint8_t> crc8_longdiv(const std::vector<std::uint8_t>& payload) {
  static const std::uint8_t g[9] = {1, 1, 0, 0, 1, 1, 0, 1, 1};
  std::vector<std::uint8_t> work(payload);
  work.resize(payload.size() + 8, 0);
  for (std::size_t i = 0; i < payload.size(); ++i)
    if (work[i])
      for (int j = 0; j < 9; ++j) work[i + j] ^= g[j];
  return {work.end() - 8, work.end()};
}

// Exhaustive maximum-likelihood decoding: the codeword maximizing the LLR
// correlation sum_i (c_i == 0 ? +llr_i : -llr_i).
inline std::vector<std::uint8_t> ml_decode(const mra::phy::LdpcCode& code,
                                           const Eigen::VectorXd& llr) {
  const int k = code.k();
  std::vector<std::uint8_t> best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (long w = 0; w < (1L << k); ++w) {
    std::vector<std::uint8_t> info(k);
    for (int i = 0; i < k; ++i) info[i] = (w >> i) & 1;
    const auto c = code.encode(info);
    double score = 0.0;
    for (int i = 0; i < code.n(); ++i) score += c[i] ? -llr[i] : llr[i];
    if (score > best_score) {
      best_score = score;
      best = c;
    }
  }
  return best;
}

}  // namespace oracles
