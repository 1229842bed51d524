#include "mra/amp.hpp"

#include <cmath>
#include <stdexcept>

#include "mra/denoisers.hpp"

namespace mra::amp {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

JadceResult amp_jadce(const MatrixXcd& y_p, const MatrixXcd& x_p, const VectorXd& lambda,
                      const VectorXd& beta, double noise_var, const AmpOptions& opts) {
  const int m = static_cast<int>(y_p.rows());
  const int l = static_cast<int>(y_p.cols());
  const int n = static_cast<int>(x_p.rows());
  if (x_p.cols() != l) throw std::invalid_argument("pilot matrix width does not match y_p");
  if (lambda.size() != n || beta.size() != n)
    throw std::invalid_argument("lambda/beta length does not match the user count");
  if (opts.max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");

  // Internal normalization so the divisor floor acts on O(1) quantities;
  // the updates are exactly equivariant under this scaling.
  double scale = beta.mean();
  if (!(scale > 0.0) || !std::isfinite(scale)) scale = 1.0;
  const double rs = std::sqrt(scale);
  const MatrixXcd y = y_p / rs;
  const VectorXd b = beta / scale;
  const double nv = noise_var / scale;

  const MatrixXd xp_abs2 = x_p.cwiseAbs2();
  VectorXd log_odds(n);
  for (int j = 0; j < n; ++j) log_odds[j] = activity_log_odds(lambda[j]);

  JadceResult out;
  MatrixXcd h = MatrixXcd::Zero(m, n);
  MatrixXd vh(m, n);
  for (int j = 0; j < n; ++j) vh.col(j).setConstant(lambda[j] * b[j]);
  MatrixXcd s_hat = MatrixXcd::Zero(m, l);
  MatrixXcd mp(m, l);
  MatrixXd vp(m, l);
  MatrixXd rho_tilde(m, n);
  VectorXd col_k_sum(n);

  int iter = 0;
  for (; iter < opts.max_iters;) {
    ++iter;
    // Linear-mixing block: Gaussian approximation of z = H x with Onsager
    // correction, then posterior and scaled residual.
    MatrixXd vbar = vh * xp_abs2;
    MatrixXcd mp_raw = h * x_p - s_hat.cwiseProduct(vbar.cast<cd>());
    if (iter == 1) {
      mp = mp_raw;
      vp = vbar;
    } else {
      mp = opts.omega * mp_raw + (1.0 - opts.omega) * mp;
      vp = opts.omega * vbar + (1.0 - opts.omega) * vp;
    }
    for (int t = 0; t < l; ++t)
      for (int i = 0; i < m; ++i)
        if (vp(i, t) < kVarFloor) {
          vp(i, t) = kVarFloor;
          ++out.floored;
        }
    MatrixXd denom = (vp.array() + nv).matrix();
    MatrixXcd z_hat = (y.cwiseProduct(vp.cast<cd>()) + nv * mp).cwiseQuotient(denom.cast<cd>());
    MatrixXd v_z = nv * vp.cwiseQuotient(denom);
    s_hat = (z_hat - mp).cwiseQuotient(vp.cast<cd>());
    MatrixXd v_s = (1.0 - v_z.cwiseQuotient(vp).array()).matrix().cwiseQuotient(vp);

    // Channel block: per-coefficient Gaussian likelihood from the pilots,
    // then the spike-and-slab denoiser with the cross-antenna activity sum.
    MatrixXd q_inv = v_s * xp_abs2.transpose();
    MatrixXcd r = s_hat * x_p.adjoint();
    MatrixXd q(m, n);
    MatrixXcd p(m, n);
    MatrixXd k_llr(m, n);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < m; ++i) {
        const double qi = q_inv(i, j);
        if (qi < kVarFloor) ++out.floored;
        q(i, j) = 1.0 / floored(qi);
        p(i, j) = h(i, j) + q(i, j) * r(i, j);
        k_llr(i, j) = bigamp::spike_slab_llr(p(i, j), q(i, j), b[j]);
      }
      col_k_sum[j] = k_llr.col(j).sum();
    }
    MatrixXcd h_new(m, n);
    MatrixXd vh_new(m, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < m; ++i) {
        const double lmn = clamp_abs(log_odds[j] + col_k_sum[j] - k_llr(i, j), kLogOddsClamp);
        const auto post = bigamp::spike_slab_posterior(p(i, j), q(i, j), b[j], lmn);
        rho_tilde(i, j) = post.rho_tilde;
        h_new(i, j) = post.mean;
        vh_new(i, j) = post.var;
      }

    const MatrixXcd h_prev = h;
    h = opts.omega * h_new + (1.0 - opts.omega) * h_prev;
    vh = vh_new;
    if (!h.allFinite() || !vh.allFinite())
      throw numerical_error("AMP produced a non-finite estimate", iter);

    const double den = h_prev.squaredNorm();
    const double num = (h - h_prev).squaredNorm();
    if (den > 0.0 ? (num / den <= opts.tol) : (num == 0.0 && iter > 1)) break;
  }

  out.h_hat = rs * h;
  out.v_h = scale * vh;
  out.rho_tilde = rho_tilde;
  out.rho_bar = rho_tilde.colwise().mean();
  out.iterations = iter;
  return out;
}

std::vector<int> detect_active(const VectorXd& rho_bar, double theta) {
  std::vector<int> act;
  for (Eigen::Index j = 0; j < rho_bar.size(); ++j)
    if (rho_bar[j] >= theta) act.push_back(static_cast<int>(j));
  return act;
}

}  // namespace mra::amp
