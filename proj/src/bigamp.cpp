#include "mra/bigamp.hpp"

#include <cmath>
#include <stdexcept>

#include "mra/denoisers.hpp"

namespace mra::bigamp {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

JointEstimator::JointEstimator(const MatrixXcd& y, const MatrixXcd& x_p, const VectorXd& beta,
                               const phy::Constellation& constel, const EstimatorOptions& opts)
    : y_(y), x_p_(x_p), beta_(beta), constel_(constel), opts_(opts) {
  m_ = static_cast<int>(y.rows());
  l_ = static_cast<int>(x_p.cols());
  n_ = static_cast<int>(x_p.rows());
  ld_ = static_cast<int>(y.cols()) - l_;
  if (ld_ < 1) throw std::invalid_argument("received frame shorter than the pilot segment");
  if (beta.size() != n_) throw std::invalid_argument("beta length does not match the user count");
  if (opts.pinned_data &&
      (opts.pinned_data->rows() != n_ || opts.pinned_data->cols() != ld_))
    throw std::invalid_argument("pinned data matrix has the wrong shape");
  xp_abs2_ = x_p.cwiseAbs2();
}

void JointEstimator::init(const JointPriors& priors) {
  if (priors.h_init.rows() != m_ || priors.h_init.cols() != n_ ||
      priors.v_h_init.rows() != m_ || priors.v_h_init.cols() != n_)
    throw std::invalid_argument("channel prior shape mismatch");
  if (priors.lambda.size() != n_ || priors.rho_bar.size() != n_)
    throw std::invalid_argument("lambda/rho_bar length mismatch");

  const int s = constel_.order();
  log_eta_.resize(static_cast<Eigen::Index>(n_) * ld_, s);
  if (priors.eta.size() == 0) {
    log_eta_.setConstant(-std::log(static_cast<double>(s)));
  } else {
    if (priors.eta.rows() != static_cast<Eigen::Index>(n_) * ld_ || priors.eta.cols() != s)
      throw std::invalid_argument("eta prior shape mismatch");
    for (Eigen::Index r = 0; r < priors.eta.rows(); ++r) {
      const double total = priors.eta.row(r).sum();
      if (std::abs(total - 1.0) > 1e-6)
        throw std::invalid_argument("symbol prior row is not normalized");
      for (int c = 0; c < s; ++c) {
        const double p = priors.eta(r, c);
        log_eta_(r, c) = p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
      }
    }
  }

  log_odds_.resize(n_);
  for (int j = 0; j < n_; ++j) log_odds_[j] = activity_log_odds(priors.lambda[j]);

  st_ = EstimatorState{};
  st_.h_hat = priors.h_init;
  st_.v_h = priors.v_h_init;
  st_.lambda = priors.lambda;
  st_.rho_bar_prev = priors.rho_bar;
  st_.x_hat.resize(n_, l_ + ld_);
  st_.x_hat.leftCols(l_) = x_p_;
  st_.v_x = MatrixXd::Zero(n_, l_ + ld_);
  if (opts_.pinned_data) {
    st_.x_hat.rightCols(ld_) = *opts_.pinned_data;
  } else {
    st_.x_hat.rightCols(ld_).setZero();
    st_.v_x.rightCols(ld_).setOnes();
  }
  st_.s_hat = MatrixXcd::Zero(m_, l_ + ld_);
  st_.z_hat = MatrixXcd::Zero(m_, l_ + ld_);
  st_.eta_tilde.resize(static_cast<Eigen::Index>(n_) * ld_, s);
  st_.eta_tilde.setConstant(1.0 / s);
  st_.iteration = 0;
  resync_product();
  residual_ = std::numeric_limits<double>::infinity();
}

void JointEstimator::resync_product() {
  z_prod_.resize(m_, l_ + ld_);
  z_prod_.noalias() = st_.h_hat * st_.x_hat;
}

void JointEstimator::sweep() {
  ++st_.iteration;
  const double nv = opts_.noise_var;
  const double w = opts_.omega;

  // ---- Linear-mixing block ----
  const MatrixXd x_abs2 = st_.x_hat.cwiseAbs2();
  const MatrixXd h_abs2 = st_.h_hat.cwiseAbs2();
  MatrixXd vbar(m_, l_ + ld_);
  vbar.noalias() = st_.v_h * x_abs2;
  vbar.noalias() += h_abs2 * st_.v_x;
  // z_prod_ carries H(i-1) X(i-1) from the previous commit.
  MatrixXcd mp_raw = z_prod_ - st_.s_hat.cwiseProduct(vbar.cast<cd>());
  MatrixXd vp_raw = vbar;
  vp_raw.noalias() += st_.v_h * st_.v_x;
  if (st_.iteration == 1) {
    st_.m_p = mp_raw;
    st_.v_p = vp_raw;
  } else {
    st_.m_p = w * mp_raw + (1.0 - w) * st_.m_p;
    st_.v_p = w * vp_raw + (1.0 - w) * st_.v_p;
  }
  for (int t = 0; t < l_ + ld_; ++t)
    for (int i = 0; i < m_; ++i)
      if (st_.v_p(i, t) < kVarFloor) {
        st_.v_p(i, t) = kVarFloor;
        ++st_.floored;
      }
  const MatrixXd denom = (st_.v_p.array() + nv).matrix();
  st_.z_hat = (y_.cwiseProduct(st_.v_p.cast<cd>()) + nv * st_.m_p).cwiseQuotient(denom.cast<cd>());
  st_.v_z = nv * st_.v_p.cwiseQuotient(denom);
  st_.s_hat = (st_.z_hat - st_.m_p).cwiseQuotient(st_.v_p.cast<cd>());
  st_.v_s = (1.0 - st_.v_z.cwiseQuotient(st_.v_p).array()).matrix().cwiseQuotient(st_.v_p);

  // ---- Channel block ----
  const auto vs_p = st_.v_s.leftCols(l_);
  const auto vs_d = st_.v_s.rightCols(ld_);
  const auto sh_p = st_.s_hat.leftCols(l_);
  const auto sh_d = st_.s_hat.rightCols(ld_);
  const auto xd = st_.x_hat.rightCols(ld_);
  const auto vxd = st_.v_x.rightCols(ld_);

  MatrixXd qp_inv(m_, n_), qd_inv(m_, n_), corr_h(m_, n_);
  qp_inv.noalias() = vs_p * xp_abs2_.transpose();
  qd_inv.noalias() = vs_d * x_abs2.rightCols(ld_).transpose();
  corr_h.noalias() = vs_d * vxd.transpose();
  MatrixXcd rp(m_, n_), rd(m_, n_);
  rp.noalias() = sh_p * x_p_.adjoint();
  rd.noalias() = sh_d * xd.adjoint();

  st_.q_h_pilot.resize(m_, n_);
  st_.q_h_data.resize(m_, n_);
  st_.p_h_pilot.resize(m_, n_);
  st_.p_h_data.resize(m_, n_);
  st_.p_h.resize(m_, n_);
  st_.q_h.resize(m_, n_);
  st_.k_llr.resize(m_, n_);
  st_.l_llr.resize(m_, n_);
  st_.rho.resize(m_, n_);
  st_.rho_tilde.resize(m_, n_);
  st_.mu.resize(m_, n_);
  st_.tau.resize(m_, n_);

  VectorXd col_k_sum = VectorXd::Zero(n_);
  for (int j = 0; j < n_; ++j) {
    for (int i = 0; i < m_; ++i) {
      if (qp_inv(i, j) < kVarFloor) ++st_.floored;
      if (qd_inv(i, j) < kVarFloor) ++st_.floored;
      const double qp = 1.0 / floored(qp_inv(i, j));
      const double qd = 1.0 / floored(qd_inv(i, j));
      st_.q_h_pilot(i, j) = qp;
      st_.q_h_data(i, j) = qd;
      st_.p_h_pilot(i, j) = st_.h_hat(i, j) + qp * rp(i, j);
      st_.p_h_data(i, j) =
          st_.h_hat(i, j) * (1.0 - qd * corr_h(i, j)) + qd * rd(i, j);
      const Gaussian comb = gaussian_product({st_.p_h_pilot(i, j), qp}, {st_.p_h_data(i, j), qd});
      st_.p_h(i, j) = comb.mean;
      st_.q_h(i, j) = comb.var;
      st_.k_llr(i, j) = spike_slab_llr(comb.mean, comb.var, beta_[j]);
      col_k_sum[j] += st_.k_llr(i, j);
    }
  }
  MatrixXcd h_new(m_, n_);
  MatrixXd vh_new(m_, n_);
  for (int j = 0; j < n_; ++j)
    for (int i = 0; i < m_; ++i) {
      const double lmn =
          clamp_abs(log_odds_[j] + col_k_sum[j] - st_.k_llr(i, j), kLogOddsClamp);
      st_.l_llr(i, j) = lmn;
      st_.rho(i, j) = logistic(lmn);
      const auto post = spike_slab_posterior(st_.p_h(i, j), st_.q_h(i, j), beta_[j], lmn);
      st_.rho_tilde(i, j) = post.rho_tilde;
      st_.mu(i, j) = post.mu;
      st_.tau(i, j) = post.tau;
      h_new(i, j) = post.mean;
      vh_new(i, j) = post.var;
    }

  // ---- Soft data symbol block (reads the pre-update channel state) ----
  MatrixXcd x_new;
  MatrixXd vx_new;
  if (!opts_.pinned_data) x_step(st_.h_hat, st_.v_h, x_new, vx_new);

  st_.h_hat = w * h_new + (1.0 - w) * st_.h_hat;
  st_.v_h = vh_new;
  if (!opts_.pinned_data) {
    st_.x_hat.rightCols(ld_) = w * x_new + (1.0 - w) * st_.x_hat.rightCols(ld_);
    st_.v_x.rightCols(ld_) = vx_new;
  }
  if (!st_.h_hat.allFinite() || !st_.x_hat.allFinite())
    throw numerical_error("joint estimator produced a non-finite estimate", st_.iteration);

  // Convergence is tracked on the estimated linear-mixing variables
  // Z = H X of the committed state. The posterior z_hat is pinned to the
  // observation whenever V^p dominates the noise level, which makes its
  // change degenerate early in the transient; the product estimate is not.
  MatrixXcd z_new(m_, l_ + ld_);
  z_new.noalias() = st_.h_hat * st_.x_hat;
  const double den = z_prod_.squaredNorm();
  const double num = (z_new - z_prod_).squaredNorm();
  residual_ = den > 0.0 ? num / den
                        : (num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
  z_prod_.swap(z_new);
}

void JointEstimator::x_step(const MatrixXcd& h_prev, const MatrixXd& v_h_prev,
                            MatrixXcd& x_new, MatrixXd& vx_new) {
  const auto vs_d = st_.v_s.rightCols(ld_);
  const auto sh_d = st_.s_hat.rightCols(ld_);
  const MatrixXd h_abs2 = h_prev.cwiseAbs2();

  MatrixXd qx_inv(n_, ld_), corr_x(n_, ld_);
  qx_inv.noalias() = h_abs2.transpose() * vs_d;
  corr_x.noalias() = v_h_prev.transpose() * vs_d;
  MatrixXcd rx(n_, ld_);
  rx.noalias() = h_prev.adjoint() * sh_d;

  const int s = constel_.order();
  const auto& pts = constel_.points();
  x_new.resize(n_, ld_);
  vx_new.resize(n_, ld_);
  std::vector<double> wlog(s), prob(s);
  for (int j = 0; j < n_; ++j) {
    const double rb = opts_.rho_bar_symbol_scaling ? st_.rho_bar_prev[j] : 1.0;
    for (int t = 0; t < ld_; ++t) {
      if (qx_inv(j, t) < kVarFloor) ++st_.floored;
      const double qx = 1.0 / floored(qx_inv(j, t));
      const cd px = st_.x_hat(j, l_ + t) * (1.0 - qx * corr_x(j, t)) + qx * rx(j, t);
      const Eigen::Index row = static_cast<Eigen::Index>(j) * ld_ + t;
      // Posterior over constellation points in the log domain.
      double wmax = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < s; ++a) {
        wlog[a] = log_eta_(row, a) - std::norm(pts[a] - px) / qx;
        wmax = std::max(wmax, wlog[a]);
      }
      if (!std::isfinite(wmax))
        throw numerical_error("all symbol posterior weights vanished", st_.iteration);
      double total = 0.0;
      for (int a = 0; a < s; ++a) {
        prob[a] = std::exp(wlog[a] - wmax);
        total += prob[a];
      }
      cd mean(0.0, 0.0);
      for (int a = 0; a < s; ++a) {
        prob[a] /= total;
        st_.eta_tilde(row, a) = prob[a];
        mean += prob[a] * pts[a];
      }
      const cd xhat = rb * mean;
      double var = 0.0;
      for (int a = 0; a < s; ++a) var += prob[a] * std::norm(rb * pts[a] - xhat);
      x_new(j, t) = xhat;
      vx_new(j, t) = var;
    }
  }
}

JointResult JointEstimator::finish() const {
  JointResult out;
  out.rho_bar = st_.rho_tilde.colwise().mean();
  out.lambda_next.resize(n_);
  for (int j = 0; j < n_; ++j)
    out.lambda_next[j] = opts_.kappa * out.rho_bar[j] + (1.0 - opts_.kappa) * st_.lambda[j];
  for (int j = 0; j < n_; ++j)
    if (out.rho_bar[j] >= opts_.theta) out.active.push_back(j);
  out.eta_tilde = st_.eta_tilde;
  out.x_hat = st_.x_hat.rightCols(ld_);
  out.h_hat = st_.h_hat;
  out.v_h = st_.v_h;
  out.iterations = st_.iteration;
  return out;
}

JointResult JointEstimator::run(const JointPriors& priors) {
  init(priors);
  std::vector<IterationDiag> diag;
  while (st_.iteration < opts_.max_iters) {
    sweep();
    diag.push_back({st_.iteration, residual_, st_.rho_tilde.mean(), st_.floored});
    if (residual_ <= opts_.tol) break;
  }
  JointResult out = finish();
  out.diag = std::move(diag);
  return out;
}

JointResult joint_estimate(const MatrixXcd& y, const MatrixXcd& x_p, const VectorXd& beta,
                           const JointPriors& priors, const phy::Constellation& constel,
                           const EstimatorOptions& opts) {
  // Problem-scale normalization: the updates are equivariant under
  // (Y, H, beta, nv) -> (Y/c, H/c, beta/c^2, nv/c^2), so running at unit scale
  // keeps the divisor floor meaningful for realistic link budgets.
  double scale = beta.mean();
  if (!(scale > 0.0) || !std::isfinite(scale)) scale = 1.0;
  const double rs = std::sqrt(scale);

  EstimatorOptions sopts = opts;
  sopts.noise_var = opts.noise_var / scale;
  JointPriors spri = priors;
  spri.h_init = priors.h_init / rs;
  spri.v_h_init = priors.v_h_init / scale;

  const MatrixXcd y_scaled = y / rs;
  JointEstimator est(y_scaled, x_p, beta / scale, constel, sopts);
  JointResult out = est.run(spri);
  out.h_hat *= rs;
  out.v_h *= scale;
  return out;
}

}  // namespace mra::bigamp
