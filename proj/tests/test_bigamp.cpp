#include <doctest.h>

#include "mra/amp.hpp"
#include "mra/bigamp.hpp"
#include "mra/denoisers.hpp"
#include "mra/rng.hpp"

using namespace mra;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXcd gaussian_matrix(int rows, int cols, Rng& rng, double var = 1.0) {
  MatrixXcd m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = rng.cgauss(var);
  return m;
}

bigamp::JointPriors cold_priors(int m, int n, const VectorXd& beta, const VectorXd& lambda) {
  bigamp::JointPriors pri;
  pri.h_init = MatrixXcd::Zero(m, n);
  pri.v_h_init.resize(m, n);
  for (int j = 0; j < n; ++j) pri.v_h_init.col(j).setConstant(lambda[j] * beta[j]);
  pri.rho_bar = lambda;
  pri.lambda = lambda;
  return pri;
}

}  // namespace

TEST_CASE("linear-mixing block: crafted single-coefficient instance") {
  // One antenna, one user, one pilot and one data column. The crafted state
  // gives M^p = 0 and V^p = 1 on both columns.
  const auto constel = phy::Constellation::qpsk();
  MatrixXcd y(1, 2);
  y << cd(1.0, 0.0), cd(1.0, 0.0);
  MatrixXcd x_p(1, 1);
  x_p << cd(1.0, 0.0);
  VectorXd beta = VectorXd::Ones(1);

  bigamp::EstimatorOptions opts;
  opts.noise_var = 1.0;
  opts.omega = 1.0;
  bigamp::JointEstimator est(y, x_p, beta, constel, opts);
  bigamp::JointPriors pri = cold_priors(1, 1, beta, VectorXd::Constant(1, 0.5));
  pri.v_h_init.setConstant(1.0);  // pilot column: |x|^2 V^h = 1
  est.init(pri);
  est.state().v_x(0, 1) = 1.0;  // data column: |h|^2 V^x = 0, V^h V^x = 1
  est.resync_product();
  est.sweep();

  const auto& st = est.state();
  for (int t = 0; t < 2; ++t) {
    CHECK(st.m_p(0, t) == cd(0.0, 0.0));
    CHECK(st.v_p(0, t) == doctest::Approx(1.0));
    CHECK(st.z_hat(0, t) == cd(0.5, 0.0));
    CHECK(st.v_z(0, t) == doctest::Approx(0.5));
    CHECK(st.s_hat(0, t) == cd(0.5, 0.0));
    CHECK(st.v_s(0, t) == doctest::Approx(0.5));
  }
}

TEST_CASE("linear-mixing block: zero observation and noiseless limits") {
  const auto z0 = bigamp::z_posterior(cd(0, 0), cd(0, 0), 1.0, 1.0);
  CHECK(z0.mean == cd(0.0, 0.0));
  const auto zn = bigamp::z_posterior(cd(0.3, -0.7), cd(5, 5), 2.0, 0.0);
  CHECK(zn.mean == cd(0.3, -0.7));
  CHECK(zn.var == 0.0);
}

TEST_CASE("soft symbol block: uninformative channel keeps the prior") {
  const auto constel = phy::Constellation::qpsk();
  MatrixXcd y(1, 2);
  y << cd(0.2, 0.1), cd(0.4, -0.3);
  MatrixXcd x_p(1, 1);
  x_p << cd(1.0, 0.0);
  VectorXd beta = VectorXd::Ones(1);
  bigamp::EstimatorOptions opts;
  opts.noise_var = 0.5;
  opts.omega = 1.0;

  SUBCASE("uniform prior, huge Q^x: posterior stays uniform, x_hat = 0") {
    bigamp::JointEstimator est(y, x_p, beta, constel, opts);
    auto pri = cold_priors(1, 1, beta, VectorXd::Constant(1, 0.5));
    pri.rho_bar = VectorXd::Constant(1, 0.8);
    est.init(pri);  // h_hat = 0 makes q_x hit the divisor floor
    est.sweep();
    const auto& st = est.state();
    for (int s = 0; s < 4; ++s) CHECK(st.eta_tilde(0, s) == doctest::Approx(0.25));
    CHECK(std::abs(st.x_hat(0, 1)) <= 1e-9);
  }

  SUBCASE("point-mass prior dominates any likelihood") {
    bigamp::JointEstimator est(y, x_p, beta, constel, opts);
    auto pri = cold_priors(1, 1, beta, VectorXd::Constant(1, 0.9));
    pri.rho_bar = VectorXd::Constant(1, 0.7);
    pri.eta.resize(1, 4);
    pri.eta << 1.0, 0.0, 0.0, 0.0;
    est.init(pri);
    est.state().h_hat(0, 0) = cd(1.0, 0.0);
    est.resync_product();
    est.sweep();
    const auto& st = est.state();
    CHECK(st.eta_tilde(0, 0) == doctest::Approx(1.0));
    CHECK(st.x_hat(0, 1) == 0.7 * constel.points()[0]);
    CHECK(st.v_x(0, 1) == doctest::Approx(0.0));
  }
}

TEST_CASE("soft symbol block: crafted likelihood at a constellation point") {
  // Crafted so that P^x = y_d and Q^x = 1 after one sweep.
  const auto constel = phy::Constellation::qpsk();
  const cd s0 = constel.points()[0];
  MatrixXcd y(1, 2);
  y << cd(0.9, 0.4), s0;
  MatrixXcd x_p(1, 1);
  x_p << cd(1.0, 0.0);
  VectorXd beta = VectorXd::Ones(1);
  bigamp::EstimatorOptions opts;
  opts.noise_var = 0.5;
  opts.omega = 1.0;
  bigamp::JointEstimator est(y, x_p, beta, constel, opts);
  auto pri = cold_priors(1, 1, beta, VectorXd::Constant(1, 0.9));
  pri.rho_bar = VectorXd::Ones(1);
  est.init(pri);
  est.state().h_hat(0, 0) = cd(1.0, 0.0);
  est.state().v_h.setZero();
  est.state().v_x(0, 1) = 0.5;
  est.resync_product();
  est.sweep();

  double denom = 0.0;
  for (int s = 0; s < 4; ++s) denom += std::exp(-std::norm(constel.points()[s] - s0));
  cd want_mean(0, 0);
  for (int s = 0; s < 4; ++s) {
    const double w = std::exp(-std::norm(constel.points()[s] - s0)) / denom;
    CHECK(est.state().eta_tilde(0, s) == doctest::Approx(w).epsilon(1e-9));
    want_mean += w * constel.points()[s];
  }
  CHECK(std::abs(est.state().x_hat(0, 1) - want_mean) <= 1e-9);
}

TEST_CASE("posterior symbol probabilities stay normalized every iteration") {
  Rng rng(41);
  const int m = 4, n = 6, l = 6, ld = 8;
  VectorXd beta(n);
  for (int j = 0; j < n; ++j) beta[j] = 0.3 + rng.uniform();
  const auto constel = phy::Constellation::qpsk();
  const MatrixXcd x_p = gaussian_matrix(n, l, rng);
  const MatrixXcd y = gaussian_matrix(m, l + ld, rng, 2.0);
  bigamp::EstimatorOptions opts;
  opts.noise_var = 0.2;
  bigamp::JointEstimator est(y, x_p, beta, constel, opts);
  est.init(cold_priors(m, n, beta, VectorXd::Constant(n, 0.3)));
  for (int it = 0; it < 15; ++it) {
    est.sweep();
    const auto& st = est.state();
    CHECK(st.x_hat.leftCols(l) == x_p);  // pilot block stays pinned
    CHECK(st.v_x.leftCols(l).isZero(0.0));
    for (Eigen::Index r = 0; r < st.eta_tilde.rows(); ++r)
      CHECK(std::abs(st.eta_tilde.row(r).sum() - 1.0) <= 1e-9);
    // Posterior variance contraction on the linear-mixing block.
    for (int t = 0; t < l + ld; ++t)
      for (int i = 0; i < m; ++i) {
        CHECK(st.v_z(i, t) <= st.v_p(i, t) * (1 + 1e-12));
        CHECK(st.v_z(i, t) <= opts.noise_var * (1 + 1e-12));
      }
  }
}

TEST_CASE("omega = 1 commits the raw denoiser output") {
  Rng rng(42);
  const int m = 3, n = 4, l = 5, ld = 6;
  VectorXd beta = VectorXd::Constant(n, 0.9);
  const auto constel = phy::Constellation::qpsk();
  const MatrixXcd x_p = gaussian_matrix(n, l, rng);
  const MatrixXcd y = gaussian_matrix(m, l + ld, rng);

  for (const double omega : {1.0, 0.6}) {
    bigamp::EstimatorOptions opts;
    opts.noise_var = 0.3;
    opts.omega = omega;
    bigamp::JointEstimator est(y, x_p, beta, constel, opts);
    est.init(cold_priors(m, n, beta, VectorXd::Constant(n, 0.4)));
    est.sweep();
    const MatrixXcd h_before = est.state().h_hat;
    est.sweep();
    const auto& st = est.state();
    // Recompute the denoiser output from the stored likelihood parameters.
    MatrixXcd h_raw(m, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < m; ++i)
        h_raw(i, j) = bigamp::spike_slab_posterior(st.p_h(i, j), st.q_h(i, j), beta[j],
                                                   st.l_llr(i, j))
                          .mean;
    const MatrixXcd expect = omega * h_raw + (1.0 - omega) * h_before;
    CHECK((st.h_hat - expect).norm() <= 1e-12 * (1.0 + expect.norm()));
  }
}

TEST_CASE("noiseless pinned-data instance matches least squares") {
  Rng rng(43);
  const int m = 4, n = 2, l = 6, ld = 10;
  VectorXd beta = VectorXd::Ones(n);
  const auto constel = phy::Constellation::qpsk();
  const MatrixXcd x_p = gaussian_matrix(n, l, rng);
  MatrixXcd x_d = MatrixXcd::Zero(n, ld);
  for (int t = 0; t < ld; ++t) x_d(0, t) = constel.points()[rng.uniform_int(0, 3)];
  MatrixXcd h = MatrixXcd::Zero(m, n);
  for (int i = 0; i < m; ++i) h(i, 0) = rng.cgauss(1.0);
  MatrixXcd x(n, l + ld);
  x.leftCols(l) = x_p;
  x.rightCols(ld) = x_d;
  const MatrixXcd y = h * x;

  bigamp::EstimatorOptions opts;
  opts.noise_var = 0.0;
  opts.max_iters = 300;
  opts.tol = 1e-14;
  opts.pinned_data = &x_d;
  VectorXd lambda(n);
  lambda << 1.0, 0.0;
  const auto res =
      bigamp::joint_estimate(y, x_p, beta, cold_priors(m, n, beta, lambda), constel, opts);

  const auto xr = x.row(0);
  const MatrixXcd h_ls = y * xr.adjoint() / xr.squaredNorm();
  CHECK((res.h_hat.col(0) - h_ls).squaredNorm() / h_ls.squaredNorm() < 1e-6);
  CHECK(res.rho_bar[0] > 0.99);
  CHECK(res.rho_bar[1] < 0.01);
  CHECK(res.active == std::vector<int>{0});
}

TEST_CASE("ground-truth priors are an approximate fixed point of one sweep") {
  Rng rng(44);
  const int m = 8, n = 16, k = 3, l = 16, ld = 12;
  const auto constel = phy::Constellation::qpsk();
  VectorXd beta(n);
  for (int j = 0; j < n; ++j) beta[j] = 0.5 + 1.5 * rng.uniform();
  const auto active = rng.sample_subset(n, k);
  VectorXd u = VectorXd::Zero(n);
  for (const int a : active) u[a] = 1.0;

  MatrixXcd h = MatrixXcd::Zero(m, n);
  for (const int a : active)
    for (int i = 0; i < m; ++i) h(i, a) = rng.cgauss(beta[a]);
  const MatrixXcd x_p = gaussian_matrix(n, l, rng);
  MatrixXcd x_d = MatrixXcd::Zero(n, ld);
  for (const int a : active)
    for (int t = 0; t < ld; ++t) x_d(a, t) = constel.points()[rng.uniform_int(0, 3)];
  MatrixXcd x(n, l + ld);
  x.leftCols(l) = x_p;
  x.rightCols(ld) = x_d;
  const MatrixXcd y = h * x;

  bigamp::JointPriors pri;
  pri.h_init = h;
  pri.v_h_init = MatrixXd::Zero(m, n);
  pri.rho_bar = u;
  pri.lambda = u;
  pri.eta.resize(static_cast<Eigen::Index>(n) * ld, 4);
  pri.eta.setConstant(0.25);
  for (const int a : active)
    for (int t = 0; t < ld; ++t) {
      int idx = 0;
      for (int s = 0; s < 4; ++s)
        if (constel.points()[s] == x_d(a, t)) idx = s;
      pri.eta.row(static_cast<Eigen::Index>(a) * ld + t).setZero();
      pri.eta(static_cast<Eigen::Index>(a) * ld + t, idx) = 1.0;
    }

  bigamp::EstimatorOptions opts;
  opts.noise_var = 0.0;
  bigamp::JointEstimator est(y, x_p, beta, constel, opts);
  est.init(pri);
  est.state().x_hat.rightCols(ld) = x_d;
  est.state().v_x.rightCols(ld).setZero();
  est.resync_product();
  est.sweep();
  const double dh = (est.state().h_hat - h).norm() / h.norm();
  const double dx = (est.state().x_hat.rightCols(ld) - x_d).norm() / x_d.norm();
  CHECK(dh < 1e-6);
  CHECK(dx < 1e-6);
}

TEST_CASE("lambda update is the stated convex combination") {
  Rng rng(45);
  const int m = 4, n = 3, l = 5, ld = 6;
  VectorXd beta = VectorXd::Constant(n, 1.2);
  const auto constel = phy::Constellation::qpsk();
  const MatrixXcd x_p = gaussian_matrix(n, l, rng);
  const MatrixXcd y = gaussian_matrix(m, l + ld, rng);
  bigamp::EstimatorOptions opts;
  opts.noise_var = 0.4;
  opts.kappa = 0.5;
  opts.max_iters = 5;
  VectorXd lambda = VectorXd::Constant(n, 0.5);
  const auto res =
      bigamp::joint_estimate(y, x_p, beta, cold_priors(m, n, beta, lambda), constel, opts);
  for (int j = 0; j < n; ++j)
    CHECK(res.lambda_next[j] ==
          doctest::Approx(0.5 * res.rho_bar[j] + 0.5 * lambda[j]).epsilon(1e-12));
  // Line-28 arithmetic at the boundary values.
  CHECK(0.5 * 1.0 + (1 - 0.5) * 0.5 == doctest::Approx(0.75));
}

TEST_CASE("pinned joint estimator equals pilot-only AMP on the concatenated frame") {
  Rng rng(46);
  const int m = 4, n = 5, l = 6, ld = 7;
  const auto constel = phy::Constellation::qpsk();
  VectorXd beta(n);
  for (int j = 0; j < n; ++j) beta[j] = 0.4 + rng.uniform();
  const MatrixXcd x_p = gaussian_matrix(n, l, rng);
  MatrixXcd x_d(n, ld);
  for (int j = 0; j < n; ++j)
    for (int t = 0; t < ld; ++t) x_d(j, t) = constel.points()[rng.uniform_int(0, 3)];
  const MatrixXcd y = gaussian_matrix(m, l + ld, rng, 1.5);
  const VectorXd lambda = VectorXd::Constant(n, 0.35);
  const double nv = 0.25;
  const int iters = 12;

  MatrixXcd x_cat(n, l + ld);
  x_cat.leftCols(l) = x_p;
  x_cat.rightCols(ld) = x_d;
  const auto ref = amp::amp_jadce(y, x_cat, lambda, beta, nv, {iters, 0.0, 0.6});

  bigamp::EstimatorOptions opts;
  opts.noise_var = nv;
  opts.omega = 0.6;
  opts.max_iters = iters;
  opts.tol = 0.0;
  opts.pinned_data = &x_d;
  const auto got =
      bigamp::joint_estimate(y, x_p, beta, cold_priors(m, n, beta, lambda), constel, opts);

  CHECK(got.iterations == ref.iterations);
  CHECK((got.h_hat - ref.h_hat).norm() <= 1e-10 * (1.0 + ref.h_hat.norm()));
  CHECK((got.v_h - ref.v_h).norm() <= 1e-10 * (1.0 + ref.v_h.norm()));
  CHECK((got.rho_bar - ref.rho_bar).norm() <= 1e-10);
}
