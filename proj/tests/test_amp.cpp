#include <doctest.h>

#include "mra/amp.hpp"
#include "mra/rng.hpp"
#include "oracles.hpp"

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

}  // namespace

TEST_CASE("noiseless single active user reaches the least-squares solution") {
  Rng rng(31);
  const int m = 4, n = 4, l = 8;
  const VectorXd beta = VectorXd::Ones(n);
  const MatrixXcd x_p = gaussian_matrix(n, l, rng);
  MatrixXcd h = MatrixXcd::Zero(m, n);
  const int act = 2;
  for (int i = 0; i < m; ++i) h(i, act) = rng.cgauss(beta[act]);
  const MatrixXcd y = h * x_p;
  VectorXd lambda = VectorXd::Zero(n);
  lambda[act] = 1.0;

  const auto res = amp::amp_jadce(y, x_p, lambda, beta, 0.0, {300, 1e-12, 1.0});
  // Independent pseudo-inverse oracle on the active row.
  const auto xr = x_p.row(act);
  const MatrixXcd h_ls = y * xr.adjoint() / xr.squaredNorm();
  CHECK((res.h_hat.col(act) - h_ls).squaredNorm() / h_ls.squaredNorm() < 1e-6);
  CHECK((res.h_hat.col(act) - h.col(act)).squaredNorm() / h.col(act).squaredNorm() < 1e-6);
  CHECK(res.rho_bar[act] > 0.99);
}

TEST_CASE("zero observation drives the sparsity levels to zero") {
  Rng rng(32);
  const int m = 4, n = 6, l = 8;
  const VectorXd beta = VectorXd::Ones(n);
  const MatrixXcd x_p = gaussian_matrix(n, l, rng);
  const MatrixXcd y = MatrixXcd::Zero(m, l);
  const VectorXd lambda = VectorXd::Constant(n, 0.3);
  const auto res = amp::amp_jadce(y, x_p, lambda, beta, 1e-3, {100, 1e-10, 1.0});
  for (int j = 0; j < n; ++j) CHECK(res.rho_bar[j] < 1e-3);
  CHECK(res.h_hat.norm() == 0.0);
}

TEST_CASE("all-active users with orthogonal pilots recover the channel") {
  Rng rng(33);
  const int m = 6, n = 6, l = 12;
  const VectorXd beta = VectorXd::Ones(n);
  // Orthogonalize Gaussian rows, keep unit average symbol power.
  MatrixXcd g = gaussian_matrix(n, l, rng);
  Eigen::HouseholderQR<MatrixXcd> qr(g.transpose());
  MatrixXcd q = qr.householderQ() * MatrixXcd::Identity(l, n);
  MatrixXcd x_p = std::sqrt(double(l)) * q.transpose();
  MatrixXcd h = gaussian_matrix(m, n, rng);
  const MatrixXcd y = h * x_p;
  const auto res =
      amp::amp_jadce(y, x_p, VectorXd::Ones(n), beta, 1e-9, {300, 1e-12, 1.0});
  CHECK((res.h_hat - h).squaredNorm() / h.squaredNorm() < 1e-4);
}

TEST_CASE("detect_active threshold rule") {
  VectorXd rho(2);
  rho << 0.9, 0.3;
  CHECK(amp::detect_active(rho, 0.4) == std::vector<int>{0});
  CHECK(amp::detect_active(VectorXd::Zero(3), 0.4).empty());
  rho << 0.4, 0.39999;
  CHECK(amp::detect_active(rho, 0.4) == std::vector<int>{0});  // boundary included
}

TEST_CASE("scalar problem: one-step posterior matches numerical integration") {
  Rng rng(34);
  for (int rep = 0; rep < 20; ++rep) {
    const double beta = 0.4 + rng.uniform();
    const double lambda = 0.2 + 0.6 * rng.uniform();
    const double nv = 0.05 + 0.5 * rng.uniform();
    const cd x = rng.cgauss(1.0);
    const cd y = rng.cgauss(1.0);
    MatrixXcd y_m(1, 1), x_m(1, 1);
    y_m << y;
    x_m << x;
    VectorXd b(1), lam(1);
    b << beta;
    lam << lambda;
    const auto res = amp::amp_jadce(y_m, x_m, lam, b, nv, {1, 1e-30, 1.0});
    // After one iteration the effective Gaussian likelihood parameters are
    // known in closed form from the initialization.
    const cd p = std::conj(x) * y / std::norm(x);
    const double q = (nv + std::norm(x) * lambda * beta) / std::norm(x);
    const auto want = oracles::spike_slab_moments(p, q, beta, lambda);
    CHECK(res.rho_tilde(0, 0) == doctest::Approx(want.rho_tilde).epsilon(1e-8));
    CHECK(std::abs(res.h_hat(0, 0) - want.mean) <= 1e-8);
    CHECK(std::abs(res.v_h(0, 0) - want.var) <= 1e-8);
  }
}

TEST_CASE("identical inputs give identical outputs") {
  Rng rng(35);
  const int m = 3, n = 5, l = 6;
  const VectorXd beta = VectorXd::Constant(n, 0.8);
  const MatrixXcd x_p = gaussian_matrix(n, l, rng);
  const MatrixXcd y = gaussian_matrix(m, l, rng);
  const VectorXd lambda = VectorXd::Constant(n, 0.4);
  const auto a = amp::amp_jadce(y, x_p, lambda, beta, 0.1, {50, 1e-8, 0.6});
  const auto b = amp::amp_jadce(y, x_p, lambda, beta, 0.1, {50, 1e-8, 0.6});
  CHECK(a.h_hat == b.h_hat);
  CHECK(a.v_h == b.v_h);
  CHECK(a.rho_bar == b.rho_bar);
  CHECK(a.iterations == b.iterations);
}
