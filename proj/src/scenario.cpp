#include "mra/scenario.hpp"

#include <cmath>
#include <stdexcept>

namespace mra::model {

double path_loss_db(double r_km) {
  if (!(r_km > 0.0)) throw std::domain_error("path_loss_db requires a positive distance");
  return -128.1 - 36.7 * std::log10(r_km);
}

double noise_power_dbm(double density_dbm_hz, double bandwidth_hz) {
  if (!(bandwidth_hz > 0.0)) throw std::domain_error("noise_power_dbm requires a positive bandwidth");
  return density_dbm_hz + 10.0 * std::log10(bandwidth_hz);
}

Eigen::MatrixXcd draw_noise_unit(int rows, int cols, Rng& rng) {
  Eigen::MatrixXcd n(rows, cols);
  for (int t = 0; t < cols; ++t)
    for (int m = 0; m < rows; ++m) n(m, t) = rng.cgauss(1.0);
  return n;
}

std::uint64_t ScenarioRealization::content_hash() const {
  std::uint64_t h = fnv1a(H.data(), sizeof(cd) * H.size());
  h = fnv1a(Y.data(), sizeof(cd) * Y.size(), h);
  h = fnv1a(X_p.data(), sizeof(cd) * X_p.size(), h);
  return h;
}

ScenarioRealization draw_scenario(const SystemConfig& cfg, const phy::CodedModem& modem,
                                  const std::vector<std::vector<std::uint8_t>>& payloads,
                                  Rng& rng) {
  cfg.validate();
  const int n = cfg.n_users;
  const int m = cfg.n_antennas;
  const int k = cfg.n_active;
  const int l = cfg.pilot_len;
  const int ld = cfg.data_len();
  if (static_cast<int>(payloads.size()) != k)
    throw std::invalid_argument("draw_scenario expects one payload row per active user");
  for (const auto& p : payloads)
    if (static_cast<int>(p.size()) != cfg.payload_bits)
      throw std::invalid_argument("payload row length does not match payload_bits");

  ScenarioRealization sc;
  sc.seed_placement = rng.next_u64();
  sc.seed_activity = rng.next_u64();
  sc.seed_channel = rng.next_u64();
  sc.seed_pilot = rng.next_u64();
  sc.seed_noise = rng.next_u64();

  // Placement: one uniform draw per user, area-uniform in the annulus
  // [min_distance_km, cell_radius_km].
  {
    Rng r(sc.seed_placement);
    sc.r_km.resize(n);
    sc.beta.resize(n);
    const double r0sq = cfg.min_distance_km * cfg.min_distance_km;
    const double r1sq = cfg.cell_radius_km * cfg.cell_radius_km;
    for (int i = 0; i < n; ++i) {
      sc.r_km[i] = std::sqrt(r0sq + r.uniform() * (r1sq - r0sq));
      sc.beta[i] = db_to_pow(path_loss_db(sc.r_km[i]));
    }
  }

  // Activity: uniform K-subset, or the first K users when configured.
  {
    Rng r(sc.seed_activity);
    sc.u = Eigen::VectorXi::Zero(n);
    if (cfg.first_k_active) {
      sc.active.resize(k);
      for (int i = 0; i < k; ++i) sc.active[i] = i;
    } else {
      sc.active = r.sample_subset(n, k);
    }
    for (const int i : sc.active) sc.u[i] = 1;
  }

  // Channel: per user n, per antenna m, alpha ~ CN(0,1).
  {
    Rng r(sc.seed_channel);
    sc.F.resize(m, n);
    for (int j = 0; j < n; ++j) {
      const double s = std::sqrt(sc.beta[j]);
      for (int i = 0; i < m; ++i) sc.F(i, j) = s * r.cgauss(1.0);
    }
    sc.H = sc.F;
    for (int j = 0; j < n; ++j)
      if (!sc.u[j]) sc.H.col(j).setZero();
  }

  // Pilots: per user n, per symbol l, CN(0,1).
  {
    Rng r(sc.seed_pilot);
    sc.X_p.resize(n, l);
    for (int j = 0; j < n; ++j)
      for (int t = 0; t < l; ++t) sc.X_p(j, t) = r.cgauss(1.0);
  }

  // Data symbols for active users; inactive rows stay zero.
  sc.payloads = payloads;
  sc.X_d = Eigen::MatrixXcd::Zero(n, ld);
  for (int a = 0; a < k; ++a) {
    const auto symbols = modem.transmit_symbols(payloads[a]);
    if (static_cast<int>(symbols.size()) != ld)
      throw config_error("coded symbol count does not match the data segment length");
    for (int t = 0; t < ld; ++t) sc.X_d(sc.active[a], t) = symbols[t];
  }

  // Synthesis: Ytilde = sqrt(gamma) H X + Ntilde, then normalize by sqrt(gamma).
  {
    Rng r(sc.seed_noise);
    const double gamma = cfg.tx_power_lin();
    const double sigma2 = cfg.noise_power_lin();
    Eigen::MatrixXcd x(n, l + ld);
    x.leftCols(l) = sc.X_p;
    x.rightCols(ld) = sc.X_d;
    Eigen::MatrixXcd y_tilde = std::sqrt(gamma) * (sc.H * x);
    if (sigma2 > 0.0) y_tilde += std::sqrt(sigma2) * draw_noise_unit(m, l + ld, r);
    sc.Y = y_tilde / std::sqrt(gamma);
  }
  return sc;
}

}  // namespace mra::model
