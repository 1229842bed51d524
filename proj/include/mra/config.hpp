// Scenario and algorithm constants shared by the transmitter model and both receivers.
#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "mra/common.hpp"

namespace mra {

struct SystemConfig {
  // Dimensions.
  int n_users = 200;      // N
  int n_antennas = 64;    // M
  int n_active = 20;      // K
  int pilot_len = 50;     // L
  int frame_len = 200;    // T

  // Link budget.
  double tx_power_dbm = 23.0;
  double noise_density_dbm_hz = -169.0;
  double bandwidth_hz = 1e6;
  double cell_radius_km = 0.5;
  // The model places users no closer than this to the BS; keeps the path-loss
  // gain bounded. Tunable because it is a simulator choice, not a standard value.
  double min_distance_km = 0.05;

  // Coding and modulation.
  int payload_bits = 142;  // N_b
  int block_bits = 150;    // N_d = N_b + 8 (CRC-8)
  int coded_bits = 300;    // N_c = L_d * log2(modem_order)
  int modem_order = 4;
  int max_bp_iters = 50;

  // Receiver hyper-parameters.
  double theta = 0.4;
  double eps1 = 1e-5;
  double eps2 = 1e-5;
  double eps3 = 1e-5;
  int q1 = 6;
  int q2 = 100;
  int q3 = 6;
  double damping = 0.6;  // omega
  double kappa = 0.5;
  double kappa1 = 0.5;
  double kappa2 = 0.5;

  std::uint64_t rng_seed = 1;

  // Activity pattern: uniform K-subset by default; the first K users when set.
  bool first_k_active = false;
  // Scales the soft-symbol posterior mean/variance by the previous average
  // sparsity level; off is an ablation switch.
  bool rho_bar_symbol_scaling = true;

  int data_len() const { return frame_len - pilot_len; }
  int bits_per_symbol() const;
  double tx_power_lin() const { return db_to_pow(tx_power_dbm); }
  double noise_power_lin() const;
  // Per-entry variance of the normalized noise, sigma^2 / gamma.
  double noise_var_normalized() const { return noise_power_lin() / tx_power_lin(); }

  // Fills payload/block/coded bit counts from frame geometry and modem order,
  // assuming the rate-1/2 code family and CRC-8.
  void derive_code_dims();
  // Throws config_error listing every violated invariant.
  void validate() const;

  static SystemConfig table_defaults() { return SystemConfig{}; }

  // key=value text format; '#' starts a comment. Unknown keys are rejected.
  static SystemConfig from_file(const std::string& path);
  void apply_key_value(const std::string& key, const std::string& value);
  std::map<std::string, std::string> to_key_values() const;
};

}  // namespace mra
