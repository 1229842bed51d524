// Ground-truth scenario generation and received-signal synthesis.
//
// Randomness is split into five sub-streams derived from the caller's
// generator, consumed in this order: placement, activity, channel, pilot,
// noise. Within a stream the draw order is documented next to each field so a
// realization can be reconstructed from its seeds.
#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "mra/config.hpp"
#include "mra/modem.hpp"
#include "mra/rng.hpp"

namespace mra::model {

// Path loss in dB at distance r (km): -128.1 - 36.7*log10(r).
double path_loss_db(double r_km);

// Total noise power in dBm for a density (dBm/Hz) over a bandwidth (Hz).
double noise_power_dbm(double density_dbm_hz, double bandwidth_hz);

struct ScenarioRealization {
  Eigen::VectorXi u;                              // activity indicators, exactly K ones
  std::vector<int> active;                        // sorted indices with u=1
  Eigen::VectorXd r_km;                           // user-BS distances
  Eigen::VectorXd beta;                           // large-scale gains (linear power)
  Eigen::MatrixXcd F;                             // M x N small*large scale channel
  Eigen::MatrixXcd H;                             // effective channel F * diag(u)
  std::vector<std::vector<std::uint8_t>> payloads;  // one row per active user
  Eigen::MatrixXcd X_p;                           // N x L pilots, CN(0,1) entries
  Eigen::MatrixXcd X_d;                           // N x L_d, zero rows when inactive
  Eigen::MatrixXcd Y;                             // M x T received signal / sqrt(gamma)

  // Sub-stream seeds, recorded for replay.
  std::uint64_t seed_placement = 0;
  std::uint64_t seed_activity = 0;
  std::uint64_t seed_channel = 0;
  std::uint64_t seed_pilot = 0;
  std::uint64_t seed_noise = 0;

  std::uint64_t content_hash() const;
};

// payloads must have exactly K rows of n_b bits. The received signal is
// synthesized unnormalized (sqrt(gamma) H X + noise of variance sigma^2) and
// then divided by sqrt(gamma).
ScenarioRealization draw_scenario(const SystemConfig& cfg, const phy::CodedModem& modem,
                                  const std::vector<std::vector<std::uint8_t>>& payloads,
                                  Rng& rng);

// Unit-variance complex Gaussian draws in column-major order (m inner).
Eigen::MatrixXcd draw_noise_unit(int rows, int cols, Rng& rng);

}  // namespace mra::model
