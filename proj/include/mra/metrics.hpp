// Per-block error metrics: detection errors, channel NMSE over the true
// active users, and block errors (a missed active user counts as a block
// error, since its payload is not delivered).
#pragma once

#include <cstdint>

#include "mra/receivers.hpp"
#include "mra/scenario.hpp"

namespace mra::harness {

struct TrialMetrics {
  int missed_detection_count = 0;  // |Xi \ XiHat|, bounded by K
  int false_alarm_count = 0;       // |XiHat \ Xi|, bounded by N-K
  double nmse = 0.0;
  int block_errors = 0;
  double wall_time_s = 0.0;
  int iterations = 0;
  std::uint64_t realization_hash = 0;
};

TrialMetrics compute_metrics(const model::ScenarioRealization& truth,
                             const recv::ReceiverOutput& out);

}  // namespace mra::harness
