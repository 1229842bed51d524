#include "mra/metrics.hpp"

#include <algorithm>

namespace mra::harness {

TrialMetrics compute_metrics(const model::ScenarioRealization& truth,
                             const recv::ReceiverOutput& out) {
  TrialMetrics tm;
  auto in_set = [](const std::vector<int>& sorted, int v) {
    return std::binary_search(sorted.begin(), sorted.end(), v);
  };

  for (const int n : truth.active)
    if (!in_set(out.detected, n)) ++tm.missed_detection_count;
  for (const int n : out.detected)
    if (!truth.u[n]) ++tm.false_alarm_count;

  double err = 0.0, ref = 0.0;
  for (const int n : truth.active) {
    err += (out.h_hat.col(n) - truth.H.col(n)).squaredNorm();
    ref += truth.H.col(n).squaredNorm();
  }
  tm.nmse = ref > 0.0 ? err / ref : 0.0;

  for (std::size_t a = 0; a < truth.active.size(); ++a) {
    const int n = truth.active[a];
    const auto it = out.payloads.find(n);
    if (it == out.payloads.end() || it->second != truth.payloads[a]) ++tm.block_errors;
  }
  tm.iterations = out.iterations;
  return tm;
}

}  // namespace mra::harness
