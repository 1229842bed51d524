// Monte Carlo experiment engine: sweeps one scenario parameter, runs every
// scheme on shared channel realizations (common random numbers), aggregates
// the error metrics with 95% confidence half-widths, and emits CSV plus a
// run-metadata file.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mra/config.hpp"
#include "mra/metrics.hpp"

namespace mra::harness {

enum class Scheme { turbo, si, separate, data_assisted, known_activity };

std::string scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

struct ExperimentSpec {
  SystemConfig base;
  std::string sweep_key;             // K, M, L, T, theta, tx_power_dbm; empty = none
  std::vector<double> sweep_values;  // ignored when sweep_key is empty
  std::vector<Scheme> schemes = {Scheme::turbo, Scheme::si, Scheme::separate,
                                 Scheme::data_assisted, Scheme::known_activity};
  int n_blocks = 100;
  std::uint64_t seed = 1;
  std::string out_path;  // empty: no files written
  int threads = 0;       // 0 = hardware concurrency
  // Wall-clock measurement; off makes the CSV byte-reproducible (the
  // time_ratio column then reads nan).
  bool measure_time = true;
};

// Applies one sweep assignment; re-derives the code dimensions when the
// frame geometry changes.
SystemConfig apply_sweep(const SystemConfig& base, const std::string& key, double value);

// Scheme dispatch: the separate design is the SI receiver at Q3=1, the
// data-assisted design is the turbo receiver at Q1=1, and known-activity
// forces the true set.
recv::ReceiverOutput run_scheme(Scheme scheme, const SystemConfig& cfg,
                                const model::ScenarioRealization& sc,
                                const phy::CodedModem& modem);

struct AggregateRow {
  double sweep_value = 0.0;
  Scheme scheme = Scheme::turbo;
  double p_md = 0.0, p_fa = 0.0, p_sum = 0.0;
  double nmse = 0.0;  // linear mean over blocks
  double bler = 0.0;
  double mean_iters = 0.0;
  double time_ratio = 0.0;
  double ci_p_md = 0.0, ci_p_fa = 0.0, ci_p_sum = 0.0, ci_nmse = 0.0, ci_bler = 0.0;
};

struct SweepPointResult {
  double sweep_value = 0.0;
  SystemConfig cfg;
  // blocks[scheme_index][block_index]
  std::vector<std::vector<TrialMetrics>> blocks;
};

struct ExperimentResult {
  std::vector<SweepPointResult> points;
  std::vector<AggregateRow> rows;
  std::uint64_t parity_hash = 0;
};

ExperimentResult run_experiment(const ExperimentSpec& spec);

struct RuntimeRow {
  double sweep_value = 0.0;
  Scheme scheme = Scheme::separate;
  double mean_seconds = 0.0;
  double ratio_to_separate = 0.0;  // 1.0 for the separate design by definition
};

// Wall-clock per scheme averaged over blocks, normalized by the separate
// design (which must be among the schemes). Forces timing on.
std::vector<RuntimeRow> measure_runtime(const ExperimentSpec& spec);

std::string to_csv(const ExperimentResult& result);
// Writes spec.out_path and spec.out_path + ".meta".
void write_outputs(const ExperimentSpec& spec, const ExperimentResult& result);

// Sample mean and 95% confidence half-width (1.96 * sd / sqrt(n)).
double mean_of(const std::vector<double>& xs);
double ci_half_width(const std::vector<double>& xs);

}  // namespace mra::harness
