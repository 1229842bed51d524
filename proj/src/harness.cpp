#include "mra/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "mra/receivers.hpp"
#include "mra/rng.hpp"
#include "mra/version.hpp"

namespace mra::harness {

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::turbo: return "turbo";
    case Scheme::si: return "si";
    case Scheme::separate: return "separate";
    case Scheme::data_assisted: return "data-assisted";
    case Scheme::known_activity: return "known-activity";
  }
  return "?";
}

Scheme scheme_from_name(const std::string& name) {
  if (name == "turbo") return Scheme::turbo;
  if (name == "si") return Scheme::si;
  if (name == "separate") return Scheme::separate;
  if (name == "data-assisted" || name == "data_assisted") return Scheme::data_assisted;
  if (name == "known-activity" || name == "known_activity") return Scheme::known_activity;
  throw config_error("unknown scheme '" + name + "'");
}

SystemConfig apply_sweep(const SystemConfig& base, const std::string& key, double value) {
  SystemConfig cfg = base;
  if (key.empty() || key == "none") return cfg;
  if (key == "K") cfg.n_active = static_cast<int>(std::lround(value));
  else if (key == "M") cfg.n_antennas = static_cast<int>(std::lround(value));
  else if (key == "L") {
    cfg.pilot_len = static_cast<int>(std::lround(value));
    cfg.derive_code_dims();
  } else if (key == "T") {
    cfg.frame_len = static_cast<int>(std::lround(value));
    cfg.derive_code_dims();
  } else if (key == "theta") cfg.theta = value;
  else if (key == "tx_power_dbm") cfg.tx_power_dbm = value;
  else throw config_error("unsupported sweep key '" + key + "'");
  return cfg;
}

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (const double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double ci_half_width(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  if (n < 2) return 0.0;
  const double m = mean_of(xs);
  double ss = 0.0;
  for (const double x : xs) ss += (x - m) * (x - m);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  return 1.96 * sd / std::sqrt(static_cast<double>(n));
}

recv::ReceiverOutput run_scheme(Scheme scheme, const SystemConfig& cfg,
                                const model::ScenarioRealization& sc,
                                const phy::CodedModem& modem) {
  SystemConfig c = cfg;
  recv::ReceiverOptions opts;
  switch (scheme) {
    case Scheme::turbo:
      return recv::turbo_receive(sc.Y, sc.X_p, sc.beta, c, modem);
    case Scheme::si:
      return recv::si_receive(sc.Y, sc.X_p, sc.beta, c, modem);
    case Scheme::separate:
      c.q3 = 1;
      return recv::si_receive(sc.Y, sc.X_p, sc.beta, c, modem);
    case Scheme::data_assisted:
      c.q1 = 1;
      return recv::turbo_receive(sc.Y, sc.X_p, sc.beta, c, modem);
    case Scheme::known_activity:
      opts.forced_activity = &sc.active;
      return recv::turbo_receive(sc.Y, sc.X_p, sc.beta, c, modem, opts);
  }
  throw config_error("unhandled scheme");
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  if (spec.n_blocks < 1) throw config_error("n_blocks must be >= 1");
  if (spec.schemes.empty()) throw config_error("at least one scheme is required");

  const std::string key = spec.sweep_key.empty() ? "none" : spec.sweep_key;
  std::vector<double> values = spec.sweep_values;
  if (key == "none") values = {0.0};
  if (values.empty()) throw config_error("sweep_values must not be empty");

  int n_threads = spec.threads > 0 ? spec.threads
                                   : static_cast<int>(std::thread::hardware_concurrency());
  if (n_threads < 1) n_threads = 1;
  n_threads = std::min<int>(n_threads, spec.n_blocks);

  ExperimentResult result;
  for (std::size_t pi = 0; pi < values.size(); ++pi) {
    SweepPointResult point;
    point.sweep_value = values[pi];
    point.cfg = apply_sweep(spec.base, key, values[pi]);
    point.cfg.validate();
    const phy::CodedModem modem(point.cfg);
    if (pi == 0) result.parity_hash = modem.code().hash();

    point.blocks.assign(spec.schemes.size(), std::vector<TrialMetrics>(spec.n_blocks));
    std::atomic<int> next{0};
    std::mutex err_mutex;
    std::exception_ptr error;

    auto worker = [&]() {
      try {
        for (;;) {
          const int b = next.fetch_add(1);
          if (b >= spec.n_blocks) return;
          Rng rng(mix_seed(spec.seed, pi, static_cast<std::uint64_t>(b)));
          // Per-block draw order: payload bits (active users in order), then
          // the scenario sub-streams.
          std::vector<std::vector<std::uint8_t>> payloads(point.cfg.n_active);
          for (auto& row : payloads) {
            row.resize(point.cfg.payload_bits);
            for (auto& bit : row) bit = rng.bit();
          }
          const auto sc = model::draw_scenario(point.cfg, modem, payloads, rng);
          const std::uint64_t hash = sc.content_hash();
          for (std::size_t si = 0; si < spec.schemes.size(); ++si) {
            const auto t0 = std::chrono::steady_clock::now();
            const auto out = run_scheme(spec.schemes[si], point.cfg, sc, modem);
            const auto t1 = std::chrono::steady_clock::now();
            TrialMetrics tm = compute_metrics(sc, out);
            tm.wall_time_s = spec.measure_time
                                 ? std::chrono::duration<double>(t1 - t0).count()
                                 : std::numeric_limits<double>::quiet_NaN();
            tm.realization_hash = hash;
            point.blocks[si][b] = tm;
          }
        }
      } catch (...) {
        std::scoped_lock lock(err_mutex);
        if (!error) error = std::current_exception();
      }
    };

    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);

    result.points.push_back(std::move(point));
  }

  // Aggregate in fixed (point, scheme) order; reduction over blocks is a
  // plain mean, so the result is independent of the worker count.
  for (const auto& point : result.points) {
    const double k = point.cfg.n_active;
    const double nk = point.cfg.n_users - point.cfg.n_active;
    std::vector<double> sep_times;
    for (std::size_t si = 0; si < spec.schemes.size(); ++si)
      if (spec.schemes[si] == Scheme::separate)
        for (const auto& tm : point.blocks[si]) sep_times.push_back(tm.wall_time_s);
    const double sep_mean = sep_times.empty() ? std::numeric_limits<double>::quiet_NaN()
                                              : mean_of(sep_times);
    for (std::size_t si = 0; si < spec.schemes.size(); ++si) {
      std::vector<double> pmd, pfa, psum, nmse, bler, iters, times;
      for (const auto& tm : point.blocks[si]) {
        const double md = tm.missed_detection_count / k;
        const double fa = nk > 0 ? tm.false_alarm_count / nk : 0.0;
        pmd.push_back(md);
        pfa.push_back(fa);
        psum.push_back(md + fa);
        nmse.push_back(tm.nmse);
        bler.push_back(tm.block_errors / k);
        iters.push_back(tm.iterations);
        times.push_back(tm.wall_time_s);
      }
      AggregateRow row;
      row.sweep_value = point.sweep_value;
      row.scheme = spec.schemes[si];
      row.p_md = mean_of(pmd);
      row.p_fa = mean_of(pfa);
      row.p_sum = mean_of(psum);
      row.nmse = mean_of(nmse);
      row.bler = mean_of(bler);
      row.mean_iters = mean_of(iters);
      row.time_ratio = mean_of(times) / sep_mean;
      row.ci_p_md = ci_half_width(pmd);
      row.ci_p_fa = ci_half_width(pfa);
      row.ci_p_sum = ci_half_width(psum);
      row.ci_nmse = ci_half_width(nmse);
      row.ci_bler = ci_half_width(bler);
      result.rows.push_back(row);
    }
  }
  return result;
}

std::vector<RuntimeRow> measure_runtime(const ExperimentSpec& spec) {
  if (std::find(spec.schemes.begin(), spec.schemes.end(), Scheme::separate) ==
      spec.schemes.end())
    throw config_error("measure_runtime requires the separate design as the normalizer");
  ExperimentSpec timed = spec;
  timed.measure_time = true;
  timed.out_path.clear();
  const auto res = run_experiment(timed);
  std::vector<RuntimeRow> rows;
  for (const auto& point : res.points) {
    double sep_mean = 0.0;
    for (std::size_t si = 0; si < timed.schemes.size(); ++si)
      if (timed.schemes[si] == Scheme::separate) {
        std::vector<double> t;
        for (const auto& tm : point.blocks[si]) t.push_back(tm.wall_time_s);
        sep_mean = mean_of(t);
      }
    for (std::size_t si = 0; si < timed.schemes.size(); ++si) {
      std::vector<double> t;
      for (const auto& tm : point.blocks[si]) t.push_back(tm.wall_time_s);
      RuntimeRow row;
      row.sweep_value = point.sweep_value;
      row.scheme = timed.schemes[si];
      row.mean_seconds = mean_of(t);
      row.ratio_to_separate =
          timed.schemes[si] == Scheme::separate ? 1.0 : row.mean_seconds / sep_mean;
      rows.push_back(row);
    }
  }
  return rows;
}

std::string to_csv(const ExperimentResult& result) {
  std::string csv =
      "sweep_value,scheme,p_md,p_fa,p_md_plus_fa,nmse_db,bler,mean_iters,time_ratio,"
      "p_md_ci,p_fa_ci,p_md_plus_fa_ci,nmse_ci,bler_ci\n";
  for (const auto& r : result.rows) {
    csv += fmt(r.sweep_value) + ',' + scheme_name(r.scheme) + ',' + fmt(r.p_md) + ',' +
           fmt(r.p_fa) + ',' + fmt(r.p_sum) + ',' + fmt(pow_to_db(r.nmse)) + ',' +
           fmt(r.bler) + ',' + fmt(r.mean_iters) + ',' + fmt(r.time_ratio) + ',' +
           fmt(r.ci_p_md) + ',' + fmt(r.ci_p_fa) + ',' + fmt(r.ci_p_sum) + ',' +
           fmt(r.ci_nmse) + ',' + fmt(r.ci_bler) + '\n';
  }
  return csv;
}

void write_outputs(const ExperimentSpec& spec, const ExperimentResult& result) {
  if (spec.out_path.empty()) return;
  {
    std::ofstream out(spec.out_path);
    if (!out) throw config_error("cannot write results file '" + spec.out_path + "'");
    out << to_csv(result);
  }
  std::ofstream meta(spec.out_path + ".meta");
  if (!meta) throw config_error("cannot write metadata file '" + spec.out_path + ".meta'");
  meta << "code_version = " << kVersion << '\n';
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(result.parity_hash));
  meta << "parity_matrix_hash = " << hash << '\n';
  meta << "sweep_key = " << (spec.sweep_key.empty() ? "none" : spec.sweep_key) << '\n';
  meta << "sweep_values =";
  if (spec.sweep_key.empty()) meta << " none";
  else
    for (const double v : spec.sweep_values) meta << ' ' << fmt(v);
  meta << '\n';
  meta << "schemes =";
  for (const auto s : spec.schemes) meta << ' ' << scheme_name(s);
  meta << '\n';
  meta << "n_blocks = " << spec.n_blocks << '\n';
  meta << "seed = " << spec.seed << '\n';
  meta << "measure_time = " << (spec.measure_time ? "true" : "false") << '\n';
  meta << "[config]\n";
  for (const auto& [key, value] : spec.base.to_key_values())
    meta << key << " = " << value << '\n';
}

}  // namespace mra::harness
