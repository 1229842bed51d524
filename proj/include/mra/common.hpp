// Shared scalar helpers and error types used across the receiver library.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace mra {

using cd = std::complex<double>;

// All LLRs in the library are ln p(bit=0)/p(bit=1), clamped to +/- kLlrClamp.
inline constexpr double kLlrClamp = 30.0;
// Clamp on the activity log-odds term and on L_mn before the logistic.
inline constexpr double kLogOddsClamp = 60.0;
// Floor applied to every divisor inside the message-passing updates.
inline constexpr double kVarFloor = 1e-12;
inline constexpr double kLambdaClamp = 1e-6;

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct numerical_error : std::runtime_error {
  numerical_error(const std::string& what, int iteration)
      : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration(iteration) {}
  int iteration;
};

inline double clamp_llr(double x) {
  return x > kLlrClamp ? kLlrClamp : (x < -kLlrClamp ? -kLlrClamp : x);
}

inline double clamp_abs(double x, double limit) {
  return x > limit ? limit : (x < -limit ? -limit : x);
}

// Numerically stable logistic, exact at the saturated ends.
inline double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// ln(lambda / (1 - lambda)) with lambda clamped away from {0, 1}.
inline double activity_log_odds(double lambda) {
  const double lo = kLambdaClamp;
  const double hi = 1.0 - kLambdaClamp;
  const double l = lambda < lo ? lo : (lambda > hi ? hi : lambda);
  return std::log(l / (1.0 - l));
}

inline double db_to_pow(double db) { return std::pow(10.0, db / 10.0); }
inline double pow_to_db(double p) { return 10.0 * std::log10(p); }

inline double floored(double x) { return x < kVarFloor ? kVarFloor : x; }

// FNV-1a over raw bytes, used for realization hashes and data-file digests.
inline std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h = 14695981039346656037ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace mra
