// Regular LDPC code: deterministic Gallager-ensemble construction, systematic
// encoder built by one-time GF(2) elimination, and a log-domain sum-product
// decoder with flooding schedule and parity-check early exit.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mra/common.hpp"

namespace mra::phy {

class LdpcCode {
 public:
  // Builds a (var_deg, check_deg)-regular code of length n_bits. The edge
  // assignment is drawn from a fixed base seed; the first 100 candidate
  // permutations are scanned, singular ones are discarded, and the candidate
  // with the fewest 4-cycles wins, so construction is deterministic.
  static LdpcCode generate(int n_bits, int var_deg = 3, int check_deg = 6);

  static LdpcCode from_alist(const std::string& path);
  void write_alist(const std::string& path) const;
  std::string to_alist() const;
  std::uint64_t hash() const;

  int n() const { return n_; }             // codeword length
  int n_checks() const { return m_; }
  int k() const { return n_ - m_; }        // information length
  int four_cycles() const { return four_cycles_; }
  std::uint64_t construction_seed() const { return construction_seed_; }

  // Sorted codeword positions carrying the information bits verbatim.
  const std::vector<int>& info_positions() const { return info_positions_; }

  std::vector<std::uint8_t> encode(std::span<const std::uint8_t> info) const;
  bool parity_ok(std::span<const std::uint8_t> codeword) const;

  // The information block carried at info_positions of a codeword.
  std::vector<std::uint8_t> extract_info(std::span<const std::uint8_t> codeword) const;

  // Sum-product posteriors from prior LLRs (ln p(0)/p(1)), clamped to
  // +/- kLlrClamp. Early exit once the hard decision satisfies every check;
  // non-convergence returns the best-effort posteriors.
  Eigen::VectorXd decode(const Eigen::VectorXd& prior, int max_iters = 50) const;

  const std::vector<std::vector<int>>& check_vars() const { return check_vars_; }

 private:
  LdpcCode() = default;
  void finalize();        // adjacency, edge layout, encoder
  void build_encoder();   // GF(2) elimination; throws config_error if singular

  int n_ = 0;
  int m_ = 0;
  int four_cycles_ = 0;
  std::uint64_t construction_seed_ = 0;
  std::vector<std::vector<int>> check_vars_;   // per check, sorted
  std::vector<std::vector<int>> var_checks_;   // per variable
  // Edge arrays for the decoder.
  std::vector<int> edge_var_;                   // edge -> variable
  std::vector<std::vector<int>> check_edges_;   // check -> edges
  std::vector<std::vector<int>> var_edges_;     // variable -> edges
  // Encoder: parity bit r = XOR over info bits selected by parity_gen_ row r.
  std::vector<int> info_positions_;
  std::vector<int> parity_positions_;
  std::vector<std::vector<std::uint64_t>> parity_gen_;
};

}  // namespace mra::phy
