#include "mra/ldpc.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mra/rng.hpp"

namespace mra::phy {

namespace {

constexpr std::uint64_t kLdpcBaseSeed = 0x4c64706343ull;
constexpr int kCandidateSeeds = 100;

using BitRow = std::vector<std::uint64_t>;

BitRow make_row(int n) { return BitRow((n + 63) / 64, 0); }
void set_bit(BitRow& r, int i) { r[i >> 6] |= (1ull << (i & 63)); }
bool get_bit(const BitRow& r, int i) { return (r[i >> 6] >> (i & 63)) & 1ull; }
void xor_into(BitRow& a, const BitRow& b) {
  for (std::size_t w = 0; w < a.size(); ++w) a[w] ^= b[w];
}

std::vector<BitRow> to_bit_rows(const std::vector<std::vector<int>>& check_vars, int n) {
  std::vector<BitRow> rows;
  rows.reserve(check_vars.size());
  for (const auto& vars : check_vars) {
    auto row = make_row(n);
    for (const int v : vars) set_bit(row, v);
    rows.push_back(std::move(row));
  }
  return rows;
}

int gf2_rank(std::vector<BitRow> rows, int n) {
  int rank = 0;
  for (int col = 0; col < n && rank < static_cast<int>(rows.size()); ++col) {
    int pivot = -1;
    for (int r = rank; r < static_cast<int>(rows.size()); ++r)
      if (get_bit(rows[r], col)) {
        pivot = r;
        break;
      }
    if (pivot < 0) continue;
    std::swap(rows[rank], rows[pivot]);
    for (int r = 0; r < static_cast<int>(rows.size()); ++r)
      if (r != rank && get_bit(rows[r], col)) xor_into(rows[r], rows[rank]);
    ++rank;
  }
  return rank;
}

int count_four_cycles(const std::vector<BitRow>& rows) {
  int cycles = 0;
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t b = a + 1; b < rows.size(); ++b) {
      int overlap = 0;
      for (std::size_t w = 0; w < rows[a].size(); ++w)
        overlap += std::popcount(rows[a][w] & rows[b][w]);
      cycles += overlap * (overlap - 1) / 2;
    }
  return cycles;
}

// One socket-permutation draw of the regular ensemble; empty on a double edge.
std::vector<std::vector<int>> draw_edges(int n, int m, int var_deg, int check_deg, Rng& rng) {
  const int n_edges = n * var_deg;
  std::vector<int> perm(n_edges);
  for (int i = 0; i < n_edges; ++i) perm[i] = i;
  for (int i = n_edges - 1; i > 0; --i) {
    const int j = rng.uniform_int(0, i);
    std::swap(perm[i], perm[j]);
  }
  std::vector<std::vector<int>> check_vars(m);
  for (auto& cv : check_vars) cv.reserve(check_deg);
  for (int e = 0; e < n_edges; ++e) {
    const int check = e / check_deg;
    const int var = perm[e] / var_deg;
    if (std::find(check_vars[check].begin(), check_vars[check].end(), var) !=
        check_vars[check].end())
      return {};
    check_vars[check].push_back(var);
  }
  for (auto& cv : check_vars) std::sort(cv.begin(), cv.end());
  return check_vars;
}

}  // namespace

LdpcCode LdpcCode::generate(int n_bits, int var_deg, int check_deg) {
  if (n_bits * var_deg % check_deg != 0)
    throw config_error("LDPC dimensions not realizable: n*var_deg must be divisible by check_deg");
  const int m = n_bits * var_deg / check_deg;
  if (m >= n_bits) throw config_error("LDPC construction requires n_checks < n_bits");

  int best_cycles = -1;
  std::uint64_t best_trial = 0;
  std::vector<std::vector<int>> best_check_vars;
  for (int trial = 0; trial < kCandidateSeeds; ++trial) {
    Rng rng(mix_seed(kLdpcBaseSeed, static_cast<std::uint64_t>(n_bits),
                     static_cast<std::uint64_t>(trial)));
    std::vector<std::vector<int>> check_vars;
    for (int attempt = 0; attempt < 500 && check_vars.empty(); ++attempt)
      check_vars = draw_edges(n_bits, m, var_deg, check_deg, rng);
    if (check_vars.empty()) continue;
    const auto rows = to_bit_rows(check_vars, n_bits);
    if (gf2_rank(rows, n_bits) != m) continue;  // singular: encoder not constructible
    const int cycles = count_four_cycles(rows);
    if (best_cycles < 0 || cycles < best_cycles) {
      best_cycles = cycles;
      best_trial = trial;
      best_check_vars = std::move(check_vars);
    }
  }
  if (best_cycles < 0)
    throw config_error("no full-rank LDPC candidate found in the seed scan");

  LdpcCode code;
  code.n_ = n_bits;
  code.m_ = m;
  code.four_cycles_ = best_cycles;
  code.construction_seed_ = best_trial;
  code.check_vars_ = std::move(best_check_vars);
  code.finalize();
  code.build_encoder();
  return code;
}

void LdpcCode::finalize() {
  var_checks_.assign(n_, {});
  check_edges_.assign(m_, {});
  var_edges_.assign(n_, {});
  edge_var_.clear();
  for (int c = 0; c < m_; ++c)
    for (const int v : check_vars_[c]) {
      const int e = static_cast<int>(edge_var_.size());
      edge_var_.push_back(v);
      check_edges_[c].push_back(e);
      var_edges_[v].push_back(e);
      var_checks_[v].push_back(c);
    }
}

void LdpcCode::build_encoder() {
  auto rows = to_bit_rows(check_vars_, n_);
  std::vector<int> pivot_col;
  pivot_col.reserve(m_);
  int rank = 0;
  // Pivot from the rightmost columns so information bits stay at the front.
  for (int col = n_ - 1; col >= 0 && rank < m_; --col) {
    int pivot = -1;
    for (int r = rank; r < m_; ++r)
      if (get_bit(rows[r], col)) {
        pivot = r;
        break;
      }
    if (pivot < 0) continue;
    std::swap(rows[rank], rows[pivot]);
    for (int r = 0; r < m_; ++r)
      if (r != rank && get_bit(rows[r], col)) xor_into(rows[r], rows[rank]);
    pivot_col.push_back(col);
    ++rank;
  }
  if (rank != m_)
    throw config_error("singular parity-check matrix: systematic encoder not constructible");

  std::vector<char> is_parity(n_, 0);
  for (const int c : pivot_col) is_parity[c] = 1;
  info_positions_.clear();
  for (int j = 0; j < n_; ++j)
    if (!is_parity[j]) info_positions_.push_back(j);
  parity_positions_ = pivot_col;

  std::vector<int> info_index(n_, -1);
  for (std::size_t i = 0; i < info_positions_.size(); ++i) info_index[info_positions_[i]] = static_cast<int>(i);
  const int kp = k();
  parity_gen_.assign(m_, BitRow((kp + 63) / 64, 0));
  for (int r = 0; r < m_; ++r)
    for (int j = 0; j < n_; ++j)
      if (!is_parity[j] && get_bit(rows[r], j)) set_bit(parity_gen_[r], info_index[j]);
}

std::vector<std::uint8_t> LdpcCode::encode(std::span<const std::uint8_t> info) const {
  if (static_cast<int>(info.size()) != k())
    throw std::invalid_argument("information block length does not match the code dimension");
  std::vector<std::uint8_t> c(n_, 0);
  for (int i = 0; i < k(); ++i) c[info_positions_[i]] = info[i] & 1;
  for (int r = 0; r < m_; ++r) {
    std::uint8_t p = 0;
    for (int i = 0; i < k(); ++i)
      if (get_bit(parity_gen_[r], i)) p ^= (info[i] & 1);
    c[parity_positions_[r]] = p;
  }
  return c;
}

std::vector<std::uint8_t> LdpcCode::extract_info(std::span<const std::uint8_t> codeword) const {
  if (static_cast<int>(codeword.size()) != n_)
    throw std::invalid_argument("codeword length does not match the code length");
  std::vector<std::uint8_t> info(k());
  for (int i = 0; i < k(); ++i) info[i] = codeword[info_positions_[i]] & 1;
  return info;
}

bool LdpcCode::parity_ok(std::span<const std::uint8_t> codeword) const {
  for (const auto& vars : check_vars_) {
    std::uint8_t s = 0;
    for (const int v : vars) s ^= (codeword[v] & 1);
    if (s) return false;
  }
  return true;
}

Eigen::VectorXd LdpcCode::decode(const Eigen::VectorXd& prior, int max_iters) const {
  const int n_edges = static_cast<int>(edge_var_.size());
  std::vector<double> v2c(n_edges), c2v(n_edges, 0.0), tanh_half(n_edges);
  for (int e = 0; e < n_edges; ++e) v2c[e] = clamp_llr(prior[edge_var_[e]]);

  Eigen::VectorXd posterior = prior;
  std::vector<double> fwd, bwd;
  for (int iter = 0; iter < max_iters; ++iter) {
    // Check-node pass: exclusive tanh products via forward/backward sweeps.
    for (const auto& edges : check_edges_) {
      const int deg = static_cast<int>(edges.size());
      if (deg == 1) {
        c2v[edges[0]] = 0.0;
        continue;
      }
      fwd.resize(deg);
      bwd.resize(deg);
      for (int i = 0; i < deg; ++i) tanh_half[i] = std::tanh(0.5 * v2c[edges[i]]);
      fwd[0] = tanh_half[0];
      bwd[deg - 1] = tanh_half[deg - 1];
      for (int i = 1; i < deg; ++i) {
        fwd[i] = fwd[i - 1] * tanh_half[i];
        bwd[deg - 1 - i] = bwd[deg - i] * tanh_half[deg - 1 - i];
      }
      for (int i = 0; i < deg; ++i) {
        double t = (i == 0) ? bwd[1] : (i == deg - 1 ? fwd[deg - 2] : fwd[i - 1] * bwd[i + 1]);
        t = clamp_abs(t, 1.0 - 1e-15);
        c2v[edges[i]] = clamp_llr(2.0 * std::atanh(t));
      }
    }
    // Variable-node pass and posterior update.
    for (int v = 0; v < n_; ++v) {
      double sum = prior[v];
      for (const int e : var_edges_[v]) sum += c2v[e];
      posterior[v] = sum;
      for (const int e : var_edges_[v]) v2c[e] = clamp_llr(sum - c2v[e]);
    }
    bool satisfied = true;
    for (const auto& vars : check_vars_) {
      std::uint8_t s = 0;
      for (const int v : vars) s ^= (posterior[v] < 0.0);
      if (s) {
        satisfied = false;
        break;
      }
    }
    if (satisfied) break;
  }
  for (int v = 0; v < n_; ++v) posterior[v] = clamp_llr(posterior[v]);
  return posterior;
}

std::string LdpcCode::to_alist() const {
  std::ostringstream os;
  int max_vd = 0, max_cd = 0;
  for (const auto& vc : var_checks_) max_vd = std::max(max_vd, static_cast<int>(vc.size()));
  for (const auto& cv : check_vars_) max_cd = std::max(max_cd, static_cast<int>(cv.size()));
  os << n_ << ' ' << m_ << '\n' << max_vd << ' ' << max_cd << '\n';
  for (int v = 0; v < n_; ++v) os << var_checks_[v].size() << (v + 1 < n_ ? ' ' : '\n');
  for (int c = 0; c < m_; ++c) os << check_vars_[c].size() << (c + 1 < m_ ? ' ' : '\n');
  for (const auto& vc : var_checks_) {
    for (std::size_t i = 0; i < vc.size(); ++i) os << vc[i] + 1 << (i + 1 < vc.size() ? ' ' : '\n');
  }
  for (const auto& cv : check_vars_) {
    for (std::size_t i = 0; i < cv.size(); ++i) os << cv[i] + 1 << (i + 1 < cv.size() ? ' ' : '\n');
  }
  return os.str();
}

void LdpcCode::write_alist(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw config_error("cannot write alist file '" + path + "'");
  out << to_alist();
}

LdpcCode LdpcCode::from_alist(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open alist file '" + path + "'");
  int n = 0, m = 0, max_vd = 0, max_cd = 0;
  if (!(in >> n >> m >> max_vd >> max_cd) || n <= 0 || m <= 0)
    throw config_error("malformed alist header in '" + path + "'");
  std::vector<int> vd(n), cdeg(m);
  for (auto& d : vd) in >> d;
  for (auto& d : cdeg) in >> d;
  std::vector<std::vector<int>> var_checks(n), check_vars(m);
  for (int v = 0; v < n; ++v)
    for (int i = 0; i < vd[v]; ++i) {
      int c;
      in >> c;
      var_checks[v].push_back(c - 1);
    }
  for (int c = 0; c < m; ++c)
    for (int i = 0; i < cdeg[c]; ++i) {
      int v;
      in >> v;
      check_vars[c].push_back(v - 1);
    }
  if (!in) throw config_error("truncated alist file '" + path + "'");

  LdpcCode code;
  code.n_ = n;
  code.m_ = m;
  code.check_vars_ = std::move(check_vars);
  for (auto& cv : code.check_vars_) std::sort(cv.begin(), cv.end());
  code.four_cycles_ = count_four_cycles(to_bit_rows(code.check_vars_, n));
  code.finalize();
  code.build_encoder();
  return code;
}

std::uint64_t LdpcCode::hash() const {
  const std::string a = to_alist();
  return fnv1a(a.data(), a.size());
}

}  // namespace mra::phy
