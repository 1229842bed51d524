#include "mra/constellation.hpp"

#include <cmath>
#include <stdexcept>

namespace mra::phy {

Constellation::Constellation(std::vector<cd> points) : points_(std::move(points)) {
  int b = 0;
  for (std::size_t v = points_.size(); v > 1; v >>= 1) ++b;
  bits_per_symbol_ = b;
  bit_sets_.resize(2 * static_cast<std::size_t>(b));
  for (int l = 0; l < b; ++l)
    for (int idx = 0; idx < order(); ++idx)
      bit_sets_[2 * l + pattern_bit(idx, l)].push_back(idx);
}

Constellation Constellation::qpsk() {
  const double a = 1.0 / std::sqrt(2.0);
  std::vector<cd> pts(4);
  for (int idx = 0; idx < 4; ++idx) {
    const int b0 = (idx >> 1) & 1;
    const int b1 = idx & 1;
    pts[idx] = cd(a * (1 - 2 * b0), a * (1 - 2 * b1));
  }
  return Constellation(std::move(pts));
}

Constellation Constellation::qam16() {
  const double a = 1.0 / std::sqrt(10.0);
  // Gray PAM4 per axis: 00,01,11,10 -> +3,+1,-1,-3.
  auto level = [](int hi, int lo) { return (1 - 2 * hi) * (3.0 - 2.0 * lo); };
  std::vector<cd> pts(16);
  for (int idx = 0; idx < 16; ++idx) {
    const int b0 = (idx >> 3) & 1;
    const int b1 = (idx >> 2) & 1;
    const int b2 = (idx >> 1) & 1;
    const int b3 = idx & 1;
    pts[idx] = cd(a * level(b0, b1), a * level(b2, b3));
  }
  return Constellation(std::move(pts));
}

Constellation Constellation::from_order(int order) {
  if (order == 4) return qpsk();
  if (order == 16) return qam16();
  throw std::invalid_argument("unsupported modem order " + std::to_string(order));
}

cd Constellation::map(std::span<const std::uint8_t> bits) const {
  if (static_cast<int>(bits.size()) != bits_per_symbol_)
    throw std::invalid_argument("bit group length does not match bits per symbol");
  int idx = 0;
  for (const auto b : bits) idx = (idx << 1) | (b & 1);
  return points_[idx];
}

std::vector<cd> Constellation::modulate(std::span<const std::uint8_t> bits) const {
  if (bits.size() % bits_per_symbol_ != 0)
    throw std::invalid_argument("bit count is not a multiple of bits per symbol");
  std::vector<cd> out(bits.size() / bits_per_symbol_);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = map(bits.subspan(i * bits_per_symbol_, bits_per_symbol_));
  return out;
}

}  // namespace mra::phy
