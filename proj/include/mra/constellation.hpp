// Gray-mapped unit-power constellations and the bit-set partition used by the
// soft demapper. Point index equals the integer value of its bit pattern with
// bit position 0 as the most significant bit:
//   QPSK:   b0 -> sign of the real part, b1 -> sign of the imaginary part,
//           "00" -> (1+1j)/sqrt(2).
//   16-QAM: (b0,b1) -> real PAM4 level, (b2,b3) -> imaginary PAM4 level,
//           Gray levels 00,01,11,10 -> +3,+1,-1,-3, scaled by 1/sqrt(10).
#pragma once

#include <span>
#include <vector>

#include "mra/common.hpp"

namespace mra::phy {

class Constellation {
 public:
  static Constellation qpsk();
  static Constellation qam16();
  static Constellation from_order(int order);

  int order() const { return static_cast<int>(points_.size()); }
  int bits_per_symbol() const { return bits_per_symbol_; }
  const std::vector<cd>& points() const { return points_; }

  // Bit value at position l of point idx (position 0 is the first bit).
  int pattern_bit(int idx, int l) const {
    return (idx >> (bits_per_symbol_ - 1 - l)) & 1;
  }

  // X_l^b: indices of points whose l-th bit equals b.
  const std::vector<int>& bit_set(int l, int b) const { return bit_sets_[2 * l + b]; }

  cd map(std::span<const std::uint8_t> bits) const;
  // Length of bits must be a multiple of bits_per_symbol.
  std::vector<cd> modulate(std::span<const std::uint8_t> bits) const;

 private:
  explicit Constellation(std::vector<cd> points);

  std::vector<cd> points_;
  int bits_per_symbol_ = 0;
  std::vector<std::vector<int>> bit_sets_;  // [2*l + b]
};

}  // namespace mra::phy
