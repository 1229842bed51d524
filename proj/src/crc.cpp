#include "mra/crc.hpp"

namespace mra::phy {

std::uint8_t crc8_remainder(std::span<const std::uint8_t> bits) {
  std::uint8_t reg = 0;
  for (const auto b : bits) {
    const std::uint8_t msb = reg >> 7;
    reg = static_cast<std::uint8_t>((reg << 1) | (b & 1u));
    if (msb) reg ^= kCrc8Poly;
  }
  return reg;
}

std::vector<std::uint8_t> crc_attach(std::span<const std::uint8_t> payload) {
  std::vector<std::uint8_t> block(payload.begin(), payload.end());
  block.resize(payload.size() + kCrcBits, 0);
  const std::uint8_t rem = crc8_remainder(block);
  for (int i = 0; i < kCrcBits; ++i)
    block[payload.size() + i] = (rem >> (kCrcBits - 1 - i)) & 1u;
  return block;
}

bool crc_check(std::span<const std::uint8_t> block) {
  return crc8_remainder(block) == 0;
}

}  // namespace mra::phy
