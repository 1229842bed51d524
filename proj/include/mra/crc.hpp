// CRC-8 attachment and check (3GPP CRC8, g(D)=D^8+D^7+D^4+D^3+D+1,
// zero initial state, no final XOR).
#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace mra::phy {

inline constexpr std::uint8_t kCrc8Poly = 0x9B;  // low 8 coefficients of g(D)
inline constexpr int kCrcBits = 8;

// Remainder of the fed bit sequence interpreted as a GF(2) polynomial,
// first bit = highest degree.
std::uint8_t crc8_remainder(std::span<const std::uint8_t> bits);

// Appends the 8 CRC bits of b * D^8 (MSB of the remainder first).
std::vector<std::uint8_t> crc_attach(std::span<const std::uint8_t> payload);

// True iff the block divides the generator polynomial exactly.
bool crc_check(std::span<const std::uint8_t> block);

}  // namespace mra::phy
