// Full per-user coding chain: CRC-8 attach, rate-1/2 LDPC, Gray mapping.
#pragma once

#include <memory>
#include <span>
#include <vector>

#include "mra/config.hpp"
#include "mra/constellation.hpp"
#include "mra/crc.hpp"
#include "mra/ldpc.hpp"

namespace mra::phy {

class CodedModem {
 public:
  explicit CodedModem(const SystemConfig& cfg)
      : n_b_(cfg.payload_bits),
        n_d_(cfg.block_bits),
        n_c_(cfg.coded_bits),
        code_(std::make_shared<LdpcCode>(LdpcCode::generate(cfg.coded_bits))),
        constel_(Constellation::from_order(cfg.modem_order)) {
    if (code_->k() != n_d_)
      throw config_error("LDPC dimension does not match the configured block size");
  }

  int n_b() const { return n_b_; }
  int n_d() const { return n_d_; }
  int n_c() const { return n_c_; }
  const LdpcCode& code() const { return *code_; }
  const Constellation& constellation() const { return constel_; }

  std::vector<std::uint8_t> encode_block(std::span<const std::uint8_t> payload) const {
    if (static_cast<int>(payload.size()) != n_b_)
      throw std::invalid_argument("payload length does not match n_b");
    return code_->encode(crc_attach(payload));
  }

  std::vector<cd> transmit_symbols(std::span<const std::uint8_t> payload) const {
    const auto coded = encode_block(payload);
    return constel_.modulate(coded);
  }

 private:
  int n_b_;
  int n_d_;
  int n_c_;
  std::shared_ptr<LdpcCode> code_;  // immutable once built; shared across threads
  Constellation constel_;
};

}  // namespace mra::phy
