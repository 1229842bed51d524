#include <doctest.h>

#include "mra/crc.hpp"
#include "mra/rng.hpp"
#include "oracles.hpp"

using namespace mra;

TEST_CASE("all-zero payload has all-zero CRC") {
  std::vector<std::uint8_t> b(142, 0);
  const auto d = phy::crc_attach(b);
  REQUIRE(d.size() == 150);
  for (const auto bit : d) CHECK(bit == 0);
  CHECK(phy::crc_check(d));
}

TEST_CASE("any single bit flip is detected") {
  Rng rng(1);
  std::vector<std::uint8_t> b(142);
  for (auto& bit : b) bit = rng.bit();
  auto d = phy::crc_attach(b);
  REQUIRE(phy::crc_check(d));
  for (std::size_t i = 0; i < d.size(); ++i) {
    d[i] ^= 1;
    CHECK_FALSE(phy::crc_check(d));
    d[i] ^= 1;
  }
}

TEST_CASE("remainder matches the long-division oracle") {
  Rng rng(2);
  for (int rep = 0; rep < 200; ++rep) {
    const int len = 8 + rng.uniform_int(0, 200);
    std::vector<std::uint8_t> b(len);
    for (auto& bit : b) bit = rng.bit();
    const auto d = phy::crc_attach(b);
    const auto rem = oracles::crc8_longdiv(b);
    for (int i = 0; i < 8; ++i) CHECK(d[len + i] == rem[i]);
    CHECK(phy::crc_check(d));
  }
}

TEST_CASE("round trip holds for random payloads") {
  Rng rng(3);
  for (int rep = 0; rep < 1000; ++rep) {
    std::vector<std::uint8_t> b(142);
    for (auto& bit : b) bit = rng.bit();
    CHECK(phy::crc_check(phy::crc_attach(b)));
  }
}
