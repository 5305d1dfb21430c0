#include <catch2/catch.hpp>

#include "rdcf/phy.hpp"

using namespace rdcf;

namespace {
const RateSet kRates = RateSet::wifi_80211a();
const double kSigma = enlarged_slot(kRates, PhyParams{});
}  // namespace

TEST_CASE("stock timing constants") {
  PhyParams phy;
  phy.validate();
  CHECK(phy.slot_base == 9e-6);
  CHECK(phy.sifs == 16e-6);
  CHECK(phy.difs == 34e-6);
  CHECK(phy.mac_header_bits == 224.0);
  CHECK(phy.phy_header_time == 20e-6 + 22.0 / 6e6);
  CHECK(phy.rts_time == 160.0 / 6e6 + phy.phy_header_time);
  CHECK(phy.cts_time == 112.0 / 6e6 + phy.phy_header_time);
  CHECK(phy.ack_time == phy.cts_time);
  CHECK(phy.control_rate == 6e6);

  BackoffParams bp;
  bp.validate();
  CHECK(bp.cw_min == 16);
  CHECK(bp.r == 2.0);
  CHECK(bp.b_max == 6);                 // CW_max = 16 * 2^6 = 1024
  CHECK(bp.window_int(bp.b_max) == 1024);

  const auto& rates = kRates.rates();
  REQUIRE(rates.size() == 8);
  CHECK(rates.front() == 6e6);
  CHECK(rates.back() == 54e6);
  CHECK(kSigma == Approx(72e-6));
}

TEST_CASE("mini slot wait ranks rates") {
  CHECK(mini_slot_wait(7, kRates, kSigma) == 0.0);
  CHECK(mini_slot_wait(6, kRates, kSigma) == Approx(9e-6));
  CHECK(mini_slot_wait(5, kRates, kSigma) == Approx(18e-6));

  double sum = 0.0;
  for (int m = 0; m < kRates.size(); ++m) sum += mini_slot_wait(m, kRates, kSigma);
  CHECK(sum == Approx(kSigma * (kRates.size() - 1) / 2.0));

  CHECK_THROWS_AS(mini_slot_wait(8, kRates, kSigma), std::invalid_argument);
  CHECK_THROWS_AS(mini_slot_wait(-1, kRates, kSigma), std::invalid_argument);
  CHECK_THROWS_AS(mini_slot_wait(0, kRates, 0.0), std::invalid_argument);

  // The mirrored accounting reverses the ranking.
  CHECK(mini_slot_term(7, kRates, kSigma, MiniSlotConvention::kLowRateShortWait) ==
        Approx(7 * kSigma / 8));
  CHECK(mini_slot_term(0, kRates, kSigma, MiniSlotConvention::kLowRateShortWait) == 0.0);
}

TEST_CASE("success duration matches a hand sum at the base mode") {
  PhyParams phy;
  BurstPolicy burst;  // 2312 bytes
  burst.accounting = BurstAccounting::kAggregate;

  // Term-by-term sum from the timing table, mode 0 (6 Mbps), basic access:
  // 7 mini slots + header + payload + SIFS + ACK + DIFS.
  const double wait = 7 * 9e-6;
  const double header = (20e-6 + 22.0 / 6e6) + 224.0 / 6e6;
  const double payload = 2312.0 * 8.0 / 6e6;
  const double expected = wait + header + payload + 16e-6 + (112.0 / 6e6 + 20e-6 + 22.0 / 6e6) +
                          34e-6;
  CHECK(expected == Approx(3299e-6).epsilon(1e-12));
  CHECK(success_duration(AccessMode::kBasic, 0, burst, phy, kRates, kSigma) ==
        Approx(expected).epsilon(1e-12));

  // A one-packet burst is the same exchange under either accounting.
  BurstPolicy chain = burst;
  chain.accounting = BurstAccounting::kPacketChain;
  CHECK(success_duration(AccessMode::kBasic, 0, chain, phy, kRates, kSigma) ==
        Approx(expected).epsilon(1e-12));
}

TEST_CASE("collision duration matches a hand sum at mode 2") {
  PhyParams phy;
  BurstPolicy burst;
  burst.accounting = BurstAccounting::kAggregate;

  // Mode 2 is 12 Mbps: 5 mini slots + header + full burst payload + DIFS.
  const double wait = 5 * 9e-6;
  const double header = (20e-6 + 22.0 / 6e6) + 224.0 / 12e6;
  const double payload = 2.0 * 2312.0 * 8.0 / 12e6;  // two base packets of airtime
  const double expected = wait + header + payload + 34e-6;
  CHECK(expected == Approx(3204e-6).epsilon(1e-12));
  CHECK(collision_duration(AccessMode::kBasic, 2, burst, phy, kRates, kSigma) ==
        Approx(expected).epsilon(1e-12));
}

TEST_CASE("success and collision differ by SIFS plus ACK") {
  PhyParams phy;
  BurstPolicy burst;
  burst.accounting = BurstAccounting::kAggregate;
  for (int m = 0; m < kRates.size(); ++m) {
    const double gap = success_duration(AccessMode::kBasic, m, burst, phy, kRates, kSigma) -
                       collision_duration(AccessMode::kBasic, m, burst, phy, kRates, kSigma);
    CHECK(gap == Approx(phy.sifs + phy.ack_time).epsilon(1e-12));
  }
  // Packet-chain accounting keeps the identity where the burst is a single
  // packet.
  BurstPolicy chain;
  const double gap0 = success_duration(AccessMode::kBasic, 0, chain, phy, kRates, kSigma) -
                      collision_duration(AccessMode::kBasic, 0, chain, phy, kRates, kSigma);
  CHECK(gap0 == Approx(phy.sifs + phy.ack_time).epsilon(1e-12));
}

TEST_CASE("bursts occupy equal payload airtime at every rate") {
  BurstPolicy burst;
  for (int m = 0; m < kRates.size(); ++m) {
    CHECK(burst.payload_bits(m, kRates) / kRates.rate(m) ==
          Approx(burst.base_payload_bits / kRates.rate(0)).epsilon(1e-12));
  }
  CHECK(burst.packets(1, kRates) == Approx(1.5));  // 9 Mbps over the 6 Mbps base
}

TEST_CASE("rts collisions lose only the rts") {
  PhyParams phy;
  BurstPolicy big, small;
  small.base_payload_bits = 100.0;
  for (int m = 0; m < kRates.size(); ++m) {
    CHECK(collision_duration(AccessMode::kRtsCts, m, big, phy, kRates, kSigma) ==
          collision_duration(AccessMode::kRtsCts, m, small, phy, kRates, kSigma));
  }
  CHECK(collision_duration(AccessMode::kRtsCts, kRates.size() - 1, big, phy, kRates, kSigma) <
        collision_duration(AccessMode::kRtsCts, 0, big, phy, kRates, kSigma));
}

TEST_CASE("success durations dominate collisions in basic mode") {
  PhyParams phy;
  BurstPolicy burst;
  for (int m = 0; m < kRates.size(); ++m) {
    CHECK(success_duration(AccessMode::kBasic, m, burst, phy, kRates, kSigma) >=
          collision_duration(AccessMode::kBasic, m, burst, phy, kRates, kSigma));
  }
}

TEST_CASE("rate set validation") {
  CHECK_THROWS_AS(RateSet({}), std::invalid_argument);
  CHECK_THROWS_AS(RateSet({6e6, 6e6}), std::invalid_argument);
  CHECK_THROWS_AS(RateSet({-1.0, 6e6}), std::invalid_argument);
  CHECK_THROWS_AS((BackoffParams{0, 2.0, 6}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((BackoffParams{16, 0.5, 6}.validate()), std::invalid_argument);
}
