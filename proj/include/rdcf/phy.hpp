#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace rdcf {

/// DCF channel access mechanism.
enum class AccessMode { kBasic, kRtsCts };

/// Mini-slot accounting used in busy-slot durations.  Candidate ranking is
/// always by rate (highest first); this only selects the extra wait charged
/// to a mode-m transmission:
///   kHighRateShortWait — (M-1-mode) * sigma/M, the wait the winner served
///   kLowRateShortWait  — mode * sigma/M, the mirrored accounting
enum class MiniSlotConvention { kHighRateShortWait, kLowRateShortWait };

/// Where the MAC header of a data burst is clocked.
enum class MacHeaderRate { kDataRate, kControlRate };

/// The ordered set of data rates available to stations, in bits/second.
class RateSet {
 public:
  explicit RateSet(std::vector<double> rates_bps) : rates_(std::move(rates_bps)) {
    if (rates_.empty()) throw std::invalid_argument("RateSet: needs at least one rate");
    for (std::size_t i = 0; i < rates_.size(); ++i) {
      if (!(rates_[i] > 0.0)) throw std::invalid_argument("RateSet: rates must be positive");
      if (i > 0 && !(rates_[i] > rates_[i - 1]))
        throw std::invalid_argument("RateSet: rates must be strictly increasing");
    }
  }

  /// The eight 802.11a OFDM rates.
  static RateSet wifi_80211a() {
    return RateSet({6e6, 9e6, 12e6, 18e6, 24e6, 36e6, 48e6, 54e6});
  }

  int size() const { return static_cast<int>(rates_.size()); }
  double rate(int mode) const {
    check_mode(mode);
    return rates_[static_cast<std::size_t>(mode)];
  }
  const std::vector<double>& rates() const { return rates_; }

  void check_mode(int mode) const {
    if (mode < 0 || mode >= size()) throw std::invalid_argument("rate mode out of range");
  }

 private:
  std::vector<double> rates_;
};

/// Protocol timing constants.  Durations in seconds, sizes in bits.
struct PhyParams {
  double slot_base = 9e-6;                      // ordinary idle slot
  double sifs = 16e-6;
  double difs = 34e-6;
  double phy_header_time = 20e-6 + 22.0 / 6e6;  // PLCP preamble + signal + 22 service/tail bits at 6 Mbps
  double mac_header_bits = 224.0;
  double control_rate = 6e6;                    // rate for control frames and headers
  double rts_time = 160.0 / 6e6 + phy_header_time;
  double cts_time = 112.0 / 6e6 + phy_header_time;
  double ack_time = 112.0 / 6e6 + phy_header_time;
  MacHeaderRate mac_header_rate = MacHeaderRate::kDataRate;

  void validate() const {
    if (!(slot_base > 0 && sifs > 0 && difs > 0 && phy_header_time > 0 && rts_time > 0 &&
          cts_time > 0 && ack_time > 0 && control_rate > 0))
      throw std::invalid_argument("PhyParams: durations must be positive");
    if (!(difs > sifs)) throw std::invalid_argument("PhyParams: difs must exceed sifs");
    if (!(mac_header_bits >= 0)) throw std::invalid_argument("PhyParams: bad mac header size");
  }
};

/// Exponential backoff parameters: window at stage i is r^i * cw_min,
/// capped at stage b_max.  The analytic model keeps the window real-valued;
/// the simulator rounds it up.
struct BackoffParams {
  int cw_min = 16;
  double r = 2.0;
  int b_max = 6;

  void validate() const {
    if (cw_min < 1) throw std::invalid_argument("BackoffParams: cw_min must be >= 1");
    if (!(r >= 1.0)) throw std::invalid_argument("BackoffParams: r must be >= 1");
    if (b_max < 0) throw std::invalid_argument("BackoffParams: b_max must be >= 0");
  }

  double window_real(int stage) const { return std::pow(r, stage) * cw_min; }
  long window_int(int stage) const {
    return static_cast<long>(std::ceil(window_real(stage) - 1e-12));
  }
};

/// How burst airtime is charged.
///   kPacketChain — each packet carries its own header and is individually
///     acknowledged (DATA SIFS ACK SIFS ... DATA SIFS ACK); a collision
///     costs only the first packet, since no ACK arrives to continue.
///   kAggregate — one header and one acknowledgment for the whole burst;
///     a collision burns the full burst airtime.
enum class BurstAccounting { kPacketChain, kAggregate };

/// Burst sizing: a mode-m burst carries payload proportional to its rate so
/// that every burst occupies the same airtime.
struct BurstPolicy {
  double base_payload_bits = 2312.0 * 8.0;  // L_0
  int base_rate_index = 0;
  BurstAccounting accounting = BurstAccounting::kPacketChain;

  /// Number of base packets in a mode-m burst (real-valued; only aggregate
  /// payload and airtime matter).
  double packets(int mode, const RateSet& rs) const {
    rs.check_mode(mode);
    rs.check_mode(base_rate_index);
    return rs.rate(mode) / rs.rate(base_rate_index);
  }

  double payload_bits(int mode, const RateSet& rs) const {
    return base_payload_bits * packets(mode, rs);
  }
};

/// Enlarged slot used by the rate-aware protocol: M mini slots of the
/// ordinary idle-slot length.
inline double enlarged_slot(const RateSet& rs, const PhyParams& phy) {
  return phy.slot_base * rs.size();
}

/// Extra wait served by a mode-m candidate before transmitting: one mini
/// slot (sigma/M) per rate above it.  Zero for the highest mode.
inline double mini_slot_wait(int mode, const RateSet& rs, double sigma) {
  rs.check_mode(mode);
  if (!(sigma > 0)) throw std::invalid_argument("mini_slot_wait: sigma must be positive");
  const int m_count = rs.size();
  return (m_count - 1 - mode) * (sigma / m_count);
}

inline double mini_slot_term(int mode, const RateSet& rs, double sigma, MiniSlotConvention conv) {
  rs.check_mode(mode);
  if (!(sigma > 0)) throw std::invalid_argument("mini_slot_term: sigma must be positive");
  const int m_count = rs.size();
  return conv == MiniSlotConvention::kHighRateShortWait ? (m_count - 1 - mode) * (sigma / m_count)
                                                        : mode * (sigma / m_count);
}

/// Header transmission time for a mode-m burst.
inline double header_time(int mode, const PhyParams& phy, const RateSet& rs) {
  rs.check_mode(mode);
  const double rate =
      phy.mac_header_rate == MacHeaderRate::kDataRate ? rs.rate(mode) : phy.control_rate;
  return phy.phy_header_time + phy.mac_header_bits / rate;
}

/// Airtime of the burst body plus its acknowledgments, from the first
/// header to the last ACK.
inline double burst_exchange_time(int mode, const BurstPolicy& burst, const PhyParams& phy,
                                  const RateSet& rs) {
  const double one_packet =
      header_time(mode, phy, rs) + burst.base_payload_bits / rs.rate(mode);
  if (burst.accounting == BurstAccounting::kAggregate) {
    return header_time(mode, phy, rs) + burst.payload_bits(mode, rs) / rs.rate(mode) + phy.sifs +
           phy.ack_time;
  }
  const double n = burst.packets(mode, rs);
  return n * (one_packet + 2.0 * phy.sifs + phy.ack_time) - phy.sifs;
}

/// Duration of a successful mode-m burst, mini-slot wait included.
inline double success_duration(AccessMode mode_access, int mode, const BurstPolicy& burst,
                               const PhyParams& phy, const RateSet& rs, double sigma,
                               MiniSlotConvention conv = MiniSlotConvention::kHighRateShortWait) {
  const double wait = mini_slot_term(mode, rs, sigma, conv);
  const double data = burst_exchange_time(mode, burst, phy, rs);
  if (mode_access == AccessMode::kBasic) {
    return wait + data + phy.difs;
  }
  return wait + phy.rts_time + phy.sifs + phy.cts_time + phy.sifs + data + phy.difs;
}

/// Duration of a mode-m collision.  Under RTS/CTS only the RTS is lost;
/// otherwise the lost airtime is the full burst (aggregate accounting) or
/// the unacknowledged first packet (packet-chain accounting).
inline double collision_duration(AccessMode mode_access, int mode, const BurstPolicy& burst,
                                 const PhyParams& phy, const RateSet& rs, double sigma,
                                 MiniSlotConvention conv = MiniSlotConvention::kHighRateShortWait) {
  const double wait = mini_slot_term(mode, rs, sigma, conv);
  if (mode_access == AccessMode::kRtsCts) {
    return wait + phy.rts_time + phy.difs;
  }
  const double lost = burst.accounting == BurstAccounting::kAggregate
                          ? burst.payload_bits(mode, rs)
                          : burst.base_payload_bits;
  return wait + header_time(mode, phy, rs) + lost / rs.rate(mode) + phy.difs;
}

}  // namespace rdcf
