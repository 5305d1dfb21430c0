#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "rdcf/model.hpp"
#include "rdcf/phy.hpp"
#include "rdcf/rng.hpp"

namespace rdcf {

// ---------------------------------------------------------------------------
// Strategies

enum class MacStrategyKind {
  kRdcf,     // rate-ranked mini slots, enlarged slot, rate-proportional burst
  kDcf,      // plain DCF, single packet
  kOarTxop,  // plain DCF contention, rate-proportional burst on win
  kRemedy,   // plain DCF, per-rate minimum contention window
};

struct MacStrategy {
  MacStrategyKind kind = MacStrategyKind::kRdcf;
  std::vector<int> remedy_cw;  // per-mode CW_min, used only by kRemedy

  /// Stock per-rate window map: rates grouped in quarters from the top,
  /// windows 8/16/32/64.  For the 802.11a set this pins {54,48}->8,
  /// {36,24}->16, {18,12}->32, {9,6}->64.
  static std::vector<int> default_remedy_map(const RateSet& rs) {
    const int m_count = rs.size();
    std::vector<int> cw(static_cast<std::size_t>(m_count));
    for (int m = 0; m < m_count; ++m) {
      const int quarter = m_count == 1 ? 3 : (m * 4) / m_count;  // 0 lowest .. 3 highest
      cw[static_cast<std::size_t>(m)] = 64 >> quarter;
    }
    return cw;
  }
};

/// When backoff counters of uninvolved stations move.
///   kEverySlot — one decrement per generic slot, busy or idle; the discrete
///     chain the analytic model describes.
///   kIdleSlotsOnly — decrements only on idle slots, counters frozen while
///     the channel is busy; the on-air protocol behavior.
enum class CounterPolicy { kEverySlot, kIdleSlotsOnly };

// ---------------------------------------------------------------------------
// Configuration and results

struct SimConfig {
  Population population;
  MacStrategy strategy;
  AccessMode access = AccessMode::kBasic;
  BackoffParams backoff;
  BurstPolicy burst;
  PhyParams phy;
  RateSet rates = RateSet::wifi_80211a();
  MiniSlotConvention convention = MiniSlotConvention::kHighRateShortWait;
  CounterPolicy counter_policy = CounterPolicy::kEverySlot;
  std::uint64_t seed = 1;
  long horizon_slots = 1'000'000;
};

struct SimResult {
  double throughput_bps = 0.0;
  double p_idle = 0.0;
  std::vector<double> p_succ;  // per mode, frequency over generic slots
  std::vector<double> p_coll;
  double collision_probability = 0.0;
  double collision_cost = 0.0;
  std::vector<double> station_payload_bits;
  long slots = 0;
  long idle_slots = 0;
  long success_slots = 0;
  long collision_slots = 0;
  double sim_time_s = 0.0;
  int n_stations = 0;
};

// ---------------------------------------------------------------------------
// Contention resolution

struct Candidate {
  int station = 0;
  int mode = 0;
};

enum class SlotKind { kIdle, kSuccess, kCollision };

struct Outcome {
  SlotKind kind = SlotKind::kIdle;
  int station = -1;  // winner, for kSuccess
  int mode = -1;     // success mode; collision mode (rate-aware: the top
                     // contended mode, others: the lowest rate involved)
};

/// Resolve one contention slot.  Rate-aware: the top-mode candidate wins
/// alone, ties at the top mode collide, lower modes defer either way.
/// Other strategies: everyone at counter zero transmits, so any two or more
/// candidates collide at the lowest involved rate.
inline Outcome contention_resolve(std::span<const Candidate> candidates, MacStrategyKind kind) {
  if (candidates.empty()) return Outcome{};
  if (candidates.size() == 1) {
    return Outcome{SlotKind::kSuccess, candidates[0].station, candidates[0].mode};
  }
  if (kind == MacStrategyKind::kRdcf) {
    int top = candidates[0].mode;
    for (const auto& c : candidates) top = std::max(top, c.mode);
    int holders = 0;
    int winner = -1;
    for (const auto& c : candidates) {
      if (c.mode == top) {
        ++holders;
        winner = c.station;
      }
    }
    if (holders == 1) return Outcome{SlotKind::kSuccess, winner, top};
    return Outcome{SlotKind::kCollision, -1, top};
  }
  int lowest = candidates[0].mode;
  for (const auto& c : candidates) lowest = std::min(lowest, c.mode);
  return Outcome{SlotKind::kCollision, -1, lowest};
}

// ---------------------------------------------------------------------------
// Simulator

class SlotSimulator {
 public:
  struct Station {
    int stage = 0;
    long counter = 0;
    int mode = 0;
    int fixed_mode = -1;  // >= 0 pins the mode, no redraw
    std::vector<double> cdf;
    Xoshiro256 rng;
    double payload_bits = 0.0;
    long attempts = 0;
    long successes = 0;
    long failures = 0;  // actual and virtual collisions
  };

  explicit SlotSimulator(SimConfig config) : cfg_(std::move(config)) {
    validate_population(cfg_.population);
    cfg_.backoff.validate();
    cfg_.phy.validate();
    if (cfg_.horizon_slots < 1) throw std::invalid_argument("simulate: horizon must be positive");
    const int m_count = cfg_.rates.size();
    if (population_modes(cfg_.population) != m_count)
      throw std::invalid_argument("simulate: population and rate set disagree on mode count");

    if (cfg_.strategy.kind == MacStrategyKind::kRemedy && cfg_.strategy.remedy_cw.empty())
      cfg_.strategy.remedy_cw = MacStrategy::default_remedy_map(cfg_.rates);
    if (cfg_.strategy.kind == MacStrategyKind::kRemedy &&
        static_cast<int>(cfg_.strategy.remedy_cw.size()) != m_count)
      throw std::invalid_argument("simulate: remedy window map size mismatch");

    sigma_ = cfg_.strategy.kind == MacStrategyKind::kRdcf ? enlarged_slot(cfg_.rates, cfg_.phy)
                                                          : cfg_.phy.slot_base;
    build_durations();

    const General gen = to_general(cfg_.population);
    const bool fixed_rates = std::holds_alternative<FixedRateGroups>(cfg_.population);
    stations_.resize(gen.stations.size());
    for (std::size_t i = 0; i < stations_.size(); ++i) {
      Station& st = stations_[i];
      st.rng = Xoshiro256(cfg_.seed, static_cast<std::uint64_t>(i));
      const auto& probs = gen.stations[i].probs;
      st.cdf.resize(probs.size());
      double acc = 0.0;
      for (std::size_t m = 0; m < probs.size(); ++m) {
        acc += probs[m];
        st.cdf[m] = acc;
      }
      st.cdf.back() = 1.0;
      if (fixed_rates) {
        for (std::size_t m = 0; m < probs.size(); ++m)
          if (probs[m] == 1.0) st.fixed_mode = static_cast<int>(m);
      }
      redraw(st, true);
    }

    succ_count_.assign(static_cast<std::size_t>(m_count), 0);
    coll_count_.assign(static_cast<std::size_t>(m_count), 0);
  }

  /// Advance one generic slot (or a run of idle slots, which is equivalent
  /// slot by slot).
  void step() {
    long min_counter = stations_[0].counter;
    for (const Station& st : stations_) min_counter = std::min(min_counter, st.counter);
    if (min_counter > 0) {
      const long remaining = std::max<long>(cfg_.horizon_slots - slots_, 1);
      const long run = std::min<long>(min_counter, remaining);
      for (Station& st : stations_) st.counter -= run;
      slots_ += run;
      idle_slots_ += run;
      time_ += run * sigma_;
      return;
    }

    candidates_.clear();
    for (std::size_t i = 0; i < stations_.size(); ++i) {
      if (stations_[i].counter == 0)
        candidates_.push_back(Candidate{static_cast<int>(i), stations_[i].mode});
    }
    const Outcome out = contention_resolve(candidates_, cfg_.strategy.kind);

    if (out.kind == SlotKind::kSuccess) {
      Station& winner = stations_[static_cast<std::size_t>(out.station)];
      winner.payload_bits += payload_bits_[static_cast<std::size_t>(out.mode)];
      ++winner.successes;
      ++succ_count_[static_cast<std::size_t>(out.mode)];
      ++success_slots_;
      time_ += succ_time_[static_cast<std::size_t>(out.mode)];
    } else {
      ++coll_count_[static_cast<std::size_t>(out.mode)];
      ++collision_slots_;
      time_ += coll_time_[static_cast<std::size_t>(out.mode)];
      collision_time_ += coll_time_[static_cast<std::size_t>(out.mode)];
    }

    for (const Candidate& c : candidates_) {
      Station& st = stations_[static_cast<std::size_t>(c.station)];
      const bool won = out.kind == SlotKind::kSuccess && c.station == out.station;
      ++st.attempts;
      if (!won) ++st.failures;
      redraw(st, won);
    }
    if (cfg_.counter_policy == CounterPolicy::kEverySlot) {
      for (Station& st : stations_) {
        if (st.counter > 0) --st.counter;
      }
    }
    ++slots_;
  }

  SimResult run() {
    while (slots_ < cfg_.horizon_slots) step();
    return result();
  }

  SimResult result() const {
    SimResult r;
    r.n_stations = static_cast<int>(stations_.size());
    r.slots = slots_;
    r.idle_slots = idle_slots_;
    r.success_slots = success_slots_;
    r.collision_slots = collision_slots_;
    r.sim_time_s = time_;
    r.p_idle = static_cast<double>(idle_slots_) / slots_;
    r.p_succ.resize(succ_count_.size());
    r.p_coll.resize(coll_count_.size());
    for (std::size_t m = 0; m < succ_count_.size(); ++m) {
      r.p_succ[m] = static_cast<double>(succ_count_[m]) / slots_;
      r.p_coll[m] = static_cast<double>(coll_count_[m]) / slots_;
      r.collision_probability += r.p_coll[m];
    }
    r.collision_cost = collision_time_ / slots_ / sigma_;
    double total_payload = 0.0;
    for (const Station& st : stations_) {
      r.station_payload_bits.push_back(st.payload_bits);
      total_payload += st.payload_bits;
    }
    r.throughput_bps = total_payload / time_;
    return r;
  }

  std::vector<Station>& stations() { return stations_; }
  double sigma() const { return sigma_; }
  long window_for(const Station& st) const { return window(st); }

 private:
  void build_durations() {
    const int m_count = cfg_.rates.size();
    succ_time_.resize(static_cast<std::size_t>(m_count));
    coll_time_.resize(static_cast<std::size_t>(m_count));
    payload_bits_.resize(static_cast<std::size_t>(m_count));
    const bool burst_on_win = cfg_.strategy.kind == MacStrategyKind::kRdcf ||
                              cfg_.strategy.kind == MacStrategyKind::kOarTxop;
    for (int m = 0; m < m_count; ++m) {
      BurstPolicy per_mode = cfg_.burst;
      if (!burst_on_win) per_mode.base_rate_index = m;  // single packet at own rate
      payload_bits_[static_cast<std::size_t>(m)] = per_mode.payload_bits(m, cfg_.rates);

      if (cfg_.strategy.kind == MacStrategyKind::kRdcf) {
        succ_time_[static_cast<std::size_t>(m)] = success_duration(
            cfg_.access, m, per_mode, cfg_.phy, cfg_.rates, sigma_, cfg_.convention);
        coll_time_[static_cast<std::size_t>(m)] = collision_duration(
            cfg_.access, m, per_mode, cfg_.phy, cfg_.rates, sigma_, cfg_.convention);
      } else {
        // Baselines have no mini-slot wait.  A collision burns one base
        // packet at the lowest rate involved (the winner-only burst of
        // OAR/TXOP is never granted).
        const double data = burst_exchange_time(m, per_mode, cfg_.phy, cfg_.rates);
        const double lost = header_time(m, cfg_.phy, cfg_.rates) +
                            cfg_.burst.base_payload_bits / cfg_.rates.rate(m);
        if (cfg_.access == AccessMode::kBasic) {
          succ_time_[static_cast<std::size_t>(m)] = data + cfg_.phy.difs;
          coll_time_[static_cast<std::size_t>(m)] = lost + cfg_.phy.difs;
        } else {
          succ_time_[static_cast<std::size_t>(m)] = cfg_.phy.rts_time + cfg_.phy.sifs +
                                                    cfg_.phy.cts_time + cfg_.phy.sifs + data +
                                                    cfg_.phy.difs;
          coll_time_[static_cast<std::size_t>(m)] = cfg_.phy.rts_time + cfg_.phy.difs;
        }
      }
    }
  }

  long window(const Station& st) const {
    int cw_min = cfg_.backoff.cw_min;
    if (cfg_.strategy.kind == MacStrategyKind::kRemedy)
      cw_min = cfg_.strategy.remedy_cw[static_cast<std::size_t>(st.mode)];
    const double w = std::pow(cfg_.backoff.r, st.stage) * cw_min;
    return std::max<long>(1, static_cast<long>(std::ceil(w - 1e-12)));
  }

  void redraw(Station& st, bool success) {
    if (!success) st.stage = std::min(st.stage + 1, cfg_.backoff.b_max);
    else st.stage = 0;
    if (st.fixed_mode >= 0) {
      st.mode = st.fixed_mode;
    } else {
      const double u = st.rng.uniform();
      st.mode = static_cast<int>(std::lower_bound(st.cdf.begin(), st.cdf.end(), u) -
                                 st.cdf.begin());
    }
    st.counter = static_cast<long>(st.rng.below(static_cast<std::uint64_t>(window(st))));
  }

  SimConfig cfg_;
  double sigma_ = 0.0;
  std::vector<Station> stations_;
  std::vector<Candidate> candidates_;
  std::vector<double> succ_time_, coll_time_, payload_bits_;
  std::vector<long> succ_count_, coll_count_;
  long slots_ = 0, idle_slots_ = 0, success_slots_ = 0, collision_slots_ = 0;
  double time_ = 0.0, collision_time_ = 0.0;
};

inline SimResult simulate(const SimConfig& config) { return SlotSimulator(config).run(); }

// ---------------------------------------------------------------------------
// Side-by-side comparison with the analytic model

struct ValidationComparison {
  double simulated_bps = 0.0;
  double analytic_bps = 0.0;
  double relative_error = 0.0;  // |S - A| / A
  double delta_p_idle = 0.0;
  double delta_collision_probability = 0.0;
  double delta_collision_cost = 0.0;
};

inline ValidationComparison empirical_report(const SimResult& sim, const ThroughputReport& analytic) {
  if (sim.slots <= 0) throw std::invalid_argument("empirical_report: no simulated slots");
  if (sim.p_succ.size() != analytic.p_succ.size())
    throw std::invalid_argument("empirical_report: scenario mismatch (mode counts differ)");
  ValidationComparison cmp;
  cmp.simulated_bps = sim.throughput_bps;
  cmp.analytic_bps = analytic.throughput_bps;
  cmp.relative_error = std::abs(sim.throughput_bps - analytic.throughput_bps) /
                       analytic.throughput_bps;
  cmp.delta_p_idle = sim.p_idle - analytic.p_idle;
  cmp.delta_collision_probability = sim.collision_probability - analytic.collision_probability;
  cmp.delta_collision_cost = sim.collision_cost - analytic.collision_cost;
  return cmp;
}

}  // namespace rdcf
