#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rdcf/model.hpp"
#include "rdcf/phy.hpp"
#include "rdcf/simulator.hpp"

namespace rdcf {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One experiment scenario as read from a config file.  Units in the file
/// are Mbps, bytes and microseconds; everything is converted to SI here.
struct ScenarioConfig {
  std::string id;
  AccessMode access = AccessMode::kBasic;
  RateSet rates = RateSet::wifi_80211a();
  Population population = Homogeneous{10, canonical_distribution(DistributionKind::kEqual,
                                                                 RateSet::wifi_80211a())};
  double packet_bytes = 2312.0;
  BackoffParams backoff;
  MacStrategy strategy;
  MiniSlotConvention convention = MiniSlotConvention::kHighRateShortWait;
  BurstAccounting accounting = BurstAccounting::kPacketChain;
  MacHeaderRate header_rate = MacHeaderRate::kDataRate;
  CounterPolicy counter_policy = CounterPolicy::kEverySlot;
  std::uint64_t seed = 1;
  long horizon_slots = 1'000'000;
  std::vector<MacStrategyKind> sweep_strategies;  // optional, for sweeps

  PhyParams phy_params() const {
    PhyParams phy;
    phy.mac_header_rate = header_rate;
    return phy;
  }

  BurstPolicy burst_policy() const {
    BurstPolicy burst;
    burst.base_payload_bits = packet_bytes * 8.0;
    burst.accounting = accounting;
    return burst;
  }

  SimConfig sim_config() const {
    SimConfig cfg;
    cfg.population = population;
    cfg.strategy = strategy;
    cfg.access = access;
    cfg.backoff = backoff;
    cfg.burst = burst_policy();
    cfg.phy = phy_params();
    cfg.rates = rates;
    cfg.convention = convention;
    cfg.counter_policy = counter_policy;
    cfg.seed = seed;
    cfg.horizon_slots = horizon_slots;
    return cfg;
  }
};

namespace detail {

inline MacStrategyKind parse_strategy(const std::string& s, const std::string& where) {
  if (s == "rdcf") return MacStrategyKind::kRdcf;
  if (s == "dcf") return MacStrategyKind::kDcf;
  if (s == "oar_txop") return MacStrategyKind::kOarTxop;
  if (s == "remedy") return MacStrategyKind::kRemedy;
  throw ConfigError(where + ": unknown strategy '" + s + "'");
}

inline const char* strategy_name(MacStrategyKind kind) {
  switch (kind) {
    case MacStrategyKind::kRdcf: return "rdcf";
    case MacStrategyKind::kDcf: return "dcf";
    case MacStrategyKind::kOarTxop: return "oar_txop";
    case MacStrategyKind::kRemedy: return "remedy";
  }
  return "rdcf";
}

inline Population parse_population(const nlohmann::json& j, const RateSet& rates,
                                   const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": population must be an object");
  const std::string kind = j.value("kind", "homogeneous");
  const int m_count = rates.size();
  try {
    if (kind == "homogeneous") {
      const int n = j.at("n").get<int>();
      if (n < 1) throw ConfigError(where + ": n must be >= 1");
      RateDistribution dist;
      if (j.contains("probs")) {
        dist = RateDistribution::normalized(j.at("probs").get<std::vector<double>>());
      } else {
        const std::string name = j.value("dist", "equal");
        DistributionKind dk = DistributionKind::kEqual;
        if (name == "equal") dk = DistributionKind::kEqual;
        else if (name == "proportional") dk = DistributionKind::kProportional;
        else if (name == "inverse") dk = DistributionKind::kInverse;
        else throw ConfigError(where + ": unknown dist '" + name + "'");
        dist = canonical_distribution(dk, rates);
      }
      if (dist.modes() != m_count)
        throw ConfigError(where + ": probs length must match the rate set");
      return Homogeneous{n, dist};
    }
    if (kind == "fixed_rate") {
      auto sizes = j.at("group_sizes").get<std::vector<int>>();
      if (static_cast<int>(sizes.size()) != m_count)
        throw ConfigError(where + ": group_sizes length must match the rate set");
      FixedRateGroups groups{sizes};
      if (j.contains("n") && j.at("n").get<int>() != groups.total())
        throw ConfigError(where + ": group_sizes sum does not match n");
      return groups;
    }
    if (kind == "general") {
      General gen;
      for (const auto& row : j.at("rows")) {
        gen.stations.push_back(RateDistribution::normalized(row.get<std::vector<double>>()));
        if (gen.stations.back().modes() != m_count)
          throw ConfigError(where + ": row length must match the rate set");
      }
      if (gen.stations.empty()) throw ConfigError(where + ": general population needs rows");
      return gen;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
  throw ConfigError(where + ": unknown population kind '" + kind + "'");
}

}  // namespace detail

inline MiniSlotConvention parse_convention(const std::string& s) {
  if (s == "eq1") return MiniSlotConvention::kHighRateShortWait;
  if (s == "eq11") return MiniSlotConvention::kLowRateShortWait;
  throw ConfigError("unknown mini-slot convention '" + s + "' (expected eq1 or eq11)");
}

inline ScenarioConfig parse_scenario(const nlohmann::json& j, const std::string& where,
                                     int index) {
  if (!j.is_object()) throw ConfigError(where + ": scenario must be an object");
  ScenarioConfig sc;
  try {
    sc.id = j.value("id", "scenario" + std::to_string(index));
    if (j.contains("rates_mbps")) {
      auto mbps = j.at("rates_mbps").get<std::vector<double>>();
      for (double& r : mbps) r *= 1e6;
      sc.rates = RateSet(std::move(mbps));
    }
    const std::string mode = j.value("access_mode", "basic");
    if (mode == "basic") sc.access = AccessMode::kBasic;
    else if (mode == "rts_cts") sc.access = AccessMode::kRtsCts;
    else throw ConfigError(where + ": unknown access_mode '" + mode + "'");

    if (j.contains("population"))
      sc.population = detail::parse_population(j.at("population"), sc.rates, where);
    else
      sc.population = Homogeneous{10, canonical_distribution(DistributionKind::kEqual, sc.rates)};

    sc.packet_bytes = j.value("packet_bytes", 2312.0);
    if (!(sc.packet_bytes > 0)) throw ConfigError(where + ": packet_bytes must be positive");

    if (j.contains("backoff")) {
      const auto& b = j.at("backoff");
      sc.backoff.cw_min = b.value("cw_min", 16);
      sc.backoff.r = b.value("r", 2.0);
      sc.backoff.b_max = b.value("b", 6);
    }
    sc.strategy.kind = detail::parse_strategy(j.value("strategy", "rdcf"), where);
    if (j.contains("remedy_cw"))
      sc.strategy.remedy_cw = j.at("remedy_cw").get<std::vector<int>>();
    if (j.contains("strategies")) {
      for (const auto& s : j.at("strategies"))
        sc.sweep_strategies.push_back(detail::parse_strategy(s.get<std::string>(), where));
    }

    sc.convention = parse_convention(j.value("mini_slot_convention", "eq1"));
    const std::string acc = j.value("burst_accounting", "packet_chain");
    if (acc == "packet_chain") sc.accounting = BurstAccounting::kPacketChain;
    else if (acc == "aggregate") sc.accounting = BurstAccounting::kAggregate;
    else throw ConfigError(where + ": unknown burst_accounting '" + acc + "'");
    const std::string hdr = j.value("mac_header_rate", "data");
    if (hdr == "data") sc.header_rate = MacHeaderRate::kDataRate;
    else if (hdr == "control") sc.header_rate = MacHeaderRate::kControlRate;
    else throw ConfigError(where + ": unknown mac_header_rate '" + hdr + "'");
    const std::string cp = j.value("counter_policy", "per_slot");
    if (cp == "per_slot") sc.counter_policy = CounterPolicy::kEverySlot;
    else if (cp == "idle_only") sc.counter_policy = CounterPolicy::kIdleSlotsOnly;
    else throw ConfigError(where + ": unknown counter_policy '" + cp + "'");

    sc.seed = j.value("seed", std::uint64_t{1});
    sc.horizon_slots = j.value("horizon_slots", 1'000'000L);
    if (sc.horizon_slots < 10'000)
      throw ConfigError(where + ": horizon_slots must be at least 10000");

    sc.backoff.validate();
    validate_population(sc.population);
    if (population_modes(sc.population) != sc.rates.size())
      throw ConfigError(where + ": population and rate set disagree on mode count");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return sc;
}

/// Parse a config document: {"scenarios": [...]}.
inline std::vector<ScenarioConfig> parse_config(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("scenarios"))
    throw ConfigError("config must be an object with a 'scenarios' array");
  const auto& list = doc.at("scenarios");
  if (!list.is_array() || list.empty()) throw ConfigError("no scenarios");
  std::vector<ScenarioConfig> out;
  int index = 0;
  for (const auto& j : list) {
    out.push_back(parse_scenario(j, "scenarios[" + std::to_string(index) + "]", index));
    ++index;
  }
  return out;
}

/// Serialize back to the file schema (normalized form).
inline nlohmann::json scenario_to_json(const ScenarioConfig& sc) {
  nlohmann::json j;
  j["id"] = sc.id;
  j["access_mode"] = sc.access == AccessMode::kBasic ? "basic" : "rts_cts";
  std::vector<double> mbps;
  for (double r : sc.rates.rates()) mbps.push_back(r / 1e6);
  j["rates_mbps"] = mbps;
  nlohmann::json pop;
  if (const auto* h = std::get_if<Homogeneous>(&sc.population)) {
    pop["kind"] = "homogeneous";
    pop["n"] = h->n_stations;
    pop["probs"] = h->dist.probs;
  } else if (const auto* g = std::get_if<FixedRateGroups>(&sc.population)) {
    pop["kind"] = "fixed_rate";
    pop["group_sizes"] = g->group_sizes;
  } else {
    pop["kind"] = "general";
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& d : std::get<General>(sc.population).stations) rows.push_back(d.probs);
    pop["rows"] = rows;
  }
  j["population"] = pop;
  j["packet_bytes"] = sc.packet_bytes;
  j["backoff"] = {{"cw_min", sc.backoff.cw_min}, {"r", sc.backoff.r}, {"b", sc.backoff.b_max}};
  j["strategy"] = detail::strategy_name(sc.strategy.kind);
  if (!sc.strategy.remedy_cw.empty()) j["remedy_cw"] = sc.strategy.remedy_cw;
  if (!sc.sweep_strategies.empty()) {
    nlohmann::json arr = nlohmann::json::array();
    for (auto k : sc.sweep_strategies) arr.push_back(detail::strategy_name(k));
    j["strategies"] = arr;
  }
  j["mini_slot_convention"] =
      sc.convention == MiniSlotConvention::kHighRateShortWait ? "eq1" : "eq11";
  j["burst_accounting"] =
      sc.accounting == BurstAccounting::kPacketChain ? "packet_chain" : "aggregate";
  j["mac_header_rate"] = sc.header_rate == MacHeaderRate::kDataRate ? "data" : "control";
  j["counter_policy"] = sc.counter_policy == CounterPolicy::kEverySlot ? "per_slot" : "idle_only";
  j["seed"] = sc.seed;
  j["horizon_slots"] = sc.horizon_slots;
  return j;
}

inline std::string serialize_config(const std::vector<ScenarioConfig>& scenarios) {
  nlohmann::json doc;
  doc["scenarios"] = nlohmann::json::array();
  for (const auto& sc : scenarios) doc["scenarios"].push_back(scenario_to_json(sc));
  return doc.dump(2);
}

}  // namespace rdcf
