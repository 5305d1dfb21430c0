// rdcf — multi-rate 802.11 MAC laboratory: analytic model, slot simulator,
// and backoff optimizer behind one experiment runner.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rdcf/config.hpp"
#include "rdcf/model.hpp"
#include "rdcf/optimizer.hpp"
#include "rdcf/report.hpp"
#include "rdcf/simulator.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitGateFailure = 1;
constexpr int kExitInputError = 2;
constexpr int kExitNoConvergence = 3;
constexpr double kValidationGate = 0.015;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<long> horizon;
  unsigned jobs = 1;
  std::string out_path;  // empty -> stdout
  std::string convention;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw rdcf::ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<rdcf::ScenarioConfig> load_scenarios(const CommonOptions& opt) {
  auto scenarios = rdcf::parse_config(read_file(opt.config_path));
  if (opt.horizon && *opt.horizon < 10'000)
    throw rdcf::ConfigError("--horizon must be at least 10000 generic slots");
  for (auto& sc : scenarios) {
    if (opt.seed) sc.seed = *opt.seed;
    if (opt.horizon) sc.horizon_slots = *opt.horizon;
    if (!opt.convention.empty()) sc.convention = rdcf::parse_convention(opt.convention);
  }
  return scenarios;
}

class OutputSink {
 public:
  explicit OutputSink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw rdcf::ConfigError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

rdcf::ThroughputReport analyze_scenario(const rdcf::ScenarioConfig& sc) {
  if (sc.strategy.kind != rdcf::MacStrategyKind::kRdcf)
    throw rdcf::ConfigError("scenario '" + sc.id +
                            "': the analytic model covers the rate-aware strategy only");
  try {
    return rdcf::analyze(sc.population, sc.backoff, sc.access, sc.burst_policy(),
                         sc.phy_params(), sc.rates, sc.convention);
  } catch (const rdcf::NonConvergenceError& e) {
    throw rdcf::NonConvergenceError("scenario '" + sc.id + "': " + e.what(), e.residual,
                                    e.iterations);
  }
}

rdcf::ReportRow row_from_analytic(const rdcf::ScenarioConfig& sc,
                                  const rdcf::ThroughputReport& rep) {
  rdcf::ReportRow row;
  row.scenario_id = sc.id;
  row.source = "analytic";
  row.throughput_mbps = rep.throughput_bps / 1e6;
  row.p_idle = rep.p_idle;
  row.collision_probability = rep.collision_probability;
  row.collision_cost = rep.collision_cost;
  return row;
}

rdcf::ReportRow row_from_sim(const rdcf::ScenarioConfig& sc, const rdcf::SimResult& res) {
  rdcf::ReportRow row;
  row.scenario_id = sc.id;
  row.source = "simulated";
  row.throughput_mbps = res.throughput_bps / 1e6;
  row.p_idle = res.p_idle;
  row.collision_probability = res.collision_probability;
  row.collision_cost = res.collision_cost;
  return row;
}

int run_report_command(const CommonOptions& opt, bool simulated) {
  auto scenarios = load_scenarios(opt);
  std::vector<rdcf::ReportRow> rows(scenarios.size());
  rdcf::parallel_for_indexed(scenarios.size(), opt.jobs, [&](std::size_t i) {
    if (simulated) {
      rows[i] = row_from_sim(scenarios[i], rdcf::simulate(scenarios[i].sim_config()));
    } else {
      rows[i] = row_from_analytic(scenarios[i], analyze_scenario(scenarios[i]));
    }
  });
  OutputSink sink(opt.out_path);
  rdcf::write_report_csv(sink.stream(), rows);
  return kExitOk;
}

int run_validate(const CommonOptions& opt, int replicates) {
  auto scenarios = load_scenarios(opt);
  std::vector<rdcf::ValidationRow> rows(scenarios.size());
  rdcf::parallel_for_indexed(scenarios.size(), opt.jobs, [&](std::size_t i) {
    const auto& sc = scenarios[i];
    const auto analytic = analyze_scenario(sc);
    auto cfg = sc.sim_config();
    const auto sim = rdcf::simulate(cfg);
    const auto cmp = rdcf::empirical_report(sim, analytic);
    rdcf::ValidationRow row;
    row.scenario_id = sc.id;
    row.simulated_mbps = cmp.simulated_bps / 1e6;
    row.analytic_mbps = cmp.analytic_bps / 1e6;
    row.relative_error = cmp.relative_error;
    row.over_gate = cmp.relative_error > kValidationGate;
    if (replicates > 1) {
      double lo = sim.throughput_bps, hi = sim.throughput_bps;
      for (int rep = 1; rep < replicates; ++rep) {
        cfg.seed = sc.seed + static_cast<std::uint64_t>(rep);
        const double s = rdcf::simulate(cfg).throughput_bps;
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
      row.spread_mbps = (hi - lo) / 1e6;
    }
    rows[i] = row;
  });
  OutputSink sink(opt.out_path);
  rdcf::write_validation_csv(sink.stream(), rows);
  bool gate_failed = false;
  for (const auto& row : rows) gate_failed = gate_failed || row.over_gate;
  return gate_failed ? kExitGateFailure : kExitOk;
}

std::vector<int> parse_n_values(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    const auto colon = token.find(':');
    if (colon == std::string::npos) {
      out.push_back(std::stoi(token));
      continue;
    }
    // lo:hi[:step]
    const auto rest = token.substr(colon + 1);
    const auto colon2 = rest.find(':');
    const int lo = std::stoi(token.substr(0, colon));
    const int hi = std::stoi(colon2 == std::string::npos ? rest : rest.substr(0, colon2));
    const int step = colon2 == std::string::npos ? 1 : std::stoi(rest.substr(colon2 + 1));
    if (step < 1 || hi < lo) throw rdcf::ConfigError("bad range '" + token + "'");
    for (int n = lo; n <= hi; n += step) out.push_back(n);
  }
  if (out.empty()) throw rdcf::ConfigError("empty n-value list");
  return out;
}

int run_optimize(const CommonOptions& opt, const std::string& n_spec,
                 const std::string& table_path) {
  auto scenarios = load_scenarios(opt);
  const auto& sc = scenarios.front();
  const auto* hom = std::get_if<rdcf::Homogeneous>(&sc.population);
  if (!hom)
    throw rdcf::ConfigError("optimize requires a homogeneous population scenario");
  const auto n_values = parse_n_values(n_spec);

  const auto burst = sc.burst_policy();
  const auto phy = sc.phy_params();
  const auto table = rdcf::build_offline_table(n_values, hom->dist, burst, phy, sc.rates,
                                               {sc.access}, sc.convention, sc.backoff.b_max);
  {
    OutputSink table_sink(table_path);
    rdcf::write_backoff_table_csv(table_sink.stream(), table);
  }

  // Comparison per network size: ceiling, tuned simulation, stock
  // parameters, and the plain-DCF baseline.
  std::vector<std::string> lines(table.size());
  rdcf::parallel_for_indexed(table.size(), opt.jobs, [&](std::size_t i) {
    const auto& row = table[i];
    rdcf::Population pop = rdcf::Homogeneous{row.n, hom->dist};

    auto cfg = sc.sim_config();
    cfg.population = pop;
    cfg.backoff = rdcf::BackoffParams{row.cw_min, row.r_app, row.b};
    const double tuned = rdcf::simulate(cfg).throughput_bps;

    cfg.backoff = sc.backoff;
    const double stock = rdcf::simulate(cfg).throughput_bps;

    cfg.strategy.kind = rdcf::MacStrategyKind::kDcf;
    const double dcf = rdcf::simulate(cfg).throughput_bps;

    const double s_max =
        rdcf::throughput_at_tau(row.tau_star, row.n, hom->dist, sc.access, burst, phy, sc.rates,
                                sc.convention);
    std::ostringstream line;
    line << row.n << ',' << rdcf::access_mode_name(row.access) << ',' << rdcf::fmt6(s_max / 1e6)
         << ',' << rdcf::fmt6(tuned / 1e6) << ',' << rdcf::fmt6(stock / 1e6) << ','
         << rdcf::fmt6(dcf / 1e6) << '\n';
    lines[i] = line.str();
  });

  OutputSink sink(opt.out_path);
  sink.stream() << "n,mode,s_max_mbps,tuned_mbps,standard_mbps,dcf_mbps\n";
  for (const auto& line : lines) sink.stream() << line;
  return kExitOk;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) out.push_back(std::stod(token));
  if (out.empty()) throw rdcf::ConfigError("empty value list");
  return out;
}

int run_sweep(const CommonOptions& opt, const std::string& axis, const std::string& values_spec) {
  auto scenarios = load_scenarios(opt);
  const auto& sc = scenarios.front();
  const auto values = parse_values(values_spec);
  std::vector<rdcf::MacStrategyKind> strategies = sc.sweep_strategies;
  if (strategies.empty()) strategies.push_back(sc.strategy.kind);
  const auto* hom = std::get_if<rdcf::Homogeneous>(&sc.population);
  const std::string mode_name = rdcf::access_mode_name(sc.access);

  if ((axis == "tau" || axis == "packet_bytes" || axis == "n") && !hom)
    throw rdcf::ConfigError("sweep axis '" + axis + "' requires a homogeneous population");

  std::vector<std::vector<rdcf::SweepRow>> buckets(values.size());
  rdcf::parallel_for_indexed(values.size(), opt.jobs, [&](std::size_t i) {
    const double value = values[i];
    auto& rows = buckets[i];
    if (axis == "tau") {
      if (!(value > 0.0 && value <= 1.0)) throw rdcf::ConfigError("tau values must be in (0,1]");
      const auto sp = rdcf::detail::slot_probs_homogeneous(value, hom->n_stations, hom->dist);
      const auto rep = rdcf::throughput(sp, sc.access, sc.burst_policy(), sc.phy_params(),
                                        sc.rates, sc.convention);
      rows.push_back({axis, value, "rdcf", mode_name, "analytic", rep.throughput_bps / 1e6,
                      rep.p_idle, rep.collision_probability, rep.collision_cost, value});
      return;
    }
    if (axis == "packet_bytes") {
      auto burst = sc.burst_policy();
      burst.base_payload_bits = value * 8.0;
      const auto optpt = rdcf::optimal_tau(hom->n_stations, hom->dist, sc.access, burst,
                                           sc.phy_params(), sc.rates, sc.convention);
      const auto sp =
          rdcf::detail::slot_probs_homogeneous(optpt.tau_star, hom->n_stations, hom->dist);
      const auto rep =
          rdcf::throughput(sp, sc.access, burst, sc.phy_params(), sc.rates, sc.convention);
      rows.push_back({axis, value, "rdcf", mode_name, "analytic", rep.throughput_bps / 1e6,
                      rep.p_idle, rep.collision_probability, rep.collision_cost, optpt.tau_star});
      return;
    }

    rdcf::ScenarioConfig point = sc;
    if (axis == "n") {
      point.population = rdcf::Homogeneous{static_cast<int>(value), hom->dist};
    } else if (axis == "cw_min") {
      point.backoff.cw_min = static_cast<int>(value);
    } else {
      throw rdcf::ConfigError("unknown sweep axis '" + axis + "'");
    }
    for (auto kind : strategies) {
      point.strategy.kind = kind;
      const std::string strategy_name = rdcf::detail::strategy_name(kind);
      if (kind == rdcf::MacStrategyKind::kRdcf) {
        const auto rep = analyze_scenario(point);
        const auto sol = rdcf::solve_fixed_point(point.population, point.backoff);
        const double tau = sol.tau.size() == 1 ? sol.tau[0] : 0.0;
        rows.push_back({axis, value, strategy_name, mode_name, "analytic",
                        rep.throughput_bps / 1e6, rep.p_idle, rep.collision_probability,
                        rep.collision_cost, tau});
      }
      const auto res = rdcf::simulate(point.sim_config());
      rows.push_back({axis, value, strategy_name, mode_name, "simulated",
                      res.throughput_bps / 1e6, res.p_idle, res.collision_probability,
                      res.collision_cost, 0.0});
    }
  });

  std::vector<rdcf::SweepRow> rows;
  for (auto& bucket : buckets)
    for (auto& row : bucket) rows.push_back(std::move(row));
  OutputSink sink(opt.out_path);
  rdcf::write_sweep_csv(sink.stream(), rows);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-rate 802.11 MAC laboratory: analysis, simulation, optimization"};
  app.require_subcommand(1);

  CommonOptions opt;
  int replicates = 1;
  std::string axis, values_spec, n_spec = "5,10,15,20,30,40,50,60,70,80,90,100";
  std::string table_path;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", opt.config_path, "scenario config (JSON)")->required();
    cmd->add_option("--seed", opt.seed, "override the per-scenario RNG seed");
    cmd->add_option("--horizon", opt.horizon, "override the simulated generic-slot horizon");
    cmd->add_option("--jobs", opt.jobs, "concurrent scenario evaluations")->default_val(1u);
    cmd->add_option("--out", opt.out_path, "output CSV path (default stdout)");
    cmd->add_option("--convention", opt.convention,
                    "mini-slot accounting: eq1 (high rate waits least) or eq11");
  };

  auto* analyze_cmd = app.add_subcommand("analyze", "solve the analytic model per scenario");
  add_common(analyze_cmd);
  auto* simulate_cmd = app.add_subcommand("simulate", "run the slot simulator per scenario");
  add_common(simulate_cmd);
  auto* validate_cmd =
      app.add_subcommand("validate", "run both paths and report relative errors");
  add_common(validate_cmd);
  validate_cmd->add_option("--replicates", replicates,
                           "extra seeds per scenario; reports the throughput spread");
  auto* optimize_cmd =
      app.add_subcommand("optimize", "build the offline backoff table and comparison report");
  add_common(optimize_cmd);
  optimize_cmd->add_option("--n", n_spec, "network sizes: comma list and lo:hi[:step] ranges");
  optimize_cmd->add_option("--table-out", table_path, "offline table CSV path (default stdout)");
  auto* sweep_cmd = app.add_subcommand("sweep", "long-format CSV over one experiment axis");
  add_common(sweep_cmd);
  sweep_cmd->add_option("--axis", axis, "n | cw_min | tau | packet_bytes")->required();
  sweep_cmd->add_option("--values", values_spec, "comma-separated axis values")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze_cmd->parsed()) return run_report_command(opt, false);
    if (simulate_cmd->parsed()) return run_report_command(opt, true);
    if (validate_cmd->parsed()) return run_validate(opt, replicates);
    if (optimize_cmd->parsed()) return run_optimize(opt, n_spec, table_path);
    if (sweep_cmd->parsed()) return run_sweep(opt, axis, values_spec);
  } catch (const rdcf::NonConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoConvergence;
  } catch (const rdcf::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitOk;
}
