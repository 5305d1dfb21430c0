#pragma once

#include <atomic>
#include <cstdio>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

namespace rdcf {

/// Fixed six-significant-digit formatting shared by all CSV output.
inline std::string fmt6(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct ReportRow {
  std::string scenario_id;
  std::string source;  // "analytic" | "simulated"
  double throughput_mbps = 0.0;
  double p_idle = 0.0;
  double collision_probability = 0.0;
  double collision_cost = 0.0;
  std::optional<double> relative_error;  // only for paired rows
};

inline void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << "scenario,source,throughput_mbps,p_idle,collision_probability,collision_cost,"
         "relative_error\n";
  for (const auto& r : rows) {
    out << r.scenario_id << ',' << r.source << ',' << fmt6(r.throughput_mbps) << ','
        << fmt6(r.p_idle) << ',' << fmt6(r.collision_probability) << ','
        << fmt6(r.collision_cost) << ',';
    if (r.relative_error) out << fmt6(*r.relative_error);
    out << '\n';
  }
}

struct ValidationRow {
  std::string scenario_id;
  double simulated_mbps = 0.0;
  double analytic_mbps = 0.0;
  double relative_error = 0.0;
  double spread_mbps = 0.0;  // max-min across seed replicates (0 for one run)
  bool over_gate = false;    // relative error above the 1.5% gate
};

inline void write_validation_csv(std::ostream& out, const std::vector<ValidationRow>& rows) {
  out << "scenario,simulated_mbps,analytic_mbps,relative_error,spread_mbps,over_gate\n";
  for (const auto& r : rows) {
    out << r.scenario_id << ',' << fmt6(r.simulated_mbps) << ',' << fmt6(r.analytic_mbps) << ','
        << fmt6(r.relative_error) << ',' << fmt6(r.spread_mbps) << ','
        << (r.over_gate ? "yes" : "no") << '\n';
  }
}

struct SweepRow {
  std::string axis;
  double value = 0.0;
  std::string strategy;
  std::string mode;
  std::string source;
  double throughput_mbps = 0.0;
  double p_idle = 0.0;
  double collision_probability = 0.0;
  double collision_cost = 0.0;
  double tau = 0.0;  // attempt probability used (solved or swept)
};

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "axis,value,strategy,mode,source,throughput_mbps,p_idle,collision_probability,"
         "collision_cost,tau\n";
  for (const auto& r : rows) {
    out << r.axis << ',' << fmt6(r.value) << ',' << r.strategy << ',' << r.mode << ','
        << r.source << ',' << fmt6(r.throughput_mbps) << ',' << fmt6(r.p_idle) << ','
        << fmt6(r.collision_probability) << ',' << fmt6(r.collision_cost) << ',' << fmt6(r.tau)
        << '\n';
  }
}

/// Run fn(0..count-1) on up to `jobs` threads; callers index into their own
/// output slots so assembly stays ordered.
inline void parallel_for_indexed(std::size_t count, unsigned jobs,
                                 const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const unsigned workers = std::min<std::size_t>(jobs, count);
  std::exception_ptr error;
  std::mutex error_mutex;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace rdcf
