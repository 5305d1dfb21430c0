#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rdcf/model.hpp"
#include "rdcf/phy.hpp"

namespace rdcf {

struct OptimalOperatingPoint {
  double tau_star = 0.0;
  double f_star = 0.0;
  double s_max_bps = 0.0;
  AccessMode access = AccessMode::kBasic;
  int n_stations = 0;
  RateDistribution dist;
  double base_payload_bits = 0.0;
};

/// Homogeneous throughput as a function of the attempt probability alone.
inline double throughput_at_tau(double tau, int n_stations, const RateDistribution& dist,
                                AccessMode access, const BurstPolicy& burst, const PhyParams& phy,
                                const RateSet& rs,
                                MiniSlotConvention conv = MiniSlotConvention::kHighRateShortWait) {
  const auto sp = detail::slot_probs_homogeneous(tau, n_stations, dist);
  return throughput(sp, access, burst, phy, rs, conv).throughput_bps;
}

/// Throughput-maximizing attempt probability for a homogeneous network:
/// 1000-point grid scan over (0, 1] followed by golden-section refinement.
/// Returns exactly 1 when the boundary is the maximizer.
inline OptimalOperatingPoint optimal_tau(int n_stations, const RateDistribution& dist,
                                         AccessMode access, const BurstPolicy& burst,
                                         const PhyParams& phy, const RateSet& rs,
                                         MiniSlotConvention conv = MiniSlotConvention::kHighRateShortWait) {
  if (n_stations < 1) throw std::invalid_argument("optimal_tau: need at least one station");
  auto s_of = [&](double tau) {
    return throughput_at_tau(tau, n_stations, dist, access, burst, phy, rs, conv);
  };

  constexpr int kGrid = 1000;
  int best = 1;
  double best_s = -1.0;
  for (int k = 1; k <= kGrid; ++k) {
    const double s = s_of(static_cast<double>(k) / kGrid);
    if (s > best_s) {
      best_s = s;
      best = k;
    }
  }

  double lo = std::max((best - 1.0) / kGrid, 1e-9);
  double hi = std::min((best + 1.0) / kGrid, 1.0);
  constexpr double kInvPhi = 0.6180339887498949;
  double c = hi - kInvPhi * (hi - lo);
  double d = lo + kInvPhi * (hi - lo);
  double sc = s_of(c), sd = s_of(d);
  while (hi - lo > 1e-6) {
    if (sc > sd) {
      hi = d; d = c; sd = sc;
      c = hi - kInvPhi * (hi - lo);
      sc = s_of(c);
    } else {
      lo = c; c = d; sc = sd;
      d = lo + kInvPhi * (hi - lo);
      sd = s_of(d);
    }
  }
  double tau = 0.5 * (lo + hi);
  double s_tau = s_of(tau);
  if (s_of(1.0) >= s_tau) {
    tau = 1.0;
    s_tau = s_of(1.0);
  }

  OptimalOperatingPoint opt;
  opt.tau_star = tau;
  opt.f_star = homogeneous_failure(tau, n_stations, dist);
  opt.s_max_bps = s_tau;
  opt.access = access;
  opt.n_stations = n_stations;
  opt.dist = dist;
  opt.base_payload_bits = burst.base_payload_bits;
  return opt;
}

struct BackoffChoice {
  int cw_min = 1;
  double r = 1.0;
  bool clamped = false;  // no r >= 1 reaches the target under the fixed window
};

/// Invert the backoff chain for a target attempt probability at the known
/// failure probability, with the stage count fixed.  Small targets get the
/// unit window (tau = 1 at r = 1); otherwise the window is pinned to 2 and
/// the exponent is solved by bisection, widening the bracket as needed.
inline BackoffChoice backoff_params_for_tau(double tau_star, double f_star, int b_max = 6) {
  if (!(tau_star > 0.0 && tau_star <= 1.0))
    throw std::invalid_argument("backoff_params_for_tau: tau outside (0,1]");
  if (tau_star >= 2.0 / 3.0) return BackoffChoice{1, 1.0, false};

  auto tau_of_r = [&](double r) {
    return tau_from_failure(f_star, BackoffParams{2, r, b_max});
  };
  // tau_of_r(1) = 2/3 > tau_star and tau decreases in r.
  double lo = 1.0, hi = 4.0;
  while (tau_of_r(hi) > tau_star) {
    hi *= 2.0;
    if (hi > 1e6) return BackoffChoice{2, 1.0, true};
  }
  for (int iter = 0; iter < 200 && std::abs(tau_of_r(0.5 * (lo + hi)) - tau_star) > 1e-8; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (tau_of_r(mid) > tau_star ? lo : hi) = mid;
  }
  return BackoffChoice{2, 0.5 * (lo + hi), false};
}

struct BackoffTableRow {
  int n = 0;
  AccessMode access = AccessMode::kBasic;
  double tau_star = 0.0;
  double r_opt = 1.0;
  double r_app = 1.0;  // r_opt rounded to one decimal
  int cw_min = 1;
  int b = 6;
  bool clamped = false;
};

/// Offline backoff table: one row per network size per access mode.
inline std::vector<BackoffTableRow> build_offline_table(
    const std::vector<int>& n_values, const RateDistribution& dist, const BurstPolicy& burst,
    const PhyParams& phy, const RateSet& rs,
    const std::vector<AccessMode>& modes = {AccessMode::kBasic, AccessMode::kRtsCts},
    MiniSlotConvention conv = MiniSlotConvention::kHighRateShortWait, int b_max = 6) {
  if (n_values.empty()) throw std::invalid_argument("build_offline_table: no network sizes");
  std::vector<BackoffTableRow> rows;
  for (AccessMode access : modes) {
    for (int n : n_values) {
      const auto opt = optimal_tau(n, dist, access, burst, phy, rs, conv);
      const auto choice = backoff_params_for_tau(opt.tau_star, opt.f_star, b_max);
      BackoffTableRow row;
      row.n = n;
      row.access = access;
      row.tau_star = opt.tau_star;
      row.r_opt = choice.r;
      row.r_app = std::round(choice.r * 10.0) / 10.0;
      row.cw_min = choice.cw_min;
      row.b = b_max;
      row.clamped = choice.clamped;
      rows.push_back(row);
    }
  }
  return rows;
}

/// Row with the nearest network size for the given access mode.
inline const BackoffTableRow& nearest_row(const std::vector<BackoffTableRow>& table, int n,
                                          AccessMode access) {
  const BackoffTableRow* best = nullptr;
  for (const auto& row : table) {
    if (row.access != access) continue;
    if (!best || std::abs(row.n - n) < std::abs(best->n - n)) best = &row;
  }
  if (!best) throw std::invalid_argument("nearest_row: no row for access mode");
  return *best;
}

inline const char* access_mode_name(AccessMode access) {
  return access == AccessMode::kBasic ? "basic" : "rts_cts";
}

inline void write_backoff_table_csv(std::ostream& out, const std::vector<BackoffTableRow>& rows) {
  out << "n,mode,tau_star,r_opt,r_app,cw_min,b\n";
  char buf[160];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof(buf), "%d,%s,%.6g,%.6g,%.6g,%d,%d\n", row.n,
                  access_mode_name(row.access), row.tau_star, row.r_opt, row.r_app, row.cw_min,
                  row.b);
    out << buf;
  }
}

}  // namespace rdcf
