#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "rdcf/distribution.hpp"
#include "rdcf/phy.hpp"

namespace rdcf {

// ---------------------------------------------------------------------------
// Populations

/// Every station shares one rate distribution.
struct Homogeneous {
  int n_stations = 1;
  RateDistribution dist;
};

/// Stations pinned to a single rate, one group per mode.
struct FixedRateGroups {
  std::vector<int> group_sizes;  // indexed by mode

  int total() const { return std::accumulate(group_sizes.begin(), group_sizes.end(), 0); }
};

/// Arbitrary per-station rate distributions.
struct General {
  std::vector<RateDistribution> stations;
};

using Population = std::variant<Homogeneous, FixedRateGroups, General>;

inline int population_size(const Population& pop) {
  if (const auto* h = std::get_if<Homogeneous>(&pop)) return h->n_stations;
  if (const auto* g = std::get_if<FixedRateGroups>(&pop)) return g->total();
  return static_cast<int>(std::get<General>(pop).stations.size());
}

inline int population_modes(const Population& pop) {
  if (const auto* h = std::get_if<Homogeneous>(&pop)) return h->dist.modes();
  if (const auto* g = std::get_if<FixedRateGroups>(&pop)) return static_cast<int>(g->group_sizes.size());
  return std::get<General>(pop).stations.front().modes();
}

inline void validate_population(const Population& pop) {
  if (const auto* h = std::get_if<Homogeneous>(&pop)) {
    if (h->n_stations < 1) throw std::invalid_argument("population: n_stations must be >= 1");
    h->dist.validate();
    return;
  }
  if (const auto* g = std::get_if<FixedRateGroups>(&pop)) {
    if (g->group_sizes.empty()) throw std::invalid_argument("population: no rate groups");
    for (int n : g->group_sizes)
      if (n < 0) throw std::invalid_argument("population: negative group size");
    if (g->total() < 1) throw std::invalid_argument("population: empty network");
    return;
  }
  const auto& gen = std::get<General>(pop);
  if (gen.stations.empty()) throw std::invalid_argument("population: no stations");
  const int m_count = gen.stations.front().modes();
  for (const auto& d : gen.stations) {
    d.validate();
    if (d.modes() != m_count)
      throw std::invalid_argument("population: inconsistent mode counts");
  }
}

/// Expand any population into explicit per-station distributions.
inline General to_general(const Population& pop) {
  validate_population(pop);
  if (const auto* h = std::get_if<Homogeneous>(&pop)) {
    return General{std::vector<RateDistribution>(static_cast<std::size_t>(h->n_stations), h->dist)};
  }
  if (const auto* g = std::get_if<FixedRateGroups>(&pop)) {
    General out;
    const int m_count = static_cast<int>(g->group_sizes.size());
    for (int m = 0; m < m_count; ++m) {
      for (int i = 0; i < g->group_sizes[static_cast<std::size_t>(m)]; ++i) {
        out.stations.push_back(RateDistribution::one_hot(m, m_count));
      }
    }
    return out;
  }
  return std::get<General>(pop);
}

// ---------------------------------------------------------------------------
// Results

struct FixedPointSolution {
  // One entry per station for General, per group for FixedRateGroups, a
  // single entry for Homogeneous.
  std::vector<double> tau;
  std::vector<double> f;
  long iterations = 0;
  double residual = 0.0;
};

struct NonConvergenceError : std::runtime_error {
  NonConvergenceError(double resid, long iters)
      : NonConvergenceError("fixed-point iteration did not converge (residual " +
                                std::to_string(resid) + " after " + std::to_string(iters) +
                                " iterations)",
                            resid, iters) {}
  NonConvergenceError(const std::string& message, double resid, long iters)
      : std::runtime_error(message), residual(resid), iterations(iters) {}
  double residual;
  long iterations;
};

/// Partition of a generic slot: idle, success at mode m, collision at mode m.
struct SlotProbabilities {
  double p_idle = 1.0;
  std::vector<double> p_succ;
  std::vector<double> p_coll;

  double total_success() const { return std::accumulate(p_succ.begin(), p_succ.end(), 0.0); }
  double total_collision() const { return std::accumulate(p_coll.begin(), p_coll.end(), 0.0); }
};

struct ThroughputReport {
  double throughput_bps = 0.0;
  double p_idle = 1.0;
  std::vector<double> p_succ;
  std::vector<double> p_coll;
  double collision_probability = 0.0;
  double collision_cost = 0.0;       // mean collision airtime per slot, in slot lengths
  double mean_slot_duration = 0.0;   // seconds
};

// ---------------------------------------------------------------------------
// Backoff chain

/// Probability that a station's backoff counter reads zero in a generic
/// slot, given its contention failure probability.  The geometric-sum form
/// is finite for every r*f including r*f = 1, where it equals the analytic
/// limit of the closed expression.
inline double tau_from_failure(double f, const BackoffParams& bp) {
  if (!(f >= 0.0 && f <= 1.0)) throw std::invalid_argument("tau_from_failure: f outside [0,1]");
  bp.validate();
  const double rf = bp.r * f;
  double geom = 0.0;  // sum of (rf)^j, j = 0..b_max-1
  double term = 1.0;
  for (int j = 0; j < bp.b_max; ++j) {
    geom += term;
    term *= rf;
  }
  const double denom = (bp.cw_min + 1.0) + bp.cw_min * f * (bp.r - 1.0) * geom;
  return std::clamp(2.0 / denom, 0.0, 1.0);
}

/// Total stationary probability of the backoff chain at failure probability
/// f; exactly 1 when the chain is consistent.  Diagnostic used by tests.
inline double backoff_chain_total(double f, const BackoffParams& bp) {
  bp.validate();
  if (!(f >= 0.0 && f < 1.0)) throw std::invalid_argument("backoff_chain_total: f outside [0,1)");
  // Stage-0 occupancy, then per-stage mass b_{i,0} * (CW_i + 1) / 2.
  const double rf = bp.r * f;
  double geom = 0.0;
  double term = 1.0;
  for (int j = 0; j < bp.b_max; ++j) {
    geom += term;
    term *= rf;
  }
  const double b00 =
      2.0 * (1.0 - f) / ((bp.cw_min + 1.0) + bp.cw_min * f * (bp.r - 1.0) * geom);
  double total = 0.0;
  double fi = 1.0;  // f^i
  for (int i = 0; i < bp.b_max; ++i) {
    total += b00 * fi * (bp.window_real(i) + 1.0) / 2.0;
    fi *= f;
  }
  total += b00 * fi / (1.0 - f) * (bp.window_real(bp.b_max) + 1.0) / 2.0;
  return total;
}

// ---------------------------------------------------------------------------
// Contention probabilities

/// Probability that a station draws a rate at or above the given mode.
inline double threat_probability(const RateDistribution& dist, int mode) {
  if (mode < 0 || mode >= dist.modes()) throw std::invalid_argument("threat_probability: mode out of range");
  double q = 0.0;
  for (int l = mode; l < dist.modes(); ++l) q += dist.probs[static_cast<std::size_t>(l)];
  return q;
}

/// Contention failure probability seen by station `n` transmitting at
/// `mode`: at least one other candidate holds an equal or higher rate.
inline double failure_prob_general(int station, int mode, std::span<const double> taus,
                                   std::span<const RateDistribution> dists) {
  if (taus.size() != dists.size()) throw std::invalid_argument("failure_prob_general: size mismatch");
  const int n = static_cast<int>(taus.size());
  if (station < 0 || station >= n) throw std::invalid_argument("failure_prob_general: station out of range");
  double survive = 1.0;
  for (int i = 0; i < n; ++i) {
    if (i == station) continue;
    survive *= 1.0 - taus[static_cast<std::size_t>(i)] * threat_probability(dists[static_cast<std::size_t>(i)], mode);
  }
  return 1.0 - survive;
}

/// Failure probability averaged over the station's own rate distribution.
inline double failure_prob_average(int station, std::span<const double> taus,
                                   std::span<const RateDistribution> dists) {
  const auto& own = dists[static_cast<std::size_t>(station)];
  double f = 0.0;
  for (int m = 0; m < own.modes(); ++m) {
    const double pm = own.probs[static_cast<std::size_t>(m)];
    if (pm > 0.0) f += pm * failure_prob_general(station, m, taus, dists);
  }
  return f;
}

/// Homogeneous closed form of the average failure probability at a given
/// attempt probability tau.
inline double homogeneous_failure(double tau, int n_stations, const RateDistribution& dist) {
  double f = 0.0;
  for (int m = 0; m < dist.modes(); ++m) {
    const double pm = dist.probs[static_cast<std::size_t>(m)];
    if (pm <= 0.0) continue;
    const double q = threat_probability(dist, m);
    f += pm * (1.0 - std::pow(1.0 - tau * q, n_stations - 1));
  }
  return f;
}

// ---------------------------------------------------------------------------
// Fixed point

namespace detail {

struct FixedPointOptions {
  double damping = 0.5;
  double tolerance = 1e-10;
  long max_iterations = 100000;
};

/// Damped iteration on the failure-probability vector for explicit
/// per-station distributions.
inline FixedPointSolution solve_general(const std::vector<RateDistribution>& dists,
                                        const BackoffParams& bp, const FixedPointOptions& opt) {
  const std::size_t n = dists.size();
  std::vector<double> f(n, 0.5);
  std::vector<double> tau(n, 0.0);
  std::vector<double> next(n, 0.0);
  double residual = 1.0;
  long iter = 0;
  for (; iter < opt.max_iterations; ++iter) {
    for (std::size_t i = 0; i < n; ++i) tau[i] = tau_from_failure(f[i], bp);
    residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] = failure_prob_average(static_cast<int>(i), tau, dists);
      residual = std::max(residual, std::abs(next[i] - f[i]));
    }
    if (residual <= opt.tolerance) {
      return FixedPointSolution{std::move(tau), std::move(f), iter + 1, residual};
    }
    for (std::size_t i = 0; i < n; ++i) f[i] += opt.damping * (next[i] - f[i]);
  }
  throw NonConvergenceError(residual, iter);
}

/// Group-level iteration for fixed-rate populations.  Group m fails against
/// candidates in its own or any higher-rate group.
inline FixedPointSolution solve_fixed_groups(const FixedRateGroups& pop, const BackoffParams& bp,
                                             const FixedPointOptions& opt) {
  const std::size_t m_count = pop.group_sizes.size();
  std::vector<double> f(m_count, 0.5);
  std::vector<double> tau(m_count, 0.0);
  std::vector<double> next(m_count, 0.0);
  double residual = 1.0;
  long iter = 0;
  for (; iter < opt.max_iterations; ++iter) {
    for (std::size_t m = 0; m < m_count; ++m) tau[m] = tau_from_failure(f[m], bp);
    residual = 0.0;
    for (std::size_t m = 0; m < m_count; ++m) {
      const int same = std::max(pop.group_sizes[m] - 1, 0);
      double survive = std::pow(1.0 - tau[m], same);
      for (std::size_t i = m + 1; i < m_count; ++i)
        survive *= std::pow(1.0 - tau[i], pop.group_sizes[i]);
      next[m] = 1.0 - survive;
      residual = std::max(residual, std::abs(next[m] - f[m]));
    }
    if (residual <= opt.tolerance) {
      return FixedPointSolution{std::move(tau), std::move(f), iter + 1, residual};
    }
    for (std::size_t m = 0; m < m_count; ++m) f[m] += opt.damping * (next[m] - f[m]);
  }
  throw NonConvergenceError(residual, iter);
}

/// Homogeneous scalar system: bisection on f.  g(f) = F(tau(f)) - f is
/// continuous and strictly decreasing with g(0) >= 0 >= g(1), so the root is
/// bracketed from the start.
inline FixedPointSolution solve_homogeneous(const Homogeneous& pop, const BackoffParams& bp) {
  auto g = [&](double f) {
    return homogeneous_failure(tau_from_failure(f, bp), pop.n_stations, pop.dist) - f;
  };
  double lo = 0.0, hi = 1.0;
  double f = 0.5, gf = 0.0;
  long iter = 0;
  for (; iter < 200; ++iter) {
    f = 0.5 * (lo + hi);
    gf = g(f);
    if (std::abs(gf) <= 1e-12 || hi - lo <= 1e-16) break;
    (gf > 0.0 ? lo : hi) = f;
  }
  const double tau = tau_from_failure(f, bp);
  return FixedPointSolution{{tau}, {f}, iter + 1, std::abs(gf)};
}

}  // namespace detail

/// Solve the coupled attempt/failure probabilities for any population.
/// Vector systems start at damping 0.5; if the iteration oscillates the
/// damping is halved and the solve restarted before giving up.
inline FixedPointSolution solve_fixed_point(const Population& pop, const BackoffParams& bp) {
  validate_population(pop);
  bp.validate();
  if (const auto* h = std::get_if<Homogeneous>(&pop)) {
    return detail::solve_homogeneous(*h, bp);
  }
  detail::FixedPointOptions opt;
  for (;; opt.damping *= 0.5) {
    try {
      if (const auto* g = std::get_if<FixedRateGroups>(&pop)) {
        return detail::solve_fixed_groups(*g, bp, opt);
      }
      return detail::solve_general(std::get<General>(pop).stations, bp, opt);
    } catch (const NonConvergenceError&) {
      if (opt.damping <= 1.0 / 64.0) throw;
    }
  }
}

// ---------------------------------------------------------------------------
// Slot probabilities

namespace detail {

/// Per-station closed forms.  With a_i = tau_i * P_i[m] (candidate exactly
/// at m) and b_i = tau_i * P(rate > m):
///   P_succ,m = sum_n a_n * prod_{i != n} (1 - a_i - b_i)
///   P_coll,m = prod (1 - b_i) - prod (1 - a_i - b_i) - P_succ,m
inline SlotProbabilities slot_probs_general(std::span<const double> taus,
                                            std::span<const RateDistribution> dists) {
  const std::size_t n = taus.size();
  const int m_count = dists.front().modes();
  SlotProbabilities sp;
  sp.p_succ.assign(static_cast<std::size_t>(m_count), 0.0);
  sp.p_coll.assign(static_cast<std::size_t>(m_count), 0.0);

  sp.p_idle = 1.0;
  for (std::size_t i = 0; i < n; ++i) sp.p_idle *= 1.0 - taus[i];

  std::vector<double> a(n), b(n);
  for (int m = 0; m < m_count; ++m) {
    double prod_none = 1.0;   // nobody candidates at >= m
    double prod_above = 1.0;  // nobody candidates at > m
    for (std::size_t i = 0; i < n; ++i) {
      const double above = m + 1 < m_count ? threat_probability(dists[i], m + 1) : 0.0;
      a[i] = taus[i] * dists[i].probs[static_cast<std::size_t>(m)];
      b[i] = taus[i] * above;
      prod_none *= 1.0 - a[i] - b[i];
      prod_above *= 1.0 - b[i];
    }
    double succ = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      if (a[s] <= 0.0) continue;
      double others = 1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (i != s) others *= 1.0 - a[i] - b[i];
      }
      succ += a[s] * others;
    }
    sp.p_succ[static_cast<std::size_t>(m)] = succ;
    // A lone station cannot collide; keep that exact instead of leaving
    // cancellation dust.
    sp.p_coll[static_cast<std::size_t>(m)] =
        n <= 1 ? 0.0 : std::max(prod_above - prod_none - succ, 0.0);
  }
  return sp;
}

inline SlotProbabilities slot_probs_homogeneous(double tau, int n, const RateDistribution& dist) {
  const int m_count = dist.modes();
  SlotProbabilities sp;
  sp.p_succ.assign(static_cast<std::size_t>(m_count), 0.0);
  sp.p_coll.assign(static_cast<std::size_t>(m_count), 0.0);
  sp.p_idle = std::pow(1.0 - tau, n);
  for (int m = 0; m < m_count; ++m) {
    const double pm = dist.probs[static_cast<std::size_t>(m)];
    const double q = threat_probability(dist, m);        // rate >= m
    const double hi = q - pm;                            // rate > m
    const double succ = n * tau * pm * std::pow(1.0 - tau * q, n - 1);
    sp.p_succ[static_cast<std::size_t>(m)] = succ;
    sp.p_coll[static_cast<std::size_t>(m)] =
        n <= 1 ? 0.0
               : std::max(std::pow(1.0 - tau * hi, n) - std::pow(1.0 - tau * q, n) - succ, 0.0);
  }
  return sp;
}

inline SlotProbabilities slot_probs_fixed_groups(std::span<const double> taus,
                                                 const FixedRateGroups& pop) {
  const std::size_t m_count = pop.group_sizes.size();
  SlotProbabilities sp;
  sp.p_succ.assign(m_count, 0.0);
  sp.p_coll.assign(m_count, 0.0);
  sp.p_idle = 1.0;
  for (std::size_t m = 0; m < m_count; ++m)
    sp.p_idle *= std::pow(1.0 - taus[m], pop.group_sizes[m]);

  for (std::size_t m = 0; m < m_count; ++m) {
    const int nm = pop.group_sizes[m];
    if (nm == 0) continue;
    double quiet_above = 1.0;  // no candidate in any higher-rate group
    for (std::size_t i = m + 1; i < m_count; ++i)
      quiet_above *= std::pow(1.0 - taus[i], pop.group_sizes[i]);
    const double t = taus[m];
    const double none = std::pow(1.0 - t, nm);
    const double one = nm * t * std::pow(1.0 - t, nm - 1);
    sp.p_succ[m] = one * quiet_above;
    sp.p_coll[m] = std::max((1.0 - none - one) * quiet_above, 0.0);
  }
  return sp;
}

}  // namespace detail

/// Idle/success/collision partition of a generic slot for a solved
/// population.
inline SlotProbabilities slot_probabilities(const FixedPointSolution& sol, const Population& pop) {
  validate_population(pop);
  if (const auto* h = std::get_if<Homogeneous>(&pop)) {
    if (sol.tau.size() != 1) throw std::invalid_argument("slot_probabilities: dimension mismatch");
    return detail::slot_probs_homogeneous(sol.tau[0], h->n_stations, h->dist);
  }
  if (const auto* g = std::get_if<FixedRateGroups>(&pop)) {
    if (sol.tau.size() != g->group_sizes.size())
      throw std::invalid_argument("slot_probabilities: dimension mismatch");
    return detail::slot_probs_fixed_groups(sol.tau, *g);
  }
  const auto& gen = std::get<General>(pop);
  if (sol.tau.size() != gen.stations.size())
    throw std::invalid_argument("slot_probabilities: dimension mismatch");
  return detail::slot_probs_general(sol.tau, gen.stations);
}

// ---------------------------------------------------------------------------
// Throughput

/// Saturation throughput: expected payload per generic slot over its
/// expected duration.
inline ThroughputReport throughput(const SlotProbabilities& sp, AccessMode mode_access,
                                   const BurstPolicy& burst, const PhyParams& phy,
                                   const RateSet& rs,
                                   MiniSlotConvention conv = MiniSlotConvention::kHighRateShortWait) {
  const int m_count = rs.size();
  if (static_cast<int>(sp.p_succ.size()) != m_count ||
      static_cast<int>(sp.p_coll.size()) != m_count)
    throw std::invalid_argument("throughput: mode count mismatch");
  const double sigma = enlarged_slot(rs, phy);

  double payload = 0.0;
  double duration = sp.p_idle * sigma;
  double collision_time = 0.0;
  for (int m = 0; m < m_count; ++m) {
    const double ps = sp.p_succ[static_cast<std::size_t>(m)];
    const double pc = sp.p_coll[static_cast<std::size_t>(m)];
    payload += ps * burst.payload_bits(m, rs);
    duration += ps * success_duration(mode_access, m, burst, phy, rs, sigma, conv);
    collision_time += pc * collision_duration(mode_access, m, burst, phy, rs, sigma, conv);
  }
  duration += collision_time;
  if (!(duration > 0.0)) throw std::logic_error("throughput: degenerate slot duration");

  ThroughputReport rep;
  rep.throughput_bps = payload / duration;
  rep.p_idle = sp.p_idle;
  rep.p_succ = sp.p_succ;
  rep.p_coll = sp.p_coll;
  rep.collision_probability = sp.total_collision();
  rep.collision_cost = collision_time / sigma;
  rep.mean_slot_duration = duration;
  return rep;
}

/// Full analytic pipeline for one scenario.
inline ThroughputReport analyze(const Population& pop, const BackoffParams& bp,
                                AccessMode mode_access, const BurstPolicy& burst,
                                const PhyParams& phy, const RateSet& rs,
                                MiniSlotConvention conv = MiniSlotConvention::kHighRateShortWait) {
  const auto sol = solve_fixed_point(pop, bp);
  const auto sp = slot_probabilities(sol, pop);
  return throughput(sp, mode_access, burst, phy, rs, conv);
}

}  // namespace rdcf
