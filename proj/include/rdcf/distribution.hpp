#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "rdcf/phy.hpp"
#include "rdcf/quadrature.hpp"

namespace rdcf {

/// Probability of each rate mode being adopted by a station.
struct RateDistribution {
  std::vector<double> probs;

  RateDistribution() = default;
  explicit RateDistribution(std::vector<double> p) : probs(std::move(p)) { validate(); }

  int modes() const { return static_cast<int>(probs.size()); }

  void validate() const {
    if (probs.empty()) throw std::invalid_argument("RateDistribution: empty");
    double sum = 0.0;
    for (double p : probs) {
      if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("RateDistribution: entry outside [0,1]");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("RateDistribution: entries must sum to 1");
  }

  /// Build from non-negative weights, normalizing to sum 1.
  static RateDistribution normalized(std::vector<double> weights) {
    double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(sum > 0.0)) throw std::invalid_argument("RateDistribution: weights must have positive sum");
    for (double& w : weights) w /= sum;
    // Push rounding residue into the largest entry so validate() holds exactly.
    double resid = 1.0 - std::accumulate(weights.begin(), weights.end(), 0.0);
    auto it = std::max_element(weights.begin(), weights.end());
    *it += resid;
    return RateDistribution(std::move(weights));
  }

  /// Degenerate distribution pinned at one mode.
  static RateDistribution one_hot(int mode, int m_count) {
    if (mode < 0 || mode >= m_count) throw std::invalid_argument("one_hot: mode out of range");
    std::vector<double> p(static_cast<std::size_t>(m_count), 0.0);
    p[static_cast<std::size_t>(mode)] = 1.0;
    return RateDistribution(std::move(p));
  }
};

enum class DistributionKind { kEqual, kProportional, kInverse };

/// The three stock rate distributions: uniform over modes, weighted by the
/// rate, and weighted by its reciprocal.
inline RateDistribution canonical_distribution(DistributionKind kind, const RateSet& rs) {
  std::vector<double> w(static_cast<std::size_t>(rs.size()));
  for (int m = 0; m < rs.size(); ++m) {
    switch (kind) {
      case DistributionKind::kEqual: w[m] = 1.0; break;
      case DistributionKind::kProportional: w[m] = rs.rate(m); break;
      case DistributionKind::kInverse: w[m] = 1.0 / rs.rate(m); break;
    }
  }
  return RateDistribution::normalized(std::move(w));
}

/// Stationary rate distribution from SNR thresholds: probability of mode m
/// is the pdf mass between thresholds m and m+1.  Thresholds run from 0 to
/// +inf and partition the SNR axis into one bin per mode.
inline RateDistribution rate_distribution_from_snr(const std::vector<double>& thresholds,
                                                   const std::function<double(double)>& pdf,
                                                   double abs_tol = 1e-10) {
  if (thresholds.size() < 2) throw std::invalid_argument("snr thresholds: need at least two");
  if (thresholds.front() != 0.0)
    throw std::invalid_argument("snr thresholds: first threshold must be 0");
  if (!std::isinf(thresholds.back()))
    throw std::invalid_argument("snr thresholds: last threshold must be +inf");
  for (std::size_t i = 1; i < thresholds.size(); ++i) {
    if (!(thresholds[i] > thresholds[i - 1]))
      throw std::invalid_argument("snr thresholds: must be strictly increasing");
  }

  const std::size_t m_count = thresholds.size() - 1;
  std::vector<double> mass(m_count, 0.0);
  for (std::size_t m = 0; m < m_count; ++m) {
    const double lo = thresholds[m];
    const double hi = thresholds[m + 1];
    mass[m] = std::isinf(hi) ? integrate_to_infinity(pdf, lo, abs_tol)
                             : integrate(pdf, lo, hi, abs_tol);
    mass[m] = std::max(mass[m], 0.0);
  }

  const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-6)
    throw std::invalid_argument("snr pdf does not integrate to 1");
  return RateDistribution::normalized(std::move(mass));
}

}  // namespace rdcf
