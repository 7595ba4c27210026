#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace covertsim {

/// Half-width of the 95% Wilson score interval for a binomial
/// proportion. Reported next to every Monte Carlo error estimate.
inline double binomial_half_width(std::int64_t successes, std::int64_t trials) {
  if (trials <= 0) throw std::invalid_argument("binomial_half_width: trials must be positive");
  if (successes < 0 || successes > trials)
    throw std::invalid_argument("binomial_half_width: successes out of range");
  const double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double denom = 1.0 + z * z / n;
  return (z / denom) * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n));
}

/// Conservative upper empirical (1 - tail) quantile: the smallest sample
/// value v such that at most floor(tail * N) samples exceed v. Ties
/// resolve upward, so a threshold calibrated this way realizes a tail
/// probability <= the target.
inline double empirical_quantile_upper(std::vector<double> values, double tail) {
  if (values.empty()) throw std::invalid_argument("empirical_quantile_upper: no samples");
  if (!(tail > 0.0 && tail < 1.0))
    throw std::invalid_argument("empirical_quantile_upper: tail must be in (0,1)");
  std::sort(values.begin(), values.end());
  const auto n = static_cast<std::int64_t>(values.size());
  const auto allowed = static_cast<std::int64_t>(std::floor(tail * static_cast<double>(n)));
  const std::int64_t k = std::max<std::int64_t>(n - 1 - allowed, 0);
  return values[static_cast<std::size_t>(k)];
}

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / a.size() -
                              static_cast<double>(j) / b.size()));
  }
  return d;
}

/// True when a two-sample KS test at the 1% level does NOT reject the
/// hypothesis that both samples share a distribution (c(0.01) = 1.6276).
inline bool ks_same_distribution_1pct(std::vector<double> a, std::vector<double> b) {
  const double n = static_cast<double>(a.size());
  const double m = static_cast<double>(b.size());
  const double d = ks_statistic(std::move(a), std::move(b));
  return d <= 1.6276 * std::sqrt((n + m) / (n * m));
}

}  // namespace covertsim
