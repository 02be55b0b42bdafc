#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace insurisk {

/// Sample mean with its standard error.
struct Estimate {
  double value = 0.0;
  double se = 0.0;  ///< standard error
};

inline Estimate mean_estimate(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n == 0) return {};
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(n);
  if (n < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double var = ss / static_cast<double>(n - 1);
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

/// |a - b| <= k * sqrt(se_a^2 + se_b^2).
inline bool within_sigmas(const Estimate& a, const Estimate& b, double k) {
  return std::abs(a.value - b.value) <= k * std::hypot(a.se, b.se);
}

}  // namespace insurisk
