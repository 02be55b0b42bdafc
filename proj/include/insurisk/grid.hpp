#pragma once

#include <cmath>
#include <cstddef>

#include "insurisk/error.hpp"

namespace insurisk {

/// Uniform time grid t_k = k * dt, k = 0..steps.
struct TimeGrid {
  double dt = 0.0;
  std::size_t steps = 0;

  double time(std::size_t k) const { return static_cast<double>(k) * dt; }
  double horizon() const { return time(steps); }
  std::size_t nodes() const { return steps + 1; }

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

/// Builds a grid; the horizon must be a positive integer multiple of dt.
inline TimeGrid make_grid(double horizon, double dt) {
  if (!(dt > 0.0) || !(horizon > 0.0) || !std::isfinite(horizon))
    throw Error(Errc::invalid_grid, "horizon and dt must be positive");
  const double ratio = horizon / dt;
  const double steps = std::round(ratio);
  if (steps < 1.0 || std::abs(ratio - steps) > 1e-9 * std::max(1.0, ratio))
    throw Error(Errc::invalid_grid, "horizon is not an integer multiple of dt");
  return TimeGrid{dt, static_cast<std::size_t>(steps)};
}

/// Number of grid steps spanned by a duration; throws if it is not a grid multiple.
inline std::size_t grid_multiple(double duration, double dt, Errc code, const char* what) {
  const double ratio = duration / dt;
  const double m = std::round(ratio);
  if (duration < 0.0 || std::abs(ratio - m) > 1e-9 * std::max(1.0, ratio))
    throw Error(code, what);
  return static_cast<std::size_t>(m);
}

}  // namespace insurisk
