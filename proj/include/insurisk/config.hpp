#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "insurisk/game.hpp"
#include "insurisk/grid.hpp"
#include "insurisk/market.hpp"
#include "insurisk/risk.hpp"
#include "insurisk/surplus.hpp"

namespace insurisk {

struct SimulationSettings {
  double horizon = 1.0;
  double dt = 0.01;
  std::size_t paths = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  double x0 = 1.0;
  double stock0 = 1.0;
  double reserve0 = 0.0;
};

/// A scenario family member: either fixed coefficients or the best response.
struct ScenarioSpec {
  bool best_response = false;
  ScenarioControl control;
};

struct OutputSettings {
  std::filesystem::path directory = "out";
  std::set<std::string> csv = {"chain", "market", "surplus", "filter", "risk", "saddle"};
  bool saddle_grid = false;
};

struct RunConfig {
  RegimeModel model;
  DelayParams delay;
  QuadraticPenalty penalty;
  SimulationSettings simulation;
  ControlBounds bounds;
  std::size_t grid_n = 201;
  std::vector<ScenarioSpec> scenarios;
  bool split_theta0 = false;
  double theta0_claim = 0.0;
  OutputSettings output;

  TimeGrid grid() const;
  MonteCarloSetup monte_carlo() const;
  std::vector<ScenarioRule> scenario_family() const;
};

/// Parses the sectioned key = value format; every failure carries a line:col
/// position (ConfigParseError) or the violated invariant (ConfigValidationError).
RunConfig parse_config(const std::string& text, const std::string& source = "<string>");
RunConfig load_config(const std::filesystem::path& path);

/// Cross-field checks of all modules.
void validate_config(const RunConfig& cfg);

/// Complete config text with every default made explicit; parses back to the same run.
std::string write_config(const RunConfig& cfg);

/// Locale-free shortest round-trip decimal.
std::string format_number(double v);

}  // namespace insurisk
