#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "insurisk/config.hpp"
#include "insurisk/game.hpp"

namespace insurisk {

enum ExitCode : int {
  exit_ok = 0,
  exit_usage = 1,
  exit_config = 2,
  exit_numerical = 3,
  exit_acceptance = 4,
};

/// Command-line overrides applied on top of a loaded config.
struct Overrides {
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::optional<double> dt;
  std::optional<unsigned> threads;
};

void apply_overrides(RunConfig& cfg, const Overrides& ov);

/// Directory holding the bundled case configs.
std::filesystem::path bundled_config_dir();

/// Game state at t = 0 with the initial distribution as the filter estimate.
GameState initial_game_state(const RunConfig& cfg);

struct CaseComparison {
  double general = 0.0;
  std::optional<double> two_state;  ///< per-state closed form (two-state models only)
  double reported = 0.0;
  double abs_gap = 0.0;             ///< |general - reported|
  double formula_rel_diff = 0.0;    ///< |general - two_state| / |general|
};

CaseComparison compare_case(const RunConfig& cfg, double reported);

/// Runs one command; `args` holds positional arguments after the command name.
/// Errors are caught and mapped to exit codes with the error name on `err`.
int run_command(const std::string& command, const std::vector<std::string>& args,
                const std::optional<std::filesystem::path>& config_path, const Overrides& ov, std::ostream& out,
                std::ostream& err);

/// Fast invariant suite; one line per check.
bool run_selftest(std::ostream& out);

}  // namespace insurisk
