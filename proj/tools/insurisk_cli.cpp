#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "insurisk/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"insurisk: regime-switching insurer investment toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::size_t paths = 0;
  double dt = 0.0;
  unsigned threads = 0;
  app.add_option("--config", config, "config file");
  auto* out_opt = app.add_option("--out", out_dir, "output directory (default: $INSURISK_OUT, then the config)");
  auto* seed_opt = app.add_option("--seed", seed, "master seed, overrides the config");
  auto* paths_opt = app.add_option("--paths", paths, "Monte Carlo paths")->check(CLI::PositiveNumber);
  auto* dt_opt = app.add_option("--dt", dt, "time step")->check(CLI::PositiveNumber);
  auto* threads_opt = app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  std::vector<std::string> reproduce_args;
  const std::pair<const char*, const char*> commands[] = {
      {"simulate", "simulate one path and write chain, market and surplus CSVs"},
      {"filter", "run the regime filter on one path against the exact discrete filter"},
      {"optimal", "print the closed-form controls at t = 0"},
      {"saddle-check", "verify the saddle point by grid search"},
      {"risk", "estimate the risk measure over the scenario family"},
      {"value", "estimate the value J at t = 0 by Monte Carlo"},
      {"selftest", "run the fast invariant suite"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);
  app.add_subcommand("reproduce", "run a bundled example: case1 or case2")
      ->add_option("case", reproduce_args, "case1 or case2")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : insurisk::exit_usage;
  }

  insurisk::Overrides ov;
  if (*out_opt) ov.out = out_dir;
  if (*seed_opt) ov.seed = seed;
  if (*paths_opt) ov.paths = paths;
  if (*dt_opt) ov.dt = dt;
  if (*threads_opt) ov.threads = threads;

  const std::string command = app.get_subcommands().front()->get_name();
  std::optional<std::filesystem::path> config_path;
  if (!config.empty()) config_path = config;
  return insurisk::run_command(command, reproduce_args, config_path, ov, std::cout, std::cerr);
}
