#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "insurisk/commands.hpp"
#include "insurisk/config.hpp"

using namespace insurisk;

namespace {

const char* minimal = R"(
[model]
states = 2
generator = -0.5 0.3 ; 0.5 -0.3
initial = 0.7 0.3
r = 0.045 0.09
alpha = 0.13 0.09
beta = 0.2
asset_intensity = 0.5 0.7
asset_law = point 1 ; exponential 2
claim_intensity = 0.5 0.7
claim_law = lognormal 0 0.5 ; point 1

[delay]
rho = 0.3

[penalty]
delta = 0.5

[simulation]
horizon = 1
dt = 0.1
)";

std::string with(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

std::string error_of(const std::string& text) {
  try {
    parse_config(text, "test.cfg");
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

Errc code_of(const std::string& text) {
  try {
    parse_config(text, "test.cfg");
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::config_parse;
}

}  // namespace

TEST_CASE("bundled case 1 config") {
  const RunConfig cfg = fixture::bundled("case1.cfg");
  CHECK(cfg.model.states() == 1);
  CHECK(cfg.penalty.delta == 0.5);
  CHECK(cfg.model.r(0) == 0.045);
  CHECK(cfg.model.alpha(0) == 0.11);
  CHECK(cfg.model.beta == 0.2);
  CHECK(regime_compensators(cfg.model, 0).asset.m2 == 0.5);
  CHECK(regime_compensators(cfg.model, 0).claim.m1 == 0.0);
}

TEST_CASE("bundled case 2 config") {
  const RunConfig cfg = fixture::bundled("case2.cfg");
  CHECK(cfg.model.states() == 2);
  CHECK(cfg.model.alpha(0) == 0.13);
  CHECK(cfg.model.alpha(1) == 0.09);
  CHECK(cfg.model.r(0) == 0.045);
  CHECK(cfg.model.r(1) == 0.09);
  CHECK(cfg.model.chain.initial(0) == 0.7);
  CHECK(cfg.model.claim.intensity(1) == 0.7);
  CHECK(cfg.model.asset.intensity(1) == 0.7);
  CHECK(cfg.penalty.delta == 0.5);
}

TEST_CASE("minimal config applies defaults") {
  const RunConfig cfg = parse_config(minimal);
  CHECK(cfg.delay.zeta == 0.0);
  CHECK(cfg.simulation.paths == 1000);
  CHECK(cfg.grid_n == 201);
  CHECK(cfg.bounds.pi.lo == -2.0);
  CHECK(cfg.model.asset.laws[1].kind() == JumpSizeLaw::Kind::exponential);
  CHECK(cfg.model.claim.laws[0].kind() == JumpSizeLaw::Kind::lognormal);
  CHECK(cfg.scenario_family().size() == 2);
  CHECK_FALSE(cfg.model.compensate_asset_jumps);
}

TEST_CASE("delay must be a grid multiple") {
  const std::string text = with(minimal, "rho = 0.3", "rho = 0.35");
  CHECK(code_of(text) == Errc::config_validation);
  CHECK(error_of(text).find("rho not a grid multiple") != std::string::npos);
}

TEST_CASE("missing delta names the penalty section") {
  const std::string text = with(minimal, "delta = 0.5", "");
  CHECK(code_of(text) == Errc::config_validation);
  CHECK(error_of(text).find("[penalty]") != std::string::npos);
}

TEST_CASE("parse errors carry positions") {
  CHECK(error_of(with(minimal, "beta = 0.2", "beta = 0.2x")).find("test.cfg:8:") != std::string::npos);
  CHECK(error_of(with(minimal, "beta = 0.2", "beta 0.2")).find("test.cfg:8:1:") != std::string::npos);
  CHECK(error_of(with(minimal, "[delay]", "[memory]")).find("unknown section") != std::string::npos);
  CHECK(error_of(with(minimal, "beta = 0.2", "beta = 0.2\nbeta = 0.3")).find("duplicate key") != std::string::npos);
  CHECK(error_of(with(minimal, "beta = 0.2", "beta = 0.2\ngamma = 1")).find("test.cfg:9:1: unknown key") !=
        std::string::npos);
  CHECK(code_of(with(minimal, "asset_law = point 1 ; exponential 2", "asset_law = point 1")) == Errc::config_parse);
}

TEST_CASE("model invariants are validated at load") {
  CHECK(code_of(with(minimal, "-0.5 0.3 ; 0.5 -0.3", "-0.5 0.3 ; 0.4 -0.3")) == Errc::config_validation);
  CHECK(error_of(with(minimal, "-0.5 0.3 ; 0.5 -0.3", "-0.5 0.3 ; 0.4 -0.3")).find("ChainColumnSum") !=
        std::string::npos);
  CHECK(code_of(with(minimal, "initial = 0.7 0.3", "initial = 0.7 0.4")) == Errc::config_validation);
  CHECK(code_of(with(minimal, "delta = 0.5", "delta = 1")) == Errc::config_validation);
  CHECK(code_of(with(minimal, "beta = 0.2", "beta = 0")) == Errc::config_validation);
  CHECK(code_of(with(minimal, "dt = 0.1", "dt = 0.3")) == Errc::config_validation);
}

TEST_CASE("resolved echo round-trips") {
  for (const char* name : {"case1.cfg", "case2.cfg"}) {
    const RunConfig a = fixture::bundled(name);
    const std::string text = write_config(a);
    const RunConfig b = parse_config(text, "echo");
    CHECK(write_config(b) == text);
    CHECK(b.model.chain.generator == a.model.chain.generator);
    CHECK(b.simulation.seed == a.simulation.seed);
  }
  RunConfig c = parse_config(minimal);
  c.model.compensate_asset_jumps = true;
  CHECK(parse_config(write_config(c)).model.compensate_asset_jumps);
}

TEST_CASE("format numbers round-trip") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e22, 0.24074074074074073}) CHECK(std::stod(format_number(v)) == v);
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(2.0) == "2");
}

TEST_CASE("overrides are revalidated") {
  RunConfig cfg = parse_config(minimal);
  Overrides ov;
  ov.dt = 0.05;
  ov.paths = 7;
  ov.seed = 99;
  apply_overrides(cfg, ov);
  CHECK(cfg.simulation.dt == 0.05);
  CHECK(cfg.simulation.paths == 7);
  CHECK(cfg.simulation.seed == 99);
  Overrides bad;
  bad.dt = 0.07;
  CHECK_THROWS_AS(apply_overrides(cfg, bad), Error);
}

TEST_CASE("command exit codes") {
  std::ostringstream out, err;
  const auto dir = std::filesystem::temp_directory_path() / "insurisk_test_config";
  std::filesystem::create_directories(dir);
  const auto bad = dir / "bad.cfg";
  std::ofstream(bad) << with(minimal, "rho = 0.3", "rho = 0.35");
  CHECK(run_command("optimal", {}, bad, {}, out, err) == exit_config);
  CHECK(err.str().find("ConfigValidationError") != std::string::npos);
  std::ostringstream o2, e2;
  CHECK(run_command("optimal", {}, bundled_config_dir() / "case1.cfg", {}, o2, e2) == exit_ok);
  CHECK(o2.str().find("pi_star = 0.24074\n") != std::string::npos);
  std::ostringstream o3, e3;
  CHECK(run_command("reproduce", {"case3"}, std::nullopt, {}, o3, e3) == exit_usage);
  std::filesystem::remove_all(dir);
}
