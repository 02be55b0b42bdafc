#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "insurisk/commands.hpp"
#include "insurisk/random.hpp"
#include "insurisk/risk.hpp"

namespace insurisk {

namespace {

RegimeModel quiet_model() {
  RegimeModel m;
  m.chain.generator = Eigen::MatrixXd::Zero(1, 1);
  m.chain.initial = Eigen::VectorXd::Ones(1);
  m.r = Eigen::VectorXd::Zero(1);
  m.alpha = Eigen::VectorXd::Zero(1);
  m.beta = 0.2;
  m.asset = {Eigen::VectorXd::Zero(1), {JumpSizeLaw::point_mass(1.0)}};
  m.claim = {Eigen::VectorXd::Zero(1), {JumpSizeLaw::point_mass(1.0)}};
  return m;
}

bool check_philox() {
  const auto out = philox4x32({0, 0, 0, 0}, {0, 0});
  return out == std::array<std::uint32_t, 4>{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8};
}

bool check_case1() {
  const RunConfig cfg = load_config(bundled_config_dir() / "case1.cfg");
  const GameState st = initial_game_state(cfg);
  return std::abs(optimal_pi(st.coeffs, cfg.model.beta, cfg.penalty) - 0.24074) <= 1e-5;
}

bool check_two_state_identity() {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    RegimeModel m;
    m.chain.generator = (Eigen::MatrixXd(2, 2) << -1.0, 1.0, 1.0, -1.0).finished();
    const double p = u(gen);
    m.chain.initial = Eigen::Vector2d(p, 1.0 - p);
    m.r = Eigen::Vector2d(0.1 * u(gen), 0.1 * u(gen));
    m.alpha = Eigen::Vector2d(0.2 * u(gen), 0.2 * u(gen));
    m.beta = 0.05 + 0.4 * u(gen);
    m.asset = {Eigen::Vector2d(u(gen), u(gen)), {JumpSizeLaw::point_mass(u(gen)), JumpSizeLaw::point_mass(u(gen))}};
    m.claim = {Eigen::Vector2d(u(gen), u(gen)), {JumpSizeLaw::exponential(u(gen) + 0.1), JumpSizeLaw::point_mass(u(gen))}};
    const QuadraticPenalty pen{0.9 * u(gen)};
    const double general = optimal_pi(filtered_coefficients(m, m.chain.initial), m.beta, pen);
    const RegimeCompensators c1 = regime_compensators(m, 0);
    const RegimeCompensators c2 = regime_compensators(m, 1);
    const double two = optimal_pi_two_state({m.alpha(0), m.alpha(1), m.r(0), m.r(1), m.beta, c1.claim.m1, c2.claim.m1,
                                             c1.asset.m2, c2.asset.m2, pen.delta, p});
    if (std::abs(general - two) > 1e-12 * std::abs(general)) return false;
  }
  return true;
}

bool check_chain_validation() {
  ChainModel bad{(Eigen::MatrixXd(2, 2) << -1.0, 0.5, 0.9, -0.5).finished(), Eigen::Vector2d(0.5, 0.5)};
  try {
    validate_chain_model(bad);
  } catch (const Error& e) {
    return e.code() == Errc::chain_column_sum;
  }
  return false;
}

bool check_neutral_density(const MonteCarloSetup& setup) {
  const PathBundle b = simulate_path(setup, constant_investment(0.3), 0);
  const DensityPath d =
      simulate_density(constant_scenario({}), setup.model, b.market, b.surplus, b.filter, b.innovation);
  for (double g : d.g)
    if (g != 1.0) return false;
  return true;
}

bool check_memory_identity() {
  MonteCarloSetup setup;
  setup.model = quiet_model();
  setup.delay.rho = 0.2;
  setup.grid = make_grid(1.0, 0.01);
  setup.x0 = 1.5;
  const PathBundle b = simulate_path(setup, constant_investment(0.0), 3);
  const std::size_t n = setup.grid.steps;
  double window = 0.0;
  for (std::size_t k = n - 20; k < n; ++k) window += b.surplus.dW1[k];
  return std::abs(b.surplus.y[n] - setup.x0 * window) <= 1e-12;
}

bool check_degenerate_saddle() {
  RegimeModel m = quiet_model();
  m.asset.intensity(0) = 0.5;
  const GameState st = make_game_state(m, {}, 0.0, 1.0, 0.0, 0.0, 0.0, m.chain.initial);
  const ControlBounds box{{-2, 2}, {-2, 2}, {-2, 2}, {-2, 2}};
  const SaddleReport rep = verify_saddle(st, box, {0.5}, 21);
  return rep.passed() && rep.inf_sup_point.pi == 0.0 && rep.inf_sup_point.theta0 == 0.0 &&
         rep.inf_sup_point.slope == 0.0;
}

bool check_translation(const MonteCarloSetup& setup) {
  const InvestmentRule pi = closed_form_choice(setup.model, setup.penalty).rule;
  const std::vector<ScenarioRule> family = {constant_scenario({}),
                                            best_response_scenario(setup.delay, setup.penalty, setup.model.beta)};
  RiskSamples s = sample_risk(setup, pi, family);
  const RiskReport base = risk_of_wealth(s.wealth, s);
  const double eps = 0.25;
  for (double& w : s.wealth) w += eps;
  const RiskReport shifted = risk_of_wealth(s.wealth, s);
  for (std::size_t i = 0; i < base.rows.size(); ++i) {
    const double delta = shifted.rows[i].value.value - base.rows[i].value.value;
    if (std::abs(delta + eps * base.rows[i].mean_g.value) > 1e-12) return false;
  }
  return true;
}

}  // namespace

bool run_selftest(std::ostream& out) {
  RunConfig case2 = load_config(bundled_config_dir() / "case2.cfg");
  case2.simulation.paths = 200;
  const MonteCarloSetup setup = case2.monte_carlo();

  const std::vector<std::pair<std::string, std::function<bool()>>> checks = {
      {"philox_known_answer", check_philox},
      {"case1_pi_star", check_case1},
      {"two_state_formula_identity", check_two_state_identity},
      {"chain_column_sum_rejected", check_chain_validation},
      {"neutral_density_is_one", [&] { return check_neutral_density(setup); }},
      {"memory_window_identity", check_memory_identity},
      {"degenerate_saddle_at_zero", check_degenerate_saddle},
      {"risk_translation_identity", [&] { return check_translation(setup); }},
  };
  bool all = true;
  for (const auto& [name, fn] : checks) {
    bool ok = false;
    try {
      ok = fn();
    } catch (const std::exception& e) {
      out << "error in " << name << ": " << e.what() << "\n";
    }
    out << (ok ? "PASS " : "FAIL ") << name << "\n";
    all = all && ok;
  }
  return all;
}

}  // namespace insurisk
