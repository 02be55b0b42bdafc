#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "insurisk/chain.hpp"
#include "insurisk/filter.hpp"
#include "insurisk/game.hpp"
#include "insurisk/grid.hpp"
#include "insurisk/market.hpp"
#include "insurisk/stats.hpp"
#include "insurisk/surplus.hpp"

namespace insurisk {

/// Scenario coefficients for one step: theta2(z) = theta2_slope * z.
struct ScenarioControl {
  double theta0 = 0.0;
  double theta1 = 0.0;
  double theta2_slope = 0.0;
  /// Independent coefficient on the claim-jump integral; theta0 when unset.
  std::optional<double> theta0_claim;

  double claim_theta0() const { return theta0_claim.value_or(theta0); }
};

/// Throws invalid_scenario unless 1 + theta0 > 0 (when claims occur) and
/// theta2_slope * z > -1 on the asset-jump support.
void validate_scenario(const ScenarioControl& control, const RegimeModel& model);

/// A scenario chosen per step from the decision context (which carries the
/// step's investment).
struct ScenarioRule {
  std::string label;
  std::function<ScenarioControl(const DecisionContext&)> control;
};

ScenarioRule constant_scenario(const ScenarioControl& control, std::string label = {});
/// theta0 constant, theta1 = gain * kappa X (1 - e^{-zeta rho} 1{t <= T - rho}), slope constant.
ScenarioRule linear_feedback_scenario(double theta0, double gain, double slope, const DelayParams& delay,
                                      std::string label = {});
/// The maximizers theta*(pi) of the Hamiltonian at the step's investment.
ScenarioRule best_response_scenario(const DelayParams& delay, const QuadraticPenalty& pen, double beta,
                                    std::string label = "theta_star");

struct InvestmentChoice {
  std::string label;
  InvestmentRule rule;
};

InvestmentChoice constant_choice(double pi, std::string label = {});
/// pi* evaluated on the filtered coefficients of each step.
InvestmentChoice closed_form_choice(const RegimeModel& model, const QuadraticPenalty& pen,
                                    std::string label = "pi_star");
/// pi* + offset.
InvestmentChoice shifted_closed_form_choice(const RegimeModel& model, const QuadraticPenalty& pen, double offset,
                                            std::string label = {});

struct DensityPath {
  TimeGrid grid;
  std::vector<double> log_g;  ///< per node, log_g[0] = 0
  std::vector<double> g;      ///< per node
  std::vector<ScenarioControl> controls;  ///< per step
  std::vector<double> quadratic;          ///< theta0^2 + theta1^2 + slope^2 m2_hat per step

  double terminal() const { return g.back(); }
};

/// Log-space Euler for dG = G(t-)[theta0 dW_hat + theta1 dW1 + int theta0 N0_tilde + int theta2 N_tilde],
/// with mark factors applied at each claim and asset mark.
DensityPath simulate_density(const ScenarioRule& rule, const RegimeModel& model, const MarketPath& market,
                             const SurplusPath& surplus, const FilterPath& filter,
                             std::span<const double> innovation);

/// int (theta0^2 + theta1^2 + slope^2 m2_hat) / (2 (1 - delta)) G dt on one path.
double path_penalty(const DensityPath& density, const QuadraticPenalty& pen);

struct MonteCarloSetup {
  RegimeModel model;
  DelayParams delay;
  QuadraticPenalty penalty;
  TimeGrid grid;
  double x0 = 1.0;
  MarketStart start;
  std::uint64_t seed = 1;
  std::size_t paths = 1000;
  unsigned threads = 1;
  FilterOptions filter_options;
};

/// Everything simulated along one path for a given investment rule.
struct PathBundle {
  ChainPath chain;
  MarketPath market;
  Observations obs;
  FilterPath filter;
  std::vector<double> innovation;
  SurplusPath surplus;
};

/// Path `index` drawn from streams keyed by (seed, index, tag) only.
PathBundle simulate_path(const MonteCarloSetup& setup, const InvestmentRule& rule, std::size_t index);

/// X(T) + kappa Y(T).
double terminal_wealth(const SurplusPath& surplus, const DelayParams& delay);

struct ScenarioSamples {
  std::string label;
  std::vector<double> g_terminal;  ///< per path
  std::vector<double> penalty;     ///< per path
};

/// Per-path samples shared by every scenario on common random numbers.
struct RiskSamples {
  std::vector<double> wealth;
  std::vector<ScenarioSamples> scenarios;
};

RiskSamples sample_risk(const MonteCarloSetup& setup, const InvestmentRule& rule,
                        std::span<const ScenarioRule> family);

struct ScenarioRiskRow {
  std::string label;
  Estimate loss;     ///< mean of -wealth * G(T)
  Estimate penalty;  ///< mean path penalty
  Estimate value;    ///< loss - penalty
  Estimate mean_g;   ///< mean G(T)
};

struct RiskReport {
  std::vector<ScenarioRiskRow> rows;
  std::size_t argmax = 0;

  double rho() const { return rows.at(argmax).value.value; }
  double se() const { return rows.at(argmax).value.se; }
};

/// Finite-family sup of mean[-wealth G(T)] - penalty over the sampled scenarios.
RiskReport risk_of_wealth(std::span<const double> wealth, const RiskSamples& samples);

struct RiskOptions {
  double wealth_shift = 0.0;  ///< deterministic amount added to the terminal wealth
};

RiskReport risk_measure(const MonteCarloSetup& setup, const InvestmentRule& rule,
                        std::span<const ScenarioRule> family, const RiskOptions& options = {});

Estimate penalty(const MonteCarloSetup& setup, const InvestmentRule& rule, const ScenarioRule& scenario);

struct GameReport {
  std::vector<RiskReport> by_investment;  ///< one per investment choice
  std::size_t argmin = 0;

  double value() const { return by_investment.at(argmin).rho(); }
  double se() const { return by_investment.at(argmin).se(); }
  std::size_t argmax() const { return by_investment.at(argmin).argmax; }
};

/// min over investment choices of the finite-family risk measure.
GameReport objective_game(const MonteCarloSetup& setup, std::span<const InvestmentChoice> investments,
                          std::span<const ScenarioRule> family);

/// -x0 + E[int_0^T H(t, ...) dt] along the controls (h = 0); defaults to the
/// closed-form pair (pi*, theta*).
Estimate value_at_zero(const MonteCarloSetup& setup);
Estimate value_at_zero(const MonteCarloSetup& setup, const InvestmentRule& rule, const ScenarioRule& scenario);

}  // namespace insurisk
