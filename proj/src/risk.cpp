#include "insurisk/risk.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "insurisk/parallel.hpp"
#include "insurisk/random.hpp"

namespace insurisk {

void validate_scenario(const ScenarioControl& c, const RegimeModel& model) {
  if (!std::isfinite(c.theta0) || !std::isfinite(c.theta1) || !std::isfinite(c.theta2_slope) ||
      !std::isfinite(c.claim_theta0()))
    throw Error(Errc::invalid_scenario, "scenario coefficients must be finite");
  if (model.claim.intensity.size() > 0 && model.claim.intensity.maxCoeff() > 0.0 && !(1.0 + c.claim_theta0() > 0.0))
    throw Error(Errc::invalid_scenario, "claim factor 1 + theta0 must be positive");
  if (!theta2_admissible(c.theta2_slope, model))
    throw Error(Errc::invalid_scenario, "theta2 slope gives a factor <= 0 on the asset-jump support");
}

ScenarioRule constant_scenario(const ScenarioControl& control, std::string label) {
  if (label.empty())
    label = "const(" + std::to_string(control.theta0) + "," + std::to_string(control.theta1) + "," +
            std::to_string(control.theta2_slope) + ")";
  return {std::move(label), [control](const DecisionContext&) { return control; }};
}

ScenarioRule linear_feedback_scenario(double theta0, double gain, double slope, const DelayParams& delay,
                                      std::string label) {
  if (label.empty()) label = "feedback(" + std::to_string(gain) + ")";
  return {std::move(label), [=](const DecisionContext& ctx) {
            ScenarioControl c;
            c.theta0 = theta0;
            c.theta1 = gain * memory_exposure(delay, ctx.t, ctx.horizon, ctx.x);
            c.theta2_slope = slope;
            return c;
          }};
}

ScenarioRule best_response_scenario(const DelayParams& delay, const QuadraticPenalty& pen, double beta,
                                    std::string label) {
  validate_penalty(pen);
  return {std::move(label), [=](const DecisionContext& ctx) {
            ScenarioControl c;
            c.theta0 = pen.aversion() * (ctx.coeffs.claim_m1 - ctx.pi * beta);
            c.theta1 = (pen.delta - 1.0) * memory_exposure(delay, ctx.t, ctx.horizon, ctx.x);
            c.theta2_slope = (pen.delta - 1.0) * ctx.pi;
            return c;
          }};
}

InvestmentChoice constant_choice(double pi, std::string label) {
  if (label.empty()) label = "pi=" + std::to_string(pi);
  return {std::move(label), constant_investment(pi)};
}

InvestmentChoice closed_form_choice(const RegimeModel& model, const QuadraticPenalty& pen, std::string label) {
  return shifted_closed_form_choice(model, pen, 0.0, std::move(label));
}

InvestmentChoice shifted_closed_form_choice(const RegimeModel& model, const QuadraticPenalty& pen, double offset,
                                            std::string label) {
  validate_penalty(pen);
  if (label.empty()) label = "pi_star" + std::string(offset < 0.0 ? "" : "+") + std::to_string(offset);
  const double beta = model.beta;
  return {std::move(label),
          [=](const DecisionContext& ctx) { return optimal_pi(ctx.coeffs, beta, pen) + offset; }};
}

DensityPath simulate_density(const ScenarioRule& rule, const RegimeModel& model, const MarketPath& market,
                             const SurplusPath& surplus, const FilterPath& filter,
                             std::span<const double> innovation) {
  const TimeGrid& grid = surplus.grid;
  if (!(market.grid == grid) || !(filter.grid == grid) || innovation.size() != grid.steps)
    throw Error(Errc::grid_mismatch, "density inputs must share one grid");
  const std::size_t n = grid.steps;
  const double dt = grid.dt;

  DensityPath d;
  d.grid = grid;
  d.log_g.assign(n + 1, 0.0);
  d.g.assign(n + 1, 1.0);
  d.controls.resize(n);
  d.quadratic.resize(n);

  std::size_t ia = 0;
  std::size_t ic = 0;
  double lg = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const DecisionContext ctx = decision_context(model, surplus, &filter, k);
    const ScenarioControl c = rule.control(ctx);
    d.controls[k] = c;
    const double t0 = c.theta0;
    const double t1 = c.theta1;
    const double s = c.theta2_slope;
    const double t0c = c.claim_theta0();
    d.quadratic[k] = t0 * t0 + t1 * t1 + s * s * ctx.coeffs.asset_m2;

    lg += t0 * innovation[k] - 0.5 * t0 * t0 * dt + t1 * surplus.dW1[k] - 0.5 * t1 * t1 * dt -
          (t0c * ctx.coeffs.claim_intensity + s * ctx.coeffs.asset_m1) * dt;
    for (; ic < market.claim_marks.size() && market.claim_marks[ic].step == k; ++ic) {
      const double f = 1.0 + t0c;
      if (!(f > 0.0))
        throw Error(Errc::density_factor_nonpositive, "claim factor 1 + theta0 <= 0 at step " + std::to_string(k));
      lg += std::log(f);
    }
    for (; ia < market.asset_marks.size() && market.asset_marks[ia].step == k; ++ia) {
      const double f = 1.0 + s * market.asset_marks[ia].size;
      if (!(f > 0.0))
        throw Error(Errc::density_factor_nonpositive, "asset factor 1 + theta2 <= 0 at step " + std::to_string(k));
      lg += std::log(f);
    }
    d.log_g[k + 1] = lg;
    d.g[k + 1] = std::exp(lg);
  }
  return d;
}

double path_penalty(const DensityPath& density, const QuadraticPenalty& pen) {
  double acc = 0.0;
  for (std::size_t k = 0; k < density.quadratic.size(); ++k) acc += density.quadratic[k] * density.g[k];
  return acc * density.grid.dt / (2.0 * pen.aversion());
}

PathBundle simulate_path(const MonteCarloSetup& setup, const InvestmentRule& rule, std::size_t index) {
  PathBundle b;
  Rng chain_rng(setup.seed, index, StreamTag::chain);
  b.chain = simulate_chain(setup.model.chain, setup.grid, chain_rng);
  Rng market_rng(setup.seed, index, StreamTag::market);
  b.market = simulate_market(setup.model, b.chain, setup.grid, market_rng, setup.start);
  b.obs = make_observations(b.market);
  b.filter = run_filter(setup.model, b.obs, setup.filter_options);
  b.innovation = innovations(setup.model, b.obs, b.filter);
  Rng memory_rng(setup.seed, index, StreamTag::memory);
  b.surplus = simulate_surplus(setup.model, setup.delay, b.market, b.chain, &b.filter, rule, setup.x0, memory_rng);
  return b;
}

double terminal_wealth(const SurplusPath& surplus, const DelayParams& delay) {
  return surplus.x.back() + delay.kappa * surplus.y.back();
}

RiskSamples sample_risk(const MonteCarloSetup& setup, const InvestmentRule& rule,
                        std::span<const ScenarioRule> family) {
  if (family.empty()) throw Error(Errc::empty_family, "scenario family is empty");
  validate_penalty(setup.penalty);
  const std::size_t n = setup.paths;
  RiskSamples out;
  out.wealth.assign(n, 0.0);
  out.scenarios.resize(family.size());
  for (std::size_t s = 0; s < family.size(); ++s) {
    out.scenarios[s].label = family[s].label;
    out.scenarios[s].g_terminal.assign(n, 0.0);
    out.scenarios[s].penalty.assign(n, 0.0);
  }
  parallel_for(n, setup.threads, [&](std::size_t i) {
    const PathBundle b = simulate_path(setup, rule, i);
    out.wealth[i] = terminal_wealth(b.surplus, setup.delay);
    for (std::size_t s = 0; s < family.size(); ++s) {
      const DensityPath d = simulate_density(family[s], setup.model, b.market, b.surplus, b.filter, b.innovation);
      out.scenarios[s].g_terminal[i] = d.terminal();
      out.scenarios[s].penalty[i] = path_penalty(d, setup.penalty);
    }
  });
  return out;
}

RiskReport risk_of_wealth(std::span<const double> wealth, const RiskSamples& samples) {
  if (samples.scenarios.empty()) throw Error(Errc::empty_family, "scenario family is empty");
  const std::size_t n = wealth.size();
  RiskReport rep;
  std::vector<double> loss(n);
  std::vector<double> value(n);
  for (const ScenarioSamples& sc : samples.scenarios) {
    if (sc.g_terminal.size() != n) throw Error(Errc::grid_mismatch, "wealth and scenario samples differ in size");
    for (std::size_t i = 0; i < n; ++i) {
      loss[i] = -wealth[i] * sc.g_terminal[i];
      value[i] = loss[i] - sc.penalty[i];
    }
    ScenarioRiskRow row;
    row.label = sc.label;
    row.loss = mean_estimate(loss);
    row.penalty = mean_estimate(sc.penalty);
    row.value = {row.loss.value - row.penalty.value, mean_estimate(value).se};
    row.mean_g = mean_estimate(sc.g_terminal);
    rep.rows.push_back(std::move(row));
  }
  for (std::size_t s = 1; s < rep.rows.size(); ++s)
    if (rep.rows[s].value.value > rep.rows[rep.argmax].value.value) rep.argmax = s;
  return rep;
}

RiskReport risk_measure(const MonteCarloSetup& setup, const InvestmentRule& rule,
                        std::span<const ScenarioRule> family, const RiskOptions& options) {
  RiskSamples samples = sample_risk(setup, rule, family);
  for (double& w : samples.wealth) w += options.wealth_shift;
  return risk_of_wealth(samples.wealth, samples);
}

Estimate penalty(const MonteCarloSetup& setup, const InvestmentRule& rule, const ScenarioRule& scenario) {
  const RiskSamples samples = sample_risk(setup, rule, std::span<const ScenarioRule>(&scenario, 1));
  return mean_estimate(samples.scenarios.front().penalty);
}

GameReport objective_game(const MonteCarloSetup& setup, std::span<const InvestmentChoice> investments,
                          std::span<const ScenarioRule> family) {
  if (investments.empty()) throw Error(Errc::empty_family, "investment family is empty");
  if (family.empty()) throw Error(Errc::empty_family, "scenario family is empty");
  GameReport rep;
  for (const InvestmentChoice& choice : investments) rep.by_investment.push_back(risk_measure(setup, choice.rule, family));
  for (std::size_t i = 1; i < rep.by_investment.size(); ++i)
    if (rep.by_investment[i].rho() < rep.by_investment[rep.argmin].rho()) rep.argmin = i;
  return rep;
}

Estimate value_at_zero(const MonteCarloSetup& setup) {
  const InvestmentChoice pi = closed_form_choice(setup.model, setup.penalty);
  const ScenarioRule theta = best_response_scenario(setup.delay, setup.penalty, setup.model.beta);
  return value_at_zero(setup, pi.rule, theta);
}

Estimate value_at_zero(const MonteCarloSetup& setup, const InvestmentRule& rule, const ScenarioRule& scenario) {
  validate_penalty(setup.penalty);
  std::vector<double> samples(setup.paths, 0.0);
  parallel_for(setup.paths, setup.threads, [&](std::size_t i) {
    const PathBundle b = simulate_path(setup, rule, i);
    const DensityPath d = simulate_density(scenario, setup.model, b.market, b.surplus, b.filter, b.innovation);
    const SurplusPath& s = b.surplus;
    const double horizon = setup.grid.horizon();
    double integral = 0.0;
    for (std::size_t k = 0; k < setup.grid.steps; ++k) {
      const GameState st = make_game_state(setup.model, setup.delay, setup.grid.time(k), horizon, s.x[k], s.y[k],
                                           s.u[k], b.filter.lambda_hat.col(static_cast<Eigen::Index>(k)), d.g[k]);
      const ScenarioControl& c = d.controls[k];
      integral += hamiltonian(st, Controls<double>{s.pi[k], c.theta0, c.theta1, c.theta2_slope}, setup.penalty);
    }
    samples[i] = -setup.x0 + integral * setup.grid.dt;
  });
  return mean_estimate(samples);
}

}  // namespace insurisk
