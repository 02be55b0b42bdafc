#include "insurisk/surplus.hpp"

#include <cmath>

#include "insurisk/error.hpp"

namespace insurisk {

void validate_delay(const DelayParams& delay) {
  if (!(delay.rho >= 0.0) || !(delay.zeta >= 0.0) || !(delay.kappa >= 0.0) || !(delay.theta_flow >= 0.0) ||
      !(delay.xi >= 0.0))
    throw Error(Errc::invalid_model, "delay parameters must be non-negative");
}

double window_normalizer(double zeta, double rho) {
  if (zeta == 0.0) return rho;
  return -std::expm1(-zeta * rho) / zeta;
}

double theta_bar(const DelayParams& delay) {
  if (delay.rho == 0.0) return 0.0;
  return delay.theta_flow / window_normalizer(delay.zeta, delay.rho);
}

double capital_flow(double /*t*/, double x, double ybar, double u, const DelayParams& delay) {
  return (delay.theta_flow + delay.xi) * x - delay.theta_flow * ybar - delay.xi * u;
}

double step_noisy_memory(double y, std::size_t k, std::span<const double> x, std::span<const double> dw1,
                         const DelayParams& delay, double dt) {
  if (x.size() <= k || dw1.size() <= k) throw Error(Errc::missing_history, "history does not reach step k");
  const std::size_t m = grid_multiple(delay.rho, dt, Errc::delay_not_grid_multiple, "rho not a grid multiple");
  double next = y - delay.zeta * y * dt + x[k] * dw1[k];
  if (k >= m) next -= std::exp(-delay.zeta * delay.rho) * x[k - m] * dw1[k - m];
  return next;
}

InvestmentRule constant_investment(double pi) {
  return [pi](const DecisionContext&) { return pi; };
}

DecisionContext decision_context(const RegimeModel& model, const SurplusPath& path, const FilterPath* filter,
                                 std::size_t k) {
  DecisionContext ctx;
  ctx.t = path.grid.time(k);
  ctx.horizon = path.grid.horizon();
  ctx.step = k;
  ctx.x = path.x[k];
  ctx.y = path.y[k];
  ctx.ybar = path.ybar[k];
  ctx.u = path.u[k];
  ctx.lambda_hat = filter ? Eigen::VectorXd(filter->lambda_hat.col(static_cast<Eigen::Index>(k)))
                          : model.chain.initial;
  ctx.coeffs = filtered_coefficients(model, ctx.lambda_hat);
  ctx.pi = k < path.pi.size() ? path.pi[k] : 0.0;
  return ctx;
}

SurplusPath simulate_surplus(const RegimeModel& model, const DelayParams& delay, const MarketPath& market,
                             const ChainPath& chain, const FilterPath* filter, const InvestmentRule& strategy,
                             double x0, Rng& rng) {
  const TimeGrid& grid = market.grid;
  if (!(chain.grid == grid) || (filter && !(filter->grid == grid)))
    throw Error(Errc::grid_mismatch, "chain, market and filter grids must coincide");
  validate_delay(delay);
  const std::size_t m = grid_multiple(delay.rho, grid.dt, Errc::delay_not_grid_multiple, "rho not a grid multiple");
  const std::size_t n = grid.steps;
  const double dt = grid.dt;
  const double sqrt_dt = std::sqrt(dt);
  const double norm = delay.rho > 0.0 ? window_normalizer(delay.zeta, delay.rho) : 0.0;
  const double lag_sign = delay.negate_lagged_term ? -1.0 : 1.0;

  SurplusPath path;
  path.grid = grid;
  path.x.assign(n + 1, x0);
  path.y.assign(n + 1, 0.0);
  path.ybar.assign(n + 1, 0.0);
  path.u.assign(n + 1, x0);
  path.dW1.resize(n);
  path.flow.resize(n);
  path.pi.resize(n);

  std::size_t asset_cursor = 0, claim_cursor = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const int j = chain.states[k];
    path.pi[k] = strategy(decision_context(model, path, filter, k));
    const double pi = path.pi[k];
    const double x = path.x[k];
    path.flow[k] = capital_flow(grid.time(k), x, path.ybar[k], path.u[k], delay);
    path.dW1[k] = sqrt_dt * rng.normal();

    double drift = model.premium + (model.r(j) - delay.theta_flow - delay.xi) * x +
                   pi * (model.alpha(j) - model.r(j)) + delay.theta_flow * path.ybar[k] +
                   lag_sign * delay.xi * path.u[k];
    if (model.compensate_asset_jumps) drift -= pi * regime_compensators(model, j).asset.m1;
    double next = x + drift * dt + pi * model.beta * market.dW[k];
    while (asset_cursor < market.asset_marks.size() && market.asset_marks[asset_cursor].step == k)
      next += pi * market.asset_marks[asset_cursor++].size;
    while (claim_cursor < market.claim_marks.size() && market.claim_marks[claim_cursor].step == k)
      next -= market.claim_marks[claim_cursor++].size;

    path.x[k + 1] = next;
    path.y[k + 1] = step_noisy_memory(path.y[k], k, path.x, path.dW1, delay, dt);
    path.ybar[k + 1] = norm > 0.0 ? path.y[k + 1] / norm : 0.0;
    path.u[k + 1] = k + 1 >= m ? path.x[k + 1 - m] : x0;
  }
  return path;
}

AdmissibilityReport admissibility_report(const SurplusPath& path, const RegimeModel& model,
                                         const DelayParams& delay) {
  AdmissibilityReport report;
  const double dt = path.grid.dt;
  const double lag_sign = delay.negate_lagged_term ? -1.0 : 1.0;
  for (std::size_t k = 0; k < path.pi.size(); ++k) {
    const double pi = path.pi[k];
    report.pi_square_integral += pi * pi * dt;
    report.diffusion_integral += pi * pi * model.beta * model.beta * dt;
    for (Eigen::Index j = 0; j < model.states(); ++j) {
      const RegimeCompensators comp = regime_compensators(model, static_cast<int>(j));
      double drift = model.premium + (model.r(j) - delay.theta_flow - delay.xi) * path.x[k] +
                     pi * (model.alpha(j) - model.r(j)) + delay.theta_flow * path.ybar[k] +
                     lag_sign * delay.xi * path.u[k];
      if (model.compensate_asset_jumps) drift -= pi * comp.asset.m1;
      report.drift_integral += std::abs(drift) * dt;
      report.jump_integral += (pi * pi * comp.asset.m2 + comp.claim.m2) * dt;
    }
  }
  report.finite = std::isfinite(report.pi_square_integral) && std::isfinite(report.drift_integral) &&
                  std::isfinite(report.diffusion_integral) && std::isfinite(report.jump_integral);
  return report;
}

}  // namespace insurisk
