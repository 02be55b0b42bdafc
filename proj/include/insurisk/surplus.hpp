#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "insurisk/chain.hpp"
#include "insurisk/filter.hpp"
#include "insurisk/market.hpp"
#include "insurisk/random.hpp"

namespace insurisk {

struct DelayParams {
  double rho = 0.0;         ///< delay window length
  double zeta = 0.0;        ///< exponential averaging rate
  double kappa = 0.0;       ///< weight of Y(T) in the terminal functional
  double theta_flow = 0.0;  ///< weight on X - Ybar in the capital flow
  double xi = 0.0;          ///< weight on X - U in the capital flow
  /// Use -xi U instead of +xi U in the surplus drift and Hamiltonian.
  bool negate_lagged_term = false;
};

void validate_delay(const DelayParams& delay);

/// int_{-rho}^0 e^{zeta s} ds.
double window_normalizer(double zeta, double rho);

/// theta_flow / window_normalizer, so that theta_flow * Ybar == this * Y; zero for an empty window.
double theta_bar(const DelayParams& delay);

/// Capital inflow/outflow (theta + xi) X - theta Ybar - xi U.
double capital_flow(double t, double x, double ybar, double u, const DelayParams& delay);

/// Y_{k+1} from Y_k using the exact lagged increment
///   Y_{k+1} = Y_k - zeta Y_k dt + X_k dW1_k - e^{-zeta rho} X_{k-m} dW1_{k-m},
/// with m = rho / dt and increments before time zero equal to zero. `x` and
/// `dw1` must hold entries 0..k.
double step_noisy_memory(double y, std::size_t k, std::span<const double> x, std::span<const double> dw1,
                         const DelayParams& delay, double dt);

/// Everything a feedback rule may condition on at the left end of a step.
struct DecisionContext {
  double t = 0.0;
  double horizon = 0.0;
  std::size_t step = 0;
  double x = 0.0;
  double y = 0.0;
  double ybar = 0.0;
  double u = 0.0;
  Eigen::VectorXd lambda_hat;
  FilteredCoefficients<double> coeffs;
  double pi = 0.0;  ///< investment already chosen for this step (read by scenario rules)
};

using InvestmentRule = std::function<double(const DecisionContext&)>;

InvestmentRule constant_investment(double pi);

struct SurplusPath {
  TimeGrid grid;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> ybar;
  std::vector<double> u;
  std::vector<double> dW1;   ///< per step
  std::vector<double> flow;  ///< capital flow at the left end of each step
  std::vector<double> pi;    ///< investment per step
};

/// Euler integration of the delayed surplus with noisy memory.
///
/// `filter` supplies Lambda_hat for the investment rule; when null the rule
/// sees the initial chain distribution. W1 is drawn from `rng`.
SurplusPath simulate_surplus(const RegimeModel& model, const DelayParams& delay, const MarketPath& market,
                             const ChainPath& chain, const FilterPath* filter, const InvestmentRule& strategy,
                             double x0, Rng& rng);

/// Builds the context a rule sees at node k of a simulated path.
DecisionContext decision_context(const RegimeModel& model, const SurplusPath& path, const FilterPath* filter,
                                 std::size_t k);

struct AdmissibilityReport {
  double pi_square_integral = 0.0;  ///< int pi^2 dt
  double drift_integral = 0.0;      ///< sum_j int |state-j drift| dt
  double diffusion_integral = 0.0;  ///< int pi^2 beta^2 dt
  double jump_integral = 0.0;       ///< sum_j int (pi^2 eps_j m2_j + lambda_j m2^0_j) dt
  bool finite = true;
};

AdmissibilityReport admissibility_report(const SurplusPath& path, const RegimeModel& model,
                                         const DelayParams& delay);

}  // namespace insurisk
