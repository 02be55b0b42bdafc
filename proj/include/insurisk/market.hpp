#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "insurisk/chain.hpp"
#include "insurisk/grid.hpp"
#include "insurisk/random.hpp"

namespace insurisk {

/// Jump-size law with analytically cached moments.
///
/// Lognormal sizes are z = shift + exp(mu + sigma * N(0,1)); shift = -1 gives
/// the usual multiplicative 1 + z ~ lognormal convention for asset jumps.
class JumpSizeLaw {
 public:
  enum class Kind { point_mass, exponential, lognormal };

  static JumpSizeLaw point_mass(double value);
  static JumpSizeLaw exponential(double mean);
  static JumpSizeLaw lognormal(double mu, double sigma, double shift = 0.0);

  Kind kind() const { return kind_; }
  double mean() const { return m1_; }
  double second_moment() const { return m2_; }
  /// Infimum / supremum of the support.
  double support_lo() const;
  double support_hi() const;

  double sample(Rng& rng) const;
  /// Mass of the atom at z (point mass only).
  double atom_mass(double z) const;
  /// Lebesgue density at z (continuous laws only).
  double pdf(double z) const;

  double param(int i) const { return params_[i]; }

 private:
  JumpSizeLaw(Kind kind, double a, double b, double c);

  Kind kind_;
  double params_[3];
  double m1_;
  double m2_;
};

/// Per-state intensity with per-state size law.
struct MarkProcess {
  Eigen::VectorXd intensity;
  std::vector<JumpSizeLaw> laws;
};

struct RegimeModel {
  ChainModel chain;
  Eigen::VectorXd r;      ///< interest rate per state
  Eigen::VectorXd alpha;  ///< appreciation rate per state
  double beta = 0.0;      ///< volatility, regime independent
  MarkProcess asset;      ///< asset jumps: eps_j, nu_j
  MarkProcess claim;      ///< claims: lambda_j, f_j
  double premium = 0.0;
  /// Surplus carries pi * int z (N - eps nu dt) instead of pi * int z N.
  bool compensate_asset_jumps = false;

  Eigen::Index states() const { return chain.states(); }
};

/// Throws on any invariant violation; returns the model otherwise.
RegimeModel validate_regime_model(RegimeModel model);

struct MarkMoments {
  double intensity = 0.0;
  double m1 = 0.0;  ///< intensity * E[z]
  double m2 = 0.0;  ///< intensity * E[z^2]
};

struct RegimeCompensators {
  MarkMoments asset;
  MarkMoments claim;
};

/// Intensity-weighted first and second moments of both mark processes in one state.
RegimeCompensators regime_compensators(const RegimeModel& model, int state);

struct Mark {
  double time = 0.0;
  double size = 0.0;
  std::size_t step = 0;  ///< index k of the step (t_k, t_{k+1}] containing the mark
};

struct MarketPath {
  TimeGrid grid;
  std::vector<double> bond;
  std::vector<double> stock;
  std::vector<double> dW;    ///< Brownian increment per step
  std::vector<double> dPsi;  ///< continuous log-return increment <phi, Lambda> dt + beta dW
  std::vector<Mark> asset_marks;
  std::vector<Mark> claim_marks;
  std::vector<double> claim_count;
  std::vector<double> aggregate_claims;
  std::vector<double> reserve;
};

struct MarketStart {
  double stock = 1.0;
  double reserve = 0.0;
};

/// Log-Euler simulation of S with multiplicative jumps, plus the claim
/// process; the regime of each step is frozen at its left endpoint.
MarketPath simulate_market(const RegimeModel& model, const ChainPath& chain, const TimeGrid& grid,
                           Rng& rng, const MarketStart& start = {});

/// R(t) = r0 + p t - Z(t) on the grid.
std::vector<double> reserve_path(const RegimeModel& model, const MarketPath& market, double r0);

}  // namespace insurisk
