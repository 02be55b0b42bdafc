#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "insurisk/grid.hpp"
#include "insurisk/market.hpp"

namespace insurisk {

/// What the insurer observes: continuous log-return increments and the marks.
struct Observations {
  TimeGrid grid;
  std::vector<double> dPsi;
  std::vector<Mark> asset_marks;
  std::vector<Mark> claim_marks;
};

Observations make_observations(const MarketPath& market);

/// Aggregates `factor` consecutive steps into one (same underlying path, coarser grid).
Observations coarsen(const Observations& obs, std::size_t factor);

/// Filter trajectory; one column per grid node.
///
/// q and qbar are stored up to per-node scale factors: the unnormalized
/// values are exp(log_scale_q[k]) * q.col(k) and exp(log_scale_qbar[k]) *
/// qbar.col(k). With these scales q = diag(gamma) qbar holds exactly.
struct FilterPath {
  TimeGrid grid;
  Eigen::MatrixXd log_gamma;
  Eigen::MatrixXd qbar;
  Eigen::MatrixXd q;
  Eigen::MatrixXd lambda_hat;
  std::vector<double> log_scale_q;
  std::vector<double> log_scale_qbar;
  bool rescaled = false;  ///< true when the q-form fallback was used

  Eigen::Index states() const { return lambda_hat.rows(); }
};

struct FilterOptions {
  /// Mixture weights defining the reference mark laws; empty means the
  /// initial chain distribution.
  Eigen::VectorXd asset_reference;
  Eigen::VectorXd claim_reference;
};

/// Transformed unnormalized filter: log gamma_j accumulated per step, qbar
/// advanced by the explicit midpoint rule for dqbar/dt = L^-1 A L qbar with L
/// frozen at its end-of-step value, then q = L qbar and
/// Lambda_hat = q / <q, 1>.
FilterPath run_filter(const RegimeModel& model, const Observations& obs, const FilterOptions& options = {});

/// Discrete-time HMM filter on the same grid: predict with exp(A dt), correct
/// with the exact per-step likelihood of the observations.
FilterPath exact_discrete_filter(const RegimeModel& model, const Observations& obs);

/// Innovation increments dW_hat_k = (dPsi_k - <phi, Lambda_hat_k> dt) / beta.
std::vector<double> innovations(const RegimeModel& model, const Observations& obs, const FilterPath& filter);

/// Sup-norm distance between two filters' Lambda_hat over all nodes.
double sup_gap(const FilterPath& a, const FilterPath& b);

/// Filter-weighted model coefficients.
template <typename Scalar>
struct FilteredCoefficients {
  Scalar alpha_hat{0};
  Scalar r_hat{0};
  Scalar claim_intensity{0};  ///< sum_j w_j lambda_j
  Scalar claim_m1{0};         ///< sum_j w_j lambda_j int z f_j(dz)
  Scalar claim_m2{0};
  Scalar asset_intensity{0};  ///< sum_j w_j eps_j
  Scalar asset_m1{0};         ///< sum_j w_j eps_j int z nu_j(dz)
  Scalar asset_m2{0};         ///< sum_j w_j eps_j int z^2 nu_j(dz)
};

template <typename Scalar, typename Derived>
FilteredCoefficients<Scalar> filtered_coefficients(const RegimeModel& model,
                                                   const Eigen::MatrixBase<Derived>& weights) {
  FilteredCoefficients<Scalar> c;
  for (Eigen::Index j = 0; j < model.states(); ++j) {
    const Scalar w = weights(j);
    const RegimeCompensators comp = regime_compensators(model, static_cast<int>(j));
    c.alpha_hat += w * model.alpha(j);
    c.r_hat += w * model.r(j);
    c.claim_intensity += w * comp.claim.intensity;
    c.claim_m1 += w * comp.claim.m1;
    c.claim_m2 += w * comp.claim.m2;
    c.asset_intensity += w * comp.asset.intensity;
    c.asset_m1 += w * comp.asset.m1;
    c.asset_m2 += w * comp.asset.m2;
  }
  return c;
}

inline FilteredCoefficients<double> filtered_coefficients(const RegimeModel& model,
                                                          const Eigen::VectorXd& weights) {
  return filtered_coefficients<double>(model, weights);
}

}  // namespace insurisk
