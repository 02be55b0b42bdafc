#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "insurisk/error.hpp"
#include "insurisk/filter.hpp"
#include "insurisk/market.hpp"
#include "insurisk/surplus.hpp"

namespace insurisk {

/// Quadratic penalty weight 1 / (2 (1 - delta)); requires delta < 1.
struct QuadraticPenalty {
  double delta = 0.0;

  double aversion() const { return 1.0 - delta; }
};

void validate_penalty(const QuadraticPenalty& pen);

/// kappa X (1 - e^{-zeta rho} 1{t <= T - rho}): the W1 exposure of kappa Y.
template <typename Scalar>
Scalar memory_exposure(const DelayParams& delay, double t, double horizon, const Scalar& x) {
  const double indicator = t <= horizon - delay.rho ? 1.0 : 0.0;
  return delay.kappa * x * (1.0 - std::exp(-delay.zeta * delay.rho) * indicator);
}

/// Arguments of the Hamiltonian at one instant.
template <typename Scalar>
struct GameStateT {
  double t = 0.0;
  double horizon = 0.0;
  Scalar x{0};
  Scalar y{0};
  Scalar u{0};
  Scalar g{1};  ///< scenario density level, > 0
  Eigen::VectorXd lambda_hat;
  FilteredCoefficients<Scalar> coeffs;
  DelayParams delay;
  double premium = 0.0;
  double beta = 0.0;
  Scalar exposure{0};  ///< memory_exposure(delay, t, horizon, x)
  // Martingale-representation arguments of the formal signature; the driver
  // does not depend on them.
  Scalar k1{0}, k2{0}, upsilon1{0}, upsilon2{0};
};

using GameState = GameStateT<double>;

GameState make_game_state(const RegimeModel& model, const DelayParams& delay, double t, double horizon, double x,
                          double y, double u, const Eigen::VectorXd& lambda_hat, double g = 1.0);

/// A point (pi, theta0, theta1, theta2 slope) of the control space.
template <typename Scalar>
struct Controls {
  Scalar pi{0};
  Scalar theta0{0};
  Scalar theta1{0};
  Scalar slope{0};  ///< theta2(t, z) = slope * z
};

/// The two jump integrals a general theta2(.) contributes:
/// int z theta2(z) nu_hat(dz) and int theta2(z)^2 nu_hat(dz).
template <typename Scalar>
struct Theta2Integrals {
  Scalar z_theta2{0};
  Scalar theta2_sq{0};
};

/// H = -l_tilde for the quadratic penalty with theta2 supplied through its
/// jump integrals (tabulated path).
template <typename Scalar>
Scalar hamiltonian(const GameStateT<Scalar>& s, const Scalar& pi, const Scalar& theta0, const Scalar& theta1,
                   const Theta2Integrals<Scalar>& theta2, const QuadraticPenalty& pen) {
  const auto& c = s.coeffs;
  const DelayParams& d = s.delay;
  const double lag_sign = d.negate_lagged_term ? -1.0 : 1.0;
  const Scalar drift = s.premium + (c.r_hat - d.theta_flow - d.xi) * s.x + pi * (c.alpha_hat - c.r_hat) +
                       (theta_bar(d) - d.kappa * d.zeta) * s.y + lag_sign * d.xi * s.u + pi * s.beta * theta0 +
                       theta1 * s.exposure + pi * theta2.z_theta2 - c.claim_m1 * (1.0 + theta0);
  const Scalar quad = theta0 * theta0 + theta1 * theta1 + theta2.theta2_sq;
  return -s.g * drift - s.g * quad / (2.0 * pen.aversion());
}

/// H restricted to the linear theta2 family.
template <typename Scalar>
Scalar hamiltonian(const GameStateT<Scalar>& s, const Controls<Scalar>& u, const QuadraticPenalty& pen) {
  const Scalar m2 = s.coeffs.asset_m2;
  return hamiltonian(s, u.pi, u.theta0, u.theta1, Theta2Integrals<Scalar>{u.slope * m2, u.slope * u.slope * m2},
                     pen);
}

/// Analytic partials (d/dpi, d/dtheta0, d/dtheta1, d/dslope).
template <typename Scalar>
std::array<Scalar, 4> hamiltonian_gradient(const GameStateT<Scalar>& s, const Controls<Scalar>& u,
                                           const QuadraticPenalty& pen) {
  const auto& c = s.coeffs;
  const double inv = 1.0 / pen.aversion();
  return {
      -s.g * ((c.alpha_hat - c.r_hat) + s.beta * u.theta0 + u.slope * c.asset_m2),
      -s.g * (u.pi * s.beta - c.claim_m1) - s.g * u.theta0 * inv,
      -s.g * s.exposure - s.g * u.theta1 * inv,
      -s.g * u.pi * c.asset_m2 - s.g * u.slope * c.asset_m2 * inv,
  };
}

/// Minimizer in pi of sup_theta H:
/// [alpha_hat - r_hat + (1-delta) beta m1^0] / [(1-delta)(beta^2 + m2)].
template <typename Scalar>
Scalar optimal_pi(const FilteredCoefficients<Scalar>& c, double beta, const QuadraticPenalty& pen) {
  const Scalar denom = pen.aversion() * (beta * beta + c.asset_m2);
  if (!(std::abs(static_cast<double>(denom)) > 0.0))
    throw Error(Errc::pi_denominator_singular, "(1 - delta)(beta^2 + m2) vanishes");
  return (c.alpha_hat - c.r_hat + pen.aversion() * beta * c.claim_m1) / denom;
}

/// Maximizers in theta of H for a given pi.
template <typename Scalar>
Controls<Scalar> optimal_thetas(const GameStateT<Scalar>& s, const Scalar& pi, const QuadraticPenalty& pen) {
  Controls<Scalar> u;
  u.pi = pi;
  u.theta0 = pen.aversion() * (s.coeffs.claim_m1 - pi * s.beta);
  u.theta1 = (pen.delta - 1.0) * s.exposure;
  u.slope = (pen.delta - 1.0) * pi;
  return u;
}

struct ClosedFormControls {
  double pi_star = 0.0;
  double theta0_star = 0.0;
  double theta1_star = 0.0;
  double theta2_slope = 0.0;
  bool theta2_admissible = true;  ///< slope * z > -1 on the asset-jump support
};

ClosedFormControls closed_form_controls(const GameState& state, const RegimeModel& model,
                                        const QuadraticPenalty& pen);

/// slope * z > -1 for every z in the support of each active asset-jump law.
bool theta2_admissible(double slope, const RegimeModel& model);

/// Two-state investment rule written per state and weight p = P(e_1):
/// {[a1 - r1 - (a2 - r2) + (1-d) b (c1 - c2)] p + a2 - r2 + (1-d) b c2}
///   / {(1-d)[b^2 + m2_2 + (m2_1 - m2_2) p]}
/// with c_i the claim first moments and m2_i the asset second moments.
struct TwoStateInputs {
  double alpha1, alpha2, r1, r2, beta;
  double claim_m1_1, claim_m1_2;
  double asset_m2_1, asset_m2_2;
  double delta;
  double p1;
};

double optimal_pi_two_state(const TwoStateInputs& in);

struct Interval {
  double lo = -2.0;
  double hi = 2.0;

  bool contains(double v) const { return lo <= v && v <= hi; }
};

struct ControlBounds {
  Interval pi;
  Interval theta0;
  Interval theta1;
  Interval slope;
};

void validate_bounds(const ControlBounds& bounds);

struct SaddleReport {
  double inf_sup = 0.0;
  double sup_inf = 0.0;
  double gap = 0.0;
  double resolution_bound = 0.0;
  Controls<double> closed_form;
  Controls<double> inf_sup_point;  ///< grid argmin pi with the grid best response theta
  Controls<double> sup_inf_point;  ///< grid argmax theta with its grid best response pi
  std::array<double, 4> cell;      ///< grid spacing per axis
  std::array<double, 4> fd_residual;
  std::vector<double> sup_profile;  ///< sup_theta H at each pi grid point, parabola-refined per axis
  bool closed_form_inside = true;
  bool gap_ok = false;
  bool argmin_ok = false;
  bool argmax_ok = false;
  bool fd_ok = false;

  bool passed() const { return closed_form_inside && gap_ok && argmin_ok && argmax_ok && fd_ok; }
};

/// Grid search of inf_pi sup_theta H and sup_theta inf_pi H on a product grid
/// with grid_n points per axis, compared against the closed forms.
SaddleReport verify_saddle(const GameState& state, const ControlBounds& bounds, const QuadraticPenalty& pen,
                           std::size_t grid_n);

}  // namespace insurisk
