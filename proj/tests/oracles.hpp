#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library's numerical code.

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

/// exp(A t) for A = [[-a, b], [a, -b]] (columns sum to zero):
/// Pi - A e^{-(a+b)t} / (a+b) with Pi = s 1^T, s = (b, a) / (a+b).
inline Eigen::Matrix2d expm_two_state(double a, double b, double t) {
  const double q = a + b;
  Eigen::Matrix2d A;
  A << -a, b, a, -b;
  Eigen::Matrix2d pi;
  pi << b / q, b / q, a / q, a / q;
  return pi - A * (std::exp(-q * t) / q);
}

inline Eigen::Vector2d stationary_two_state(double a, double b) { return {b / (a + b), a / (a + b)}; }

/// Y_k = sum_{j=k-m}^{k-1} e^{zeta (t_j - t_k)} X_j dW1_j, indices below zero skipped.
inline double window_quadrature(const std::vector<double>& x, const std::vector<double>& dw1, double zeta,
                                std::size_t m, double dt, std::size_t k) {
  double y = 0.0;
  const std::size_t lo = k >= m ? k - m : 0;
  for (std::size_t j = lo; j < k; ++j)
    y += std::exp(zeta * (static_cast<double>(j) - static_cast<double>(k)) * dt) * x[j] * dw1[j];
  return y;
}

struct NoDelayInputs {
  double x0, premium, r, alpha, beta, theta_flow, pi, dt;
};

/// Euler path of dX = [p + (r - theta) X + pi (alpha - r)] dt + pi beta dW + pi dJ - dZ.
inline std::vector<double> no_delay_surplus(const NoDelayInputs& in, const std::vector<double>& dw,
                                            const std::vector<double>& asset_jump_per_step,
                                            const std::vector<double>& claim_per_step) {
  std::vector<double> x(dw.size() + 1, in.x0);
  for (std::size_t k = 0; k < dw.size(); ++k) {
    x[k + 1] = x[k] + (in.premium + (in.r - in.theta_flow) * x[k] + in.pi * (in.alpha - in.r)) * in.dt +
               in.pi * in.beta * dw[k] + in.pi * asset_jump_per_step[k] - claim_per_step[k];
  }
  return x;
}

/// log of the Doleans-Dade exponential of c (N - eps t) at time T with N_T = n.
inline double log_poisson_exponential(double c, double eps, double horizon, std::size_t n) {
  return static_cast<double>(n) * std::log1p(c) - c * eps * horizon;
}

/// x0 e^{rT} + p (e^{rT} - 1) / r.
inline double linear_ode(double x0, double p, double r, double horizon) {
  return x0 * std::exp(r * horizon) + p * std::expm1(r * horizon) / r;
}

}  // namespace oracle
