#pragma once

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "insurisk/commands.hpp"
#include "insurisk/config.hpp"
#include "insurisk/game.hpp"

namespace fixture {

inline insurisk::RunConfig bundled(const char* name) {
  return insurisk::load_config(insurisk::bundled_config_dir() / name);
}

/// Random two-state model with a random prior; draws are uniform on boxes.
inline insurisk::RegimeModel random_two_state_model(std::mt19937_64& gen) {
  using namespace insurisk;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RegimeModel m;
  const double a = 0.1 + u(gen), b = 0.1 + u(gen);
  m.chain.generator = (Eigen::MatrixXd(2, 2) << -a, b, a, -b).finished();
  const double p = u(gen);
  m.chain.initial = Eigen::Vector2d(p, 1.0 - p);
  m.r = Eigen::Vector2d(0.1 * u(gen), 0.1 * u(gen));
  m.alpha = Eigen::Vector2d(0.2 * u(gen), 0.2 * u(gen));
  m.beta = 0.05 + 0.4 * u(gen);
  m.asset = {Eigen::Vector2d(u(gen), u(gen)),
             {JumpSizeLaw::point_mass(0.05 + u(gen)), JumpSizeLaw::lognormal(-2.0 + u(gen), 0.5 * u(gen), -0.5)}};
  m.claim = {Eigen::Vector2d(u(gen), u(gen)),
             {JumpSizeLaw::exponential(0.1 + u(gen)), JumpSizeLaw::point_mass(0.05 + u(gen))}};
  m.premium = u(gen);
  return validate_regime_model(m);
}

struct RandomGame {
  insurisk::RegimeModel model;
  insurisk::QuadraticPenalty pen;
  insurisk::GameState state;
};

/// Random game state whose closed-form controls lie inside [-2, 2]^4.
inline RandomGame random_game(std::mt19937_64& gen) {
  using namespace insurisk;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    RandomGame g;
    g.model = random_two_state_model(gen);
    g.pen.delta = 0.9 * u(gen);
    DelayParams d;
    d.rho = 0.1;
    d.zeta = u(gen);
    d.kappa = 0.5 * u(gen);
    d.theta_flow = 0.2 * u(gen);
    d.xi = 0.2 * u(gen);
    const double w = u(gen);
    const double t = u(gen);
    g.state = make_game_state(g.model, d, t, 1.0, 0.5 + 1.5 * u(gen), u(gen) - 0.5, 0.5 + 1.5 * u(gen),
                              Eigen::Vector2d(w, 1.0 - w), 0.5 + u(gen));
    const double pi = optimal_pi(g.state.coeffs, g.state.beta, g.pen);
    const Controls<double> c = optimal_thetas(g.state, pi, g.pen);
    if (std::abs(c.pi) < 1.9 && std::abs(c.theta0) < 1.9 && std::abs(c.theta1) < 1.9 && std::abs(c.slope) < 1.9)
      return g;
  }
}

}  // namespace fixture
