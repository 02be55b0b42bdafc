#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "insurisk/grid.hpp"
#include "insurisk/random.hpp"

namespace insurisk {

/// Finite-state hidden chain with canonical unit-vector states.
///
/// The generator is stored column-oriented: a_ji = generator(j, i) is the
/// intensity of a move from e_i to e_j, so columns sum to zero and the state
/// distribution obeys dq/dt = A q.
struct ChainModel {
  Eigen::MatrixXd generator;
  Eigen::VectorXd initial;

  Eigen::Index states() const { return initial.size(); }

  /// The generator is time-constant; the evaluation point keeps the call
  /// shape of a time-dependent A(t).
  const Eigen::MatrixXd& generator_at(double /*t*/) const { return generator; }
};

/// Validates generator sign/column-sum constraints and the initial simplex.
ChainModel validate_chain_model(ChainModel model);

/// Piecewise-constant chain trajectory, sampled right-continuously onto a grid.
struct ChainPath {
  TimeGrid grid;
  std::vector<int> states;          ///< state index per grid node
  int initial_state = 0;
  std::vector<double> jump_times;   ///< exact switch epochs in (0, T]
  std::vector<int> jump_states;     ///< state entered at each epoch

  /// State index at an arbitrary time (right-continuous).
  int state_at(double t) const;
  /// Exact occupation time of each state on [0, t].
  Eigen::VectorXd occupation(double t, Eigen::Index num_states) const;
};

/// Exact simulation: exponential holding times, embedded-chain transitions.
ChainPath simulate_chain(const ChainModel& model, const TimeGrid& grid, Rng& rng);
ChainPath simulate_chain(const ChainModel& model, double horizon, double dt, std::uint64_t seed);

/// Phi(t) = Lambda(t) - Lambda(0) - A * int_0^t Lambda ds on every grid node,
/// one column per node.
Eigen::MatrixXd chain_martingale_residual(const ChainPath& path, const ChainModel& model);

}  // namespace insurisk
