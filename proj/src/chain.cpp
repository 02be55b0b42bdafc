#include "insurisk/chain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "insurisk/error.hpp"

namespace insurisk {

ChainModel validate_chain_model(ChainModel model) {
  const Eigen::Index d = model.initial.size();
  if (d < 1 || model.generator.rows() != d || model.generator.cols() != d)
    throw Error(Errc::invalid_model, "generator must be D x D with D = size of initial distribution");
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (i != j && model.generator(j, i) < 0.0)
        throw Error(Errc::chain_negative_rate,
                    "off-diagonal entry (" + std::to_string(j) + "," + std::to_string(i) + ") is negative");
    }
    const double scale = std::max(1.0, model.generator.col(i).cwiseAbs().sum());
    if (std::abs(model.generator.col(i).sum()) > 1e-12 * scale)
      throw Error(Errc::chain_column_sum, "column " + std::to_string(i) + " does not sum to zero");
  }
  if ((model.initial.array() < 0.0).any() || std::abs(model.initial.sum() - 1.0) > 1e-12)
    throw Error(Errc::chain_bad_distribution, "initial distribution is not a probability vector");
  return model;
}

int ChainPath::state_at(double t) const {
  const auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
  if (it == jump_times.begin()) return initial_state;
  return jump_states[static_cast<std::size_t>(it - jump_times.begin()) - 1];
}

Eigen::VectorXd ChainPath::occupation(double t, Eigen::Index num_states) const {
  Eigen::VectorXd occ = Eigen::VectorXd::Zero(num_states);
  double last = 0.0;
  int state = initial_state;
  for (std::size_t n = 0; n < jump_times.size() && jump_times[n] <= t; ++n) {
    occ(state) += jump_times[n] - last;
    last = jump_times[n];
    state = jump_states[n];
  }
  occ(state) += t - last;
  return occ;
}

namespace {

int sample_index(const Eigen::VectorXd& weights, double total, Rng& rng) {
  double u = rng.uniform() * total;
  const Eigen::Index last = weights.size() - 1;
  for (Eigen::Index j = 0; j < last; ++j) {
    if (u < weights(j)) return static_cast<int>(j);
    u -= weights(j);
  }
  // Guard against rounding pushing u past the final bucket; skip zero-weight tails.
  for (Eigen::Index j = last; j > 0; --j)
    if (weights(j) > 0.0) return static_cast<int>(j);
  return 0;
}

}  // namespace

ChainPath simulate_chain(const ChainModel& model, const TimeGrid& grid, Rng& rng) {
  ChainPath path;
  path.grid = grid;
  const double horizon = grid.horizon();
  const Eigen::MatrixXd& a = model.generator_at(0.0);

  path.initial_state = sample_index(model.initial, 1.0, rng);
  int state = path.initial_state;
  double t = 0.0;
  while (true) {
    const double rate = -a(state, state);
    if (!(rate > 0.0)) break;
    t += rng.exponential(rate);
    if (t > horizon) break;
    Eigen::VectorXd moves = a.col(state);
    moves(state) = 0.0;
    state = sample_index(moves, rate, rng);
    path.jump_times.push_back(t);
    path.jump_states.push_back(state);
  }

  path.states.resize(grid.nodes());
  std::size_t next = 0;
  int current = path.initial_state;
  for (std::size_t k = 0; k < grid.nodes(); ++k) {
    const double tk = grid.time(k);
    while (next < path.jump_times.size() && path.jump_times[next] <= tk) current = path.jump_states[next++];
    path.states[k] = current;
  }
  return path;
}

ChainPath simulate_chain(const ChainModel& model, double horizon, double dt, std::uint64_t seed) {
  Rng rng(seed, 0, StreamTag::chain);
  return simulate_chain(model, make_grid(horizon, dt), rng);
}

Eigen::MatrixXd chain_martingale_residual(const ChainPath& path, const ChainModel& model) {
  const Eigen::Index d = model.states();
  const Eigen::MatrixXd& a = model.generator_at(0.0);
  Eigen::MatrixXd phi(d, static_cast<Eigen::Index>(path.grid.nodes()));
  const Eigen::VectorXd start = Eigen::VectorXd::Unit(d, path.initial_state);
  for (std::size_t k = 0; k < path.grid.nodes(); ++k) {
    const double tk = path.grid.time(k);
    const Eigen::VectorXd now = Eigen::VectorXd::Unit(d, path.states[k]);
    phi.col(static_cast<Eigen::Index>(k)) = now - start - a * path.occupation(tk, d);
  }
  return phi;
}

}  // namespace insurisk
