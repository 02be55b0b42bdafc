#include "insurisk/filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

#include "insurisk/error.hpp"

namespace insurisk {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Beyond this spread gamma ratios and qbar leave the normal double range.
constexpr double kMinLogRatio = -600.0;

bool any_atom_at(const MarkProcess& marks, double z) {
  return std::any_of(marks.laws.begin(), marks.laws.end(),
                     [z](const JumpSizeLaw& law) { return law.atom_mass(z) > 0.0; });
}

// Size density of state j's law against the dominating measure that is the
// counting measure at atoms of any state law and Lebesgue measure elsewhere.
double size_density(const MarkProcess& marks, Eigen::Index j, double z, bool atom) {
  const JumpSizeLaw& law = marks.laws[static_cast<std::size_t>(j)];
  return atom ? law.atom_mass(z) : law.pdf(z);
}

// ln(intensity_j * dlaw_j / dreference)(z) with the reference a weighted mixture of state laws.
double log_mark_ratio(const MarkProcess& marks, const Eigen::VectorXd& reference, Eigen::Index j, double z) {
  const bool atom = any_atom_at(marks, z);
  double ref = 0.0;
  for (Eigen::Index i = 0; i < reference.size(); ++i) ref += reference(i) * size_density(marks, i, z, atom);
  const double num = marks.intensity(j) * size_density(marks, j, z, atom);
  if (!(num > 0.0) || !(ref > 0.0)) return kNegInf;
  return std::log(num / ref);
}

double log_mark_likelihood(const MarkProcess& marks, Eigen::Index j, double z) {
  const double v = marks.intensity(j) * size_density(marks, j, z, any_atom_at(marks, z));
  return v > 0.0 ? std::log(v) : kNegInf;
}

// Adds the per-step mark contributions to `out`, applied at the end of the step containing each mark.
template <typename PerMark>
void accumulate_marks(const std::vector<Mark>& marks, std::size_t& cursor, std::size_t step, PerMark&& f) {
  while (cursor < marks.size() && marks[cursor].step == step) f(marks[cursor++].size);
}

FilterPath allocate(const TimeGrid& grid, Eigen::Index d) {
  FilterPath path;
  const auto nodes = static_cast<Eigen::Index>(grid.nodes());
  path.grid = grid;
  path.log_gamma = Eigen::MatrixXd::Zero(d, nodes);
  path.qbar.resize(d, nodes);
  path.q.resize(d, nodes);
  path.lambda_hat.resize(d, nodes);
  path.log_scale_q.assign(grid.nodes(), 0.0);
  path.log_scale_qbar.assign(grid.nodes(), 0.0);
  return path;
}

Eigen::VectorXd reference_or_prior(const Eigen::VectorXd& ref, const RegimeModel& model) {
  if (ref.size() == 0) return model.chain.initial;
  if (ref.size() != model.states())
    throw Error(Errc::invalid_model, "reference weights need one entry per state");
  return ref / ref.sum();
}

// Per-step increments of log gamma_j, one column per step.
Eigen::MatrixXd log_gamma_increments(const RegimeModel& model, const Observations& obs,
                                     const FilterOptions& options) {
  const Eigen::Index d = model.states();
  const double dt = obs.grid.dt;
  const double inv_b2 = 1.0 / (model.beta * model.beta);
  const Eigen::VectorXd phi = model.alpha.array() - 0.5 * model.beta * model.beta;
  const Eigen::VectorXd asset_ref = reference_or_prior(options.asset_reference, model);
  const Eigen::VectorXd claim_ref = reference_or_prior(options.claim_reference, model);

  Eigen::MatrixXd inc(d, static_cast<Eigen::Index>(obs.grid.steps));
  std::size_t asset_cursor = 0, claim_cursor = 0;
  for (std::size_t k = 0; k < obs.grid.steps; ++k) {
    auto col = inc.col(static_cast<Eigen::Index>(k));
    for (Eigen::Index j = 0; j < d; ++j) {
      col(j) = phi(j) * inv_b2 * obs.dPsi[k] - 0.5 * phi(j) * phi(j) * inv_b2 * dt +
               (1.0 - model.asset.intensity(j)) * dt + (1.0 - model.claim.intensity(j)) * dt;
    }
    accumulate_marks(obs.asset_marks, asset_cursor, k, [&](double z) {
      for (Eigen::Index j = 0; j < d; ++j) col(j) += log_mark_ratio(model.asset, asset_ref, j, z);
    });
    accumulate_marks(obs.claim_marks, claim_cursor, k, [&](double z) {
      for (Eigen::Index j = 0; j < d; ++j) col(j) += log_mark_ratio(model.claim, claim_ref, j, z);
    });
  }
  return inc;
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

// qbar-form stepping; returns false if the scaled quantities leave floating range.
bool step_qbar_form(const Eigen::MatrixXd& a, const Eigen::MatrixXd& inc, double dt, FilterPath& path) {
  const Eigen::Index d = a.rows();
  Eigen::VectorXd qbar = path.qbar.col(0);
  double log_scale = 0.0;
  Eigen::VectorXd log_gamma = Eigen::VectorXd::Zero(d);
  for (Eigen::Index k = 0; k < inc.cols(); ++k) {
    log_gamma += inc.col(k);
    const double anchor = log_gamma.maxCoeff();
    if (!std::isfinite(anchor) || log_gamma.minCoeff() - anchor < kMinLogRatio) return false;
    const Eigen::ArrayXd gamma = (log_gamma.array() - anchor).exp();
    // L^-1 A L with L frozen at the end-of-step value; the anchor cancels.
    Eigen::MatrixXd m(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) m(i, j) = a(i, j) * gamma(j) / gamma(i);
    const Eigen::VectorXd half = qbar + 0.5 * dt * (m * qbar);
    const Eigen::VectorXd next = qbar + dt * (m * half);
    const Eigen::VectorXd q = gamma.matrix().cwiseProduct(next);
    const double norm = q.sum();
    if (!finite_positive(norm) || !next.allFinite() || (q.array() < 0.0).any()) return false;
    qbar = next / norm;
    log_scale += std::log(norm);
    path.log_gamma.col(k + 1) = log_gamma;
    path.qbar.col(k + 1) = qbar;
    path.q.col(k + 1) = q / norm;
    path.lambda_hat.col(k + 1) = q / norm;
    path.log_scale_qbar[static_cast<std::size_t>(k + 1)] = log_scale;
    path.log_scale_q[static_cast<std::size_t>(k + 1)] = log_scale + anchor;
  }
  return true;
}

// Equivalent q-form: q_{k+1} = (I + dt A + dt^2 A^2 / 2) L_{k+1} L_k^-1 q_k, renormalized every step.
void step_q_form(const Eigen::MatrixXd& a, const Eigen::MatrixXd& inc, double dt, FilterPath& path) {
  const Eigen::Index d = a.rows();
  const Eigen::MatrixXd propagator =
      Eigen::MatrixXd::Identity(d, d) + dt * a + 0.5 * dt * dt * (a * a);
  Eigen::VectorXd q = path.q.col(0);
  Eigen::VectorXd log_gamma = Eigen::VectorXd::Zero(d);
  double log_scale = 0.0;
  for (Eigen::Index k = 0; k < inc.cols(); ++k) {
    log_gamma += inc.col(k);
    Eigen::VectorXd step_log = inc.col(k);
    const double shift = step_log.maxCoeff();
    if (!std::isfinite(shift)) throw Error(Errc::filter_normalizer, "observation impossible under every state");
    const Eigen::VectorXd corrected = (step_log.array() - shift).exp().matrix().cwiseProduct(q);
    const Eigen::VectorXd next = propagator * corrected;
    const double norm = next.sum();
    if (!finite_positive(norm))
      throw Error(Errc::filter_normalizer, "non-positive normalizer after log-space rescaling");
    q = next / norm;
    log_scale += shift + std::log(norm);

    // qbar = L^-1 q, normalized in log space where representable.
    const double anchor = log_gamma.maxCoeff();
    Eigen::VectorXd log_qbar(d);
    for (Eigen::Index j = 0; j < d; ++j)
      log_qbar(j) = q(j) > 0.0 ? std::log(q(j)) - (log_gamma(j) - anchor) : kNegInf;
    const double top = log_qbar.maxCoeff();
    path.log_gamma.col(k + 1) = log_gamma;
    path.q.col(k + 1) = q;
    path.lambda_hat.col(k + 1) = q;
    path.qbar.col(k + 1) = (log_qbar.array() - top).exp().matrix();
    path.log_scale_q[static_cast<std::size_t>(k + 1)] = log_scale;
    path.log_scale_qbar[static_cast<std::size_t>(k + 1)] = log_scale - anchor + top;
  }
}

}  // namespace

Observations make_observations(const MarketPath& market) {
  return {market.grid, market.dPsi, market.asset_marks, market.claim_marks};
}

Observations coarsen(const Observations& obs, std::size_t factor) {
  if (factor == 0 || obs.grid.steps % factor != 0)
    throw Error(Errc::invalid_grid, "coarsening factor must divide the number of steps");
  Observations out;
  out.grid = TimeGrid{obs.grid.dt * static_cast<double>(factor), obs.grid.steps / factor};
  out.dPsi.assign(out.grid.steps, 0.0);
  for (std::size_t k = 0; k < obs.grid.steps; ++k) out.dPsi[k / factor] += obs.dPsi[k];
  const auto remap = [factor](std::vector<Mark> marks) {
    for (Mark& m : marks) m.step /= factor;
    return marks;
  };
  out.asset_marks = remap(obs.asset_marks);
  out.claim_marks = remap(obs.claim_marks);
  return out;
}

FilterPath run_filter(const RegimeModel& model, const Observations& obs, const FilterOptions& options) {
  const Eigen::Index d = model.states();
  if (!(model.beta > 0.0)) throw Error(Errc::invalid_model, "beta must be positive");
  if (obs.dPsi.size() != obs.grid.steps) throw Error(Errc::grid_mismatch, "observation length differs from grid");

  FilterPath path = allocate(obs.grid, d);
  path.qbar.col(0) = model.chain.initial;
  path.q.col(0) = model.chain.initial;
  path.lambda_hat.col(0) = model.chain.initial;

  const Eigen::MatrixXd& a = model.chain.generator_at(0.0);
  const Eigen::MatrixXd inc = log_gamma_increments(model, obs, options);
  if (!step_qbar_form(a, inc, obs.grid.dt, path)) {
    path.rescaled = true;
    step_q_form(a, inc, obs.grid.dt, path);
  }
  return path;
}

FilterPath exact_discrete_filter(const RegimeModel& model, const Observations& obs) {
  const Eigen::Index d = model.states();
  const double dt = obs.grid.dt;
  const double var = model.beta * model.beta * dt;
  const Eigen::VectorXd phi = model.alpha.array() - 0.5 * model.beta * model.beta;
  const Eigen::MatrixXd transition = (model.chain.generator_at(0.0) * dt).exp();

  FilterPath path = allocate(obs.grid, d);
  Eigen::VectorXd p = model.chain.initial;
  path.qbar.col(0) = p;
  path.q.col(0) = p;
  path.lambda_hat.col(0) = p;

  Eigen::VectorXd cumulative = Eigen::VectorXd::Zero(d);
  std::size_t asset_cursor = 0, claim_cursor = 0;
  for (std::size_t k = 0; k < obs.grid.steps; ++k) {
    Eigen::VectorXd loglik(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      const double resid = obs.dPsi[k] - phi(j) * dt;
      loglik(j) = -0.5 * resid * resid / var - 0.5 * std::log(2.0 * std::numbers::pi * var) -
                  model.asset.intensity(j) * dt - model.claim.intensity(j) * dt;
    }
    accumulate_marks(obs.asset_marks, asset_cursor, k, [&](double z) {
      for (Eigen::Index j = 0; j < d; ++j) loglik(j) += log_mark_likelihood(model.asset, j, z);
    });
    accumulate_marks(obs.claim_marks, claim_cursor, k, [&](double z) {
      for (Eigen::Index j = 0; j < d; ++j) loglik(j) += log_mark_likelihood(model.claim, j, z);
    });
    const double top = loglik.maxCoeff();
    if (!std::isfinite(top)) throw Error(Errc::filter_normalizer, "observation impossible under every state");
    const Eigen::VectorXd predicted = transition * p;
    const Eigen::VectorXd posterior = (loglik.array() - top).exp().matrix().cwiseProduct(predicted);
    const double norm = posterior.sum();
    if (!finite_positive(norm)) throw Error(Errc::filter_normalizer, "non-positive Bayes normalizer");
    p = posterior / norm;
    cumulative += loglik;
    const auto col = static_cast<Eigen::Index>(k + 1);
    path.log_gamma.col(col) = cumulative;
    path.qbar.col(col) = p;
    path.q.col(col) = p;
    path.lambda_hat.col(col) = p;
  }
  return path;
}

std::vector<double> innovations(const RegimeModel& model, const Observations& obs, const FilterPath& filter) {
  const Eigen::VectorXd phi = model.alpha.array() - 0.5 * model.beta * model.beta;
  std::vector<double> out(obs.grid.steps);
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double drift = phi.dot(filter.lambda_hat.col(static_cast<Eigen::Index>(k)));
    out[k] = (obs.dPsi[k] - drift * obs.grid.dt) / model.beta;
  }
  return out;
}

double sup_gap(const FilterPath& a, const FilterPath& b) {
  return (a.lambda_hat - b.lambda_hat).cwiseAbs().maxCoeff();
}

}  // namespace insurisk
