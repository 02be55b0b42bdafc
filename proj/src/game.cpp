#include "insurisk/game.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace insurisk {

void validate_penalty(const QuadraticPenalty& pen) {
  if (!std::isfinite(pen.delta) || !(pen.delta < 1.0))
    throw Error(Errc::invalid_penalty, "delta must be finite and below 1, got " + std::to_string(pen.delta));
}

GameState make_game_state(const RegimeModel& model, const DelayParams& delay, double t, double horizon, double x,
                          double y, double u, const Eigen::VectorXd& lambda_hat, double g) {
  if (!(g > 0.0)) throw Error(Errc::invalid_model, "density level G must be positive");
  GameState s;
  s.t = t;
  s.horizon = horizon;
  s.x = x;
  s.y = y;
  s.u = u;
  s.g = g;
  s.lambda_hat = lambda_hat;
  s.coeffs = filtered_coefficients(model, lambda_hat);
  s.delay = delay;
  s.premium = model.premium;
  s.beta = model.beta;
  s.exposure = memory_exposure(delay, t, horizon, x);
  return s;
}

bool theta2_admissible(double slope, const RegimeModel& model) {
  if (slope == 0.0) return true;
  for (Eigen::Index j = 0; j < model.states(); ++j) {
    if (!(model.asset.intensity(j) > 0.0)) continue;
    const JumpSizeLaw& law = model.asset.laws[static_cast<std::size_t>(j)];
    const double z = slope > 0.0 ? law.support_lo() : law.support_hi();
    if (!(slope * z > -1.0)) return false;
  }
  return true;
}

ClosedFormControls closed_form_controls(const GameState& state, const RegimeModel& model,
                                        const QuadraticPenalty& pen) {
  validate_penalty(pen);
  const double pi = optimal_pi(state.coeffs, state.beta, pen);
  const Controls<double> th = optimal_thetas(state, pi, pen);
  ClosedFormControls out;
  out.pi_star = pi;
  out.theta0_star = th.theta0;
  out.theta1_star = th.theta1;
  out.theta2_slope = th.slope;
  out.theta2_admissible = theta2_admissible(th.slope, model);
  return out;
}

double optimal_pi_two_state(const TwoStateInputs& in) {
  const double a = 1.0 - in.delta;
  const double p = in.p1;
  const double num = (in.alpha1 - in.r1 - (in.alpha2 - in.r2) + a * in.beta * (in.claim_m1_1 - in.claim_m1_2)) * p +
                     in.alpha2 - in.r2 + a * in.beta * in.claim_m1_2;
  const double den = a * (in.beta * in.beta + in.asset_m2_2 + (in.asset_m2_1 - in.asset_m2_2) * p);
  if (!(std::abs(den) > 0.0)) throw Error(Errc::pi_denominator_singular, "two-state denominator vanishes");
  return num / den;
}

void validate_bounds(const ControlBounds& b) {
  for (const Interval* iv : {&b.pi, &b.theta0, &b.theta1, &b.slope}) {
    if (!std::isfinite(iv->lo) || !std::isfinite(iv->hi) || !(iv->lo < iv->hi))
      throw Error(Errc::invalid_bounds, "control box must be finite with lo < hi");
  }
}

namespace {

struct Axis {
  double lo;
  double h;
  std::size_t n;

  double operator[](std::size_t i) const { return i + 1 == n ? lo + h * static_cast<double>(n - 1) : lo + h * static_cast<double>(i); }
};

Axis make_axis(const Interval& iv, std::size_t n) {
  return {iv.lo, (iv.hi - iv.lo) / static_cast<double>(n - 1), n};
}

double h_at(const GameState& s, double pi, double t0, double t1, double sl, const QuadraticPenalty& pen) {
  return hamiltonian(s, Controls<double>{pi, t0, t1, sl}, pen);
}

/// Index of the maximum; among exact ties, the middle one.
std::size_t median_argmax(const std::vector<double>& v) {
  const double best = *std::max_element(v.begin(), v.end());
  std::vector<std::size_t> ties;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] == best) ties.push_back(i);
  return ties[ties.size() / 2];
}

/// Grid maximum refined by the parabola through it and its two neighbours.
/// Exact for a concave quadratic whose vertex is interior to the grid.
double refined_max(const std::vector<double>& v) {
  const std::size_t i = median_argmax(v);
  if (i == 0 || i + 1 == v.size()) return v[i];
  const double a = v[i - 1];
  const double b = v[i];
  const double c = v[i + 1];
  const double curv = a - 2.0 * b + c;
  if (!(curv < 0.0)) return b;
  const double off = 0.5 * (a - c) / curv;
  return std::max(b, b - 0.25 * (a - c) * off);
}

}  // namespace

SaddleReport verify_saddle(const GameState& state, const ControlBounds& bounds, const QuadraticPenalty& pen,
                           std::size_t grid_n) {
  validate_penalty(pen);
  validate_bounds(bounds);
  if (grid_n < 2) throw Error(Errc::invalid_bounds, "grid_n must be at least 2");

  SaddleReport rep;
  const double pi_star = optimal_pi(state.coeffs, state.beta, pen);
  rep.closed_form = optimal_thetas(state, pi_star, pen);
  const Controls<double>& cf = rep.closed_form;
  rep.closed_form_inside = bounds.pi.contains(cf.pi) && bounds.theta0.contains(cf.theta0) &&
                           bounds.theta1.contains(cf.theta1) && bounds.slope.contains(cf.slope);

  const Axis ap = make_axis(bounds.pi, grid_n);
  const Axis a0 = make_axis(bounds.theta0, grid_n);
  const Axis a1 = make_axis(bounds.theta1, grid_n);
  const Axis as = make_axis(bounds.slope, grid_n);
  rep.cell = {ap.h, a0.h, a1.h, as.h};

  // inf_pi sup_theta. For fixed pi, H is a sum of separate functions of
  // theta0, theta1 and the slope, so the joint sup is the sum of axis sups.
  // Each axis sup is refined off the grid so that its discretization error
  // does not move the argmin in pi. Exact ties resolve to the middle point.
  std::vector<double> v0(grid_n), v1(grid_n), v2(grid_n);
  const auto axis_values = [&](double pi) {
    for (std::size_t j = 0; j < grid_n; ++j) {
      v0[j] = h_at(state, pi, a0[j], 0.0, 0.0, pen);
      v1[j] = h_at(state, pi, 0.0, a1[j], 0.0, pen);
      v2[j] = h_at(state, pi, 0.0, 0.0, as[j], pen);
    }
  };
  for (std::size_t i = 0; i < grid_n; ++i) {
    const double pi = ap[i];
    axis_values(pi);
    const double base = h_at(state, pi, 0.0, 0.0, 0.0, pen);
    const double sup = refined_max(v0) + refined_max(v1) + refined_max(v2) - 2.0 * base;
    rep.sup_profile.push_back(sup);
  }
  std::vector<double> neg_profile(grid_n);
  std::transform(rep.sup_profile.begin(), rep.sup_profile.end(), neg_profile.begin(), [](double v) { return -v; });
  const std::size_t i_min = median_argmax(neg_profile);
  rep.inf_sup = rep.sup_profile[i_min];
  axis_values(ap[i_min]);
  rep.inf_sup_point = {ap[i_min], a0[median_argmax(v0)], a1[median_argmax(v1)], as[median_argmax(v2)]};

  // sup_theta inf_pi over the full theta grid. For fixed theta, H is affine
  // in pi, so the inf over the pi grid is attained at an end point.
  rep.sup_inf = -std::numeric_limits<double>::infinity();
  const double pi_lo = ap[0];
  const double pi_hi = ap[grid_n - 1];
  for (std::size_t j0 = 0; j0 < grid_n; ++j0) {
    for (std::size_t j1 = 0; j1 < grid_n; ++j1) {
      for (std::size_t js = 0; js < grid_n; ++js) {
        const double lo = h_at(state, pi_lo, a0[j0], a1[j1], as[js], pen);
        const double hi = h_at(state, pi_hi, a0[j0], a1[j1], as[js], pen);
        const double inf = std::min(lo, hi);
        if (inf > rep.sup_inf) {
          rep.sup_inf = inf;
          rep.sup_inf_point = {lo <= hi ? pi_lo : pi_hi, a0[j0], a1[j1], as[js]};
        }
      }
    }
  }
  rep.gap = rep.inf_sup - rep.sup_inf;

  // Every partial is affine in the controls, so its largest magnitude on the
  // box sits at a corner.
  std::array<double, 4> lip{0.0, 0.0, 0.0, 0.0};
  for (int mask = 0; mask < 16; ++mask) {
    const Controls<double> c{(mask & 1) ? bounds.pi.hi : bounds.pi.lo, (mask & 2) ? bounds.theta0.hi : bounds.theta0.lo,
                             (mask & 4) ? bounds.theta1.hi : bounds.theta1.lo,
                             (mask & 8) ? bounds.slope.hi : bounds.slope.lo};
    const auto g = hamiltonian_gradient(state, c, pen);
    for (int v = 0; v < 4; ++v) lip[v] = std::max(lip[v], std::abs(g[v]));
  }
  rep.resolution_bound = 0.0;
  for (int v = 0; v < 4; ++v) rep.resolution_bound += rep.cell[v] * lip[v];

  const double fd_step = 1e-5;
  for (int v = 0; v < 4; ++v) {
    Controls<double> up = cf;
    Controls<double> dn = cf;
    double* pu[4] = {&up.pi, &up.theta0, &up.theta1, &up.slope};
    double* pd[4] = {&dn.pi, &dn.theta0, &dn.theta1, &dn.slope};
    *pu[v] += fd_step;
    *pd[v] -= fd_step;
    rep.fd_residual[v] = (hamiltonian(state, up, pen) - hamiltonian(state, dn, pen)) / (2.0 * fd_step);
  }
  rep.fd_ok = std::all_of(rep.fd_residual.begin(), rep.fd_residual.end(),
                          [](double r) { return std::abs(r) <= 1e-6; });

  const double slack = 1e-12 * (1.0 + std::abs(rep.inf_sup));
  rep.gap_ok = std::abs(rep.gap) <= rep.resolution_bound + slack;
  const auto near = [](double a, double b, double h) { return std::abs(a - b) <= h * (1.0 + 1e-9); };
  rep.argmin_ok = near(rep.inf_sup_point.pi, cf.pi, ap.h);
  rep.argmax_ok = near(rep.inf_sup_point.theta0, cf.theta0, a0.h) && near(rep.inf_sup_point.theta1, cf.theta1, a1.h) &&
                  near(rep.inf_sup_point.slope, cf.slope, as.h);
  return rep;
}

}  // namespace insurisk
