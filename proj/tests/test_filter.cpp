#include <doctest.h>

#include <cmath>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "insurisk/filter.hpp"
#include "insurisk/random.hpp"
#include "insurisk/stats.hpp"
#include "oracles.hpp"

using namespace insurisk;

namespace {

RegimeModel case2_model() {
  RegimeModel m;
  m.chain.generator.resize(2, 2);
  m.chain.generator << -0.5, 0.3, 0.5, -0.3;
  m.chain.initial = Eigen::Vector2d(0.7, 0.3);
  m.r = Eigen::Vector2d(0.045, 0.09);
  m.alpha = Eigen::Vector2d(0.13, 0.09);
  m.beta = 0.2;
  m.asset = {Eigen::Vector2d(0.5, 0.7), {JumpSizeLaw::point_mass(1.0), JumpSizeLaw::point_mass(1.0)}};
  m.claim = {Eigen::Vector2d(0.5, 0.7), {JumpSizeLaw::point_mass(1.0), JumpSizeLaw::point_mass(1.0)}};
  m.premium = 0.7;
  return validate_regime_model(m);
}

RegimeModel uninformative_model() {
  RegimeModel m = case2_model();
  m.alpha = Eigen::Vector2d(0.1, 0.1);
  m.asset.intensity = Eigen::Vector2d(0.6, 0.6);
  m.claim = {Eigen::Vector2d(0.4, 0.4), {JumpSizeLaw::exponential(2.0), JumpSizeLaw::exponential(2.0)}};
  return m;
}

RegimeModel single_state_model() {
  RegimeModel m;
  m.chain.generator = Eigen::MatrixXd::Zero(1, 1);
  m.chain.initial = Eigen::VectorXd::Ones(1);
  m.r = Eigen::VectorXd::Constant(1, 0.045);
  m.alpha = Eigen::VectorXd::Constant(1, 0.11);
  m.beta = 0.2;
  m.asset = {Eigen::VectorXd::Constant(1, 0.5), {JumpSizeLaw::point_mass(1.0)}};
  m.claim = {Eigen::VectorXd::Constant(1, 0.3), {JumpSizeLaw::exponential(1.0)}};
  return m;
}

Observations observe(const RegimeModel& m, double horizon, double dt, std::uint64_t seed, std::uint64_t path) {
  const TimeGrid g = make_grid(horizon, dt);
  Rng cr(seed, path, StreamTag::chain);
  const ChainPath c = simulate_chain(m.chain, g, cr);
  Rng mr(seed, path, StreamTag::market);
  return make_observations(simulate_market(m, c, g, mr));
}

void check_simplex(const FilterPath& f, double tol) {
  for (Eigen::Index k = 0; k < f.lambda_hat.cols(); ++k) {
    CHECK(f.lambda_hat.col(k).minCoeff() >= 0.0);
    CHECK(std::abs(f.lambda_hat.col(k).sum() - 1.0) <= tol);
  }
}

double prior_gap(const RegimeModel& m, const FilterPath& f) {
  double gap = 0.0;
  for (Eigen::Index k = 0; k < f.lambda_hat.cols(); ++k) {
    const double t = f.grid.time(static_cast<std::size_t>(k));
    const Eigen::Vector2d prior = (m.chain.generator * t).exp() * m.chain.initial;
    gap = std::max(gap, (f.lambda_hat.col(k) - prior).cwiseAbs().maxCoeff());
  }
  return gap;
}

}  // namespace

TEST_CASE("single-state filters are identically one") {
  const RegimeModel m = single_state_model();
  const Observations obs = observe(m, 2.0, 0.01, 3, 0);
  const FilterPath f = run_filter(m, obs);
  const FilterPath e = exact_discrete_filter(m, obs);
  CHECK((f.lambda_hat.array() == 1.0).all());
  CHECK((e.lambda_hat.array() == 1.0).all());
}

TEST_CASE("simplex invariant and positivity on an informative model") {
  const RegimeModel m = case2_model();
  for (std::uint64_t p = 0; p < 5; ++p) {
    const Observations obs = observe(m, 3.0, 0.01, 21, p);
    const FilterPath f = run_filter(m, obs);
    const FilterPath e = exact_discrete_filter(m, obs);
    check_simplex(f, 1e-9);
    check_simplex(e, 1e-12);
    CHECK((f.q.array() > 0.0).all());
    const Eigen::MatrixXd q = (f.log_gamma.array() - f.log_gamma.colwise().maxCoeff().replicate(2, 1).array())
                                  .exp() * f.qbar.array();
    for (Eigen::Index k = 0; k < q.cols(); ++k) {
      const Eigen::VectorXd lam = q.col(k) / q.col(k).sum();
      CHECK((lam - f.lambda_hat.col(k)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("uninformative observations reproduce the prior flow") {
  const RegimeModel m = uninformative_model();
  const Observations obs = observe(m, 2.0, 1e-3, 5, 1);
  CHECK(prior_gap(m, run_filter(m, obs)) < 1e-6);
  CHECK(prior_gap(m, exact_discrete_filter(m, obs)) < 1e-9);
  const double a = 0.5, b = 0.3;
  const Eigen::Matrix2d p = oracle::expm_two_state(a, b, 2.0);
  const Eigen::Vector2d prior = p * m.chain.initial;
  CHECK((prior - run_filter(m, obs).lambda_hat.col(2000)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("reference laws cancel") {
  RegimeModel m = case2_model();
  m.asset.laws[1] = JumpSizeLaw::lognormal(-1.0, 0.5, 0.0);
  m.claim.laws[0] = JumpSizeLaw::exponential(1.5);
  m = validate_regime_model(m);
  const Observations obs = observe(m, 2.0, 0.01, 9, 0);
  const FilterPath a = run_filter(m, obs);
  FilterOptions opt;
  opt.asset_reference = Eigen::Vector2d(0.2, 0.8);
  opt.claim_reference = Eigen::Vector2d(0.9, 0.1);
  const FilterPath b = run_filter(m, obs, opt);
  CHECK(sup_gap(a, b) < 1e-9);
}

TEST_CASE("midpoint filter tracks the exact discrete filter") {
  const RegimeModel m = case2_model();
  const Observations obs = observe(m, 1.0, 1e-3, 31, 0);
  CHECK(sup_gap(run_filter(m, obs), exact_discrete_filter(m, obs)) <= 0.05);
}

TEST_CASE("oracle gap shrinks at first order under step halving") {
  const RegimeModel m = case2_model();
  double coarse = 0.0, fine = 0.0;
  for (std::uint64_t p = 0; p < 10; ++p) {
    const Observations obs = observe(m, 1.0, 0.005, 41, p);
    const Observations half = coarsen(obs, 2);
    fine += sup_gap(run_filter(m, obs), exact_discrete_filter(m, obs));
    coarse += sup_gap(run_filter(m, half), exact_discrete_filter(m, half));
  }
  const double ratio = fine / coarse;
  CHECK(ratio >= 0.3);
  CHECK(ratio <= 0.8);
}

TEST_CASE("coarsening preserves the observed totals") {
  const RegimeModel m = case2_model();
  const Observations obs = observe(m, 1.0, 0.01, 2, 0);
  const Observations c = coarsen(obs, 4);
  CHECK(c.grid.steps == 25);
  CHECK(c.grid.dt == doctest::Approx(0.04));
  double a = 0.0, b = 0.0;
  for (double x : obs.dPsi) a += x;
  for (double x : c.dPsi) b += x;
  CHECK(a == doctest::Approx(b).epsilon(1e-12));
  CHECK(c.asset_marks.size() == obs.asset_marks.size());
  for (std::size_t i = 0; i < c.asset_marks.size(); ++i) CHECK(c.asset_marks[i].step == obs.asset_marks[i].step / 4);
  CHECK_THROWS_AS(coarsen(obs, 3), Error);
}

TEST_CASE("rescaled fallback matches the direct form") {
  RegimeModel m = case2_model();
  m.beta = 0.02;
  m.alpha = Eigen::Vector2d(2.0, -2.0);
  m.chain.initial = Eigen::Vector2d(0.5, 0.5);
  const Observations obs = observe(m, 40.0, 0.01, 6, 0);
  const FilterPath f = run_filter(m, obs);
  const FilterPath e = exact_discrete_filter(m, obs);
  CHECK(f.rescaled);
  check_simplex(f, 1e-9);
  CHECK(f.lambda_hat.allFinite());
  CHECK(sup_gap(f, e) < 0.05);
}

TEST_CASE("innovations behave as Brownian increments") {
  const RegimeModel m = case2_model();
  const int n = 10000;
  std::vector<double> sums(n), sq(n);
  for (int i = 0; i < n; ++i) {
    const Observations obs = observe(m, 1.0, 0.02, 17, static_cast<std::uint64_t>(i));
    const FilterPath f = run_filter(m, obs);
    const std::vector<double> w = innovations(m, obs, f);
    double s = 0.0;
    for (double x : w) s += x;
    sums[i] = s;
    sq[i] = s * s;
  }
  const Estimate mean = mean_estimate(sums);
  const Estimate var = mean_estimate(sq);
  CHECK(std::abs(mean.value) < 3 * mean.se);
  CHECK(std::abs(var.value - 1.0) < 3 * var.se);
}

TEST_CASE("filtered coefficients") {
  const RegimeModel m = case2_model();
  const auto c = filtered_coefficients(m, Eigen::VectorXd(Eigen::Vector2d(0.7, 0.3)));
  CHECK(c.alpha_hat == doctest::Approx(0.118).epsilon(1e-15));
  CHECK(c.asset_m2 == doctest::Approx(0.56).epsilon(1e-15));
  const auto v = filtered_coefficients(m, Eigen::VectorXd(Eigen::Vector2d(1.0, 0.0)));
  CHECK(v.r_hat == 0.045);
  CHECK(v.claim_m1 == 0.5);
  CHECK(filtered_coefficients<long double>(m, Eigen::Vector2d(0.7, 0.3)).alpha_hat ==
        doctest::Approx(0.118).epsilon(1e-15));
}

TEST_CASE("filter input errors") {
  RegimeModel m = case2_model();
  Observations obs = observe(m, 1.0, 0.01, 2, 0);
  obs.dPsi.pop_back();
  CHECK_THROWS_AS(run_filter(m, obs), Error);
  m.beta = 0.0;
  CHECK_THROWS_AS(run_filter(m, observe(case2_model(), 1.0, 0.01, 2, 0)), Error);
}
