#include <doctest.h>

#include <cmath>
#include <vector>

#include "insurisk/market.hpp"
#include "insurisk/random.hpp"
#include "insurisk/stats.hpp"

using namespace insurisk;

namespace {

RegimeModel single_state(double r, double alpha, double beta) {
  RegimeModel m;
  m.chain.generator = Eigen::MatrixXd::Zero(1, 1);
  m.chain.initial = Eigen::VectorXd::Ones(1);
  m.r = Eigen::VectorXd::Constant(1, r);
  m.alpha = Eigen::VectorXd::Constant(1, alpha);
  m.beta = beta;
  m.asset = {Eigen::VectorXd::Zero(1), {JumpSizeLaw::point_mass(1.0)}};
  m.claim = {Eigen::VectorXd::Zero(1), {JumpSizeLaw::point_mass(1.0)}};
  return m;
}

RegimeModel two_state() {
  RegimeModel m;
  m.chain.generator.resize(2, 2);
  m.chain.generator << -0.5, 0.3, 0.5, -0.3;
  m.chain.initial = Eigen::Vector2d(0.7, 0.3);
  m.r = Eigen::Vector2d(0.045, 0.09);
  m.alpha = Eigen::Vector2d(0.13, 0.09);
  m.beta = 0.2;
  m.asset = {Eigen::Vector2d(0.8, 1.5), {JumpSizeLaw::lognormal(-2.0, 0.5, -0.1), JumpSizeLaw::point_mass(-0.2)}};
  m.claim = {Eigen::Vector2d(0.5, 0.7), {JumpSizeLaw::exponential(2.0), JumpSizeLaw::point_mass(1.0)}};
  m.premium = 1.2;
  return validate_regime_model(m);
}

struct Sim {
  ChainPath chain;
  MarketPath market;
};

Sim simulate(const RegimeModel& m, double horizon, double dt, std::uint64_t seed, std::uint64_t path) {
  const TimeGrid g = make_grid(horizon, dt);
  Rng cr(seed, path, StreamTag::chain);
  Sim s;
  s.chain = simulate_chain(m.chain, g, cr);
  Rng mr(seed, path, StreamTag::market);
  s.market = simulate_market(m, s.chain, g, mr);
  return s;
}

}  // namespace

TEST_CASE("jump size law moments") {
  const JumpSizeLaw p = JumpSizeLaw::point_mass(1.0);
  CHECK(p.mean() == 1.0);
  CHECK(p.second_moment() == 1.0);
  const JumpSizeLaw e = JumpSizeLaw::exponential(2.0);
  CHECK(e.mean() == 2.0);
  CHECK(e.second_moment() == 8.0);
  const JumpSizeLaw l = JumpSizeLaw::lognormal(0.1, 0.3, -0.5);
  const double e1 = std::exp(0.1 + 0.045);
  CHECK(l.mean() == doctest::Approx(-0.5 + e1).epsilon(1e-14));
  CHECK(l.second_moment() >= l.mean() * l.mean());
  CHECK_THROWS_AS(JumpSizeLaw::exponential(-1.0), Error);
  CHECK_THROWS_AS(JumpSizeLaw::lognormal(0.0, -1.0), Error);
}

TEST_CASE("empirical jump-size moments match the cached ones") {
  const JumpSizeLaw laws[] = {JumpSizeLaw::exponential(2.0), JumpSizeLaw::lognormal(-1.0, 0.4, -0.3)};
  for (const JumpSizeLaw& law : laws) {
    Rng rng(8);
    std::vector<double> z(100000), z2(100000);
    for (std::size_t i = 0; i < z.size(); ++i) {
      z[i] = law.sample(rng);
      z2[i] = z[i] * z[i];
    }
    const Estimate m1 = mean_estimate(z);
    const Estimate m2 = mean_estimate(z2);
    CHECK(std::abs(m1.value - law.mean()) < 3 * m1.se);
    CHECK(std::abs(m2.value - law.second_moment()) < 3 * m2.se);
  }
}

TEST_CASE("regime compensators") {
  RegimeModel m = single_state(0.0, 0.0, 0.2);
  m.asset.intensity(0) = 0.5;
  m.claim.intensity(0) = 0.7;
  m.claim.laws[0] = JumpSizeLaw::exponential(2.0);
  const RegimeCompensators c = regime_compensators(m, 0);
  CHECK(c.asset.intensity == 0.5);
  CHECK(c.asset.m1 == 0.5);
  CHECK(c.asset.m2 == 0.5);
  CHECK(c.claim.intensity == doctest::Approx(0.7));
  CHECK(c.claim.m1 == doctest::Approx(1.4));
  CHECK(c.claim.m2 == doctest::Approx(5.6));
  m.claim.intensity(0) = 0.0;
  const RegimeCompensators z = regime_compensators(m, 0);
  CHECK(z.claim.intensity == 0.0);
  CHECK(z.claim.m1 == 0.0);
  CHECK(z.claim.m2 == 0.0);
}

TEST_CASE("model validation") {
  RegimeModel m = single_state(0.0, 0.0, 0.2);
  CHECK_NOTHROW(validate_regime_model(m));
  RegimeModel bad_beta = m;
  bad_beta.beta = 0.0;
  CHECK_THROWS_AS(validate_regime_model(bad_beta), Error);
  RegimeModel bad_claim = m;
  bad_claim.claim.laws[0] = JumpSizeLaw::point_mass(-1.0);
  CHECK_THROWS_AS(validate_regime_model(bad_claim), Error);
  RegimeModel bad_jump = m;
  bad_jump.asset.laws[0] = JumpSizeLaw::point_mass(-1.0);
  CHECK_THROWS_AS(validate_regime_model(bad_jump), Error);
}

TEST_CASE("sampled asset jump at or below -1 is an error") {
  RegimeModel m = single_state(0.0, 0.0, 0.2);
  m.asset.intensity(0) = 50.0;
  m.asset.laws[0] = JumpSizeLaw::point_mass(-1.5);
  try {
    simulate(m, 1.0, 0.01, 1, 0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::asset_jump_below_minus_one);
  }
}

TEST_CASE("deterministic growth when volatility vanishes") {
  const RegimeModel m = single_state(0.045, 0.045, 1e-12);
  const Sim s = simulate(m, 3.0, 0.01, 4, 0);
  CHECK(s.market.stock.back() == doctest::Approx(std::exp(0.045 * 3.0)).epsilon(1e-6));
  CHECK(s.market.bond.back() == doctest::Approx(std::exp(0.045 * 3.0)).epsilon(1e-12));
}

TEST_CASE("path invariants") {
  const RegimeModel m = two_state();
  const Sim s = simulate(m, 5.0, 0.01, 12, 3);
  const MarketPath& p = s.market;
  double log_b = 0.0;
  for (std::size_t k = 0; k < p.grid.nodes(); ++k) {
    CHECK(p.stock[k] > 0.0);
    CHECK(p.bond[k] == doctest::Approx(std::exp(log_b)).epsilon(1e-13));
    if (k < p.grid.steps) log_b += m.r(s.chain.states[k]) * p.grid.dt;
  }
  double z = 0.0;
  std::size_t count = 0;
  std::size_t next = 0;
  for (std::size_t k = 0; k < p.grid.steps; ++k) {
    for (; next < p.claim_marks.size() && p.claim_marks[next].step == k; ++next) {
      z += p.claim_marks[next].size;
      ++count;
    }
    CHECK(p.aggregate_claims[k + 1] == doctest::Approx(z).epsilon(1e-14));
    CHECK(p.claim_count[k + 1] == static_cast<double>(count));
    CHECK(p.reserve[k + 1] == doctest::Approx(1.2 * p.grid.time(k + 1) - z).epsilon(1e-13));
  }
  CHECK(next == p.claim_marks.size());
  for (const Mark& mk : p.asset_marks) {
    CHECK(mk.time > p.grid.time(mk.step));
    CHECK(mk.time <= p.grid.time(mk.step + 1));
  }
}

TEST_CASE("reserve path arithmetic") {
  RegimeModel m = single_state(0.0, 0.0, 0.2);
  m.premium = 2.0;
  MarketPath p;
  p.grid = make_grid(2.0, 1.0);
  p.aggregate_claims = {0.0, 3.0, 3.0};
  const auto r = reserve_path(m, p, 10.0);
  CHECK(r[2] == 11.0);
  p.aggregate_claims = {0.0, 0.0, 0.0};
  CHECK(reserve_path(m, p, 10.0)[2] == 14.0);
}

TEST_CASE("claim counts, compensated integrals and the reserve mean") {
  RegimeModel m = single_state(0.0, 0.0, 0.2);
  m.claim.intensity(0) = 0.5;
  m.asset.intensity(0) = 0.8;
  m.asset.laws[0] = JumpSizeLaw::lognormal(-2.0, 0.5, -0.1);
  m.premium = 1.0;
  const int n = 10000;
  std::vector<double> counts(n), comp_claim(n), comp_asset(n), reserve(n);
  for (int i = 0; i < n; ++i) {
    const Sim s = simulate(m, 10.0, 0.1, 55, static_cast<std::uint64_t>(i));
    counts[i] = s.market.claim_count.back();
    comp_claim[i] = s.market.aggregate_claims.back() - 0.5 * 10.0;
    double asset = 0.0;
    for (const Mark& mk : s.market.asset_marks) asset += mk.size;
    comp_asset[i] = asset - 0.8 * m.asset.laws[0].mean() * 10.0;
    reserve[i] = s.market.reserve.back();
  }
  const Estimate c = mean_estimate(counts);
  const Estimate cc = mean_estimate(comp_claim);
  const Estimate ca = mean_estimate(comp_asset);
  const Estimate r = mean_estimate(reserve);
  CHECK(std::abs(c.value - 5.0) < 3 * c.se);
  CHECK(std::abs(cc.value) < 3 * cc.se);
  CHECK(std::abs(ca.value) < 3 * ca.se);
  CHECK(std::abs(r.value - (10.0 - 5.0)) < 3 * r.se);
}

TEST_CASE("two-state marks use the left-endpoint regime") {
  const RegimeModel m = two_state();
  const int n = 3000;
  std::vector<double> asset_resid(n);
  for (int i = 0; i < n; ++i) {
    const Sim s = simulate(m, 2.0, 0.01, 77, static_cast<std::uint64_t>(i));
    double comp = 0.0;
    for (std::size_t k = 0; k < s.market.grid.steps; ++k)
      comp += m.asset.intensity(s.chain.states[k]) * s.market.grid.dt;
    asset_resid[i] = static_cast<double>(s.market.asset_marks.size()) - comp;
  }
  const Estimate e = mean_estimate(asset_resid);
  CHECK(std::abs(e.value) < 3 * e.se);
}
