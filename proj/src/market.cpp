#include "insurisk/market.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "insurisk/error.hpp"

namespace insurisk {

JumpSizeLaw::JumpSizeLaw(Kind kind, double a, double b, double c) : kind_(kind), params_{a, b, c} {
  for (double p : params_)
    if (!std::isfinite(p)) throw Error(Errc::invalid_model, "jump law parameters must be finite");
  switch (kind_) {
    case Kind::point_mass:
      m1_ = a;
      m2_ = a * a;
      break;
    case Kind::exponential:
      if (!(a > 0.0)) throw Error(Errc::invalid_model, "exponential mean must be positive");
      m1_ = a;
      m2_ = 2.0 * a * a;
      break;
    case Kind::lognormal: {
      if (!(b >= 0.0)) throw Error(Errc::invalid_model, "lognormal sigma must be non-negative");
      const double e1 = std::exp(a + 0.5 * b * b);
      const double e2 = std::exp(2.0 * a + 2.0 * b * b);
      m1_ = c + e1;
      m2_ = c * c + 2.0 * c * e1 + e2;
      break;
    }
  }
}

JumpSizeLaw JumpSizeLaw::point_mass(double value) { return {Kind::point_mass, value, 0.0, 0.0}; }
JumpSizeLaw JumpSizeLaw::exponential(double mean) { return {Kind::exponential, mean, 0.0, 0.0}; }
JumpSizeLaw JumpSizeLaw::lognormal(double mu, double sigma, double shift) {
  return {Kind::lognormal, mu, sigma, shift};
}

double JumpSizeLaw::support_lo() const {
  switch (kind_) {
    case Kind::point_mass: return params_[0];
    case Kind::exponential: return 0.0;
    case Kind::lognormal: return params_[2];
  }
  return 0.0;
}

double JumpSizeLaw::support_hi() const {
  if (kind_ == Kind::point_mass) return params_[0];
  return std::numeric_limits<double>::infinity();
}

double JumpSizeLaw::sample(Rng& rng) const {
  switch (kind_) {
    case Kind::point_mass: return params_[0];
    case Kind::exponential: return rng.exponential(1.0 / params_[0]);
    case Kind::lognormal: return params_[2] + std::exp(params_[0] + params_[1] * rng.normal());
  }
  return 0.0;
}

double JumpSizeLaw::atom_mass(double z) const {
  if (kind_ != Kind::point_mass) return 0.0;
  return std::abs(z - params_[0]) <= 1e-12 * std::max(1.0, std::abs(z)) ? 1.0 : 0.0;
}

double JumpSizeLaw::pdf(double z) const {
  switch (kind_) {
    case Kind::point_mass: return 0.0;
    case Kind::exponential: return z > 0.0 ? std::exp(-z / params_[0]) / params_[0] : 0.0;
    case Kind::lognormal: {
      const double x = z - params_[2];
      if (!(x > 0.0)) return 0.0;
      if (params_[1] == 0.0) return 0.0;
      const double u = (std::log(x) - params_[0]) / params_[1];
      return std::exp(-0.5 * u * u) / (x * params_[1] * std::sqrt(2.0 * std::numbers::pi));
    }
  }
  return 0.0;
}

namespace {

void check_marks(const MarkProcess& marks, Eigen::Index d, const char* name, bool claims) {
  const std::string label(name);
  if (marks.intensity.size() != d || static_cast<Eigen::Index>(marks.laws.size()) != d)
    throw Error(Errc::invalid_model, label + ": one intensity and one law per state required");
  for (Eigen::Index j = 0; j < d; ++j) {
    if (!(marks.intensity(j) >= 0.0)) throw Error(Errc::invalid_model, label + ": intensities must be >= 0");
    const JumpSizeLaw& law = marks.laws[static_cast<std::size_t>(j)];
    if (claims && !(law.support_lo() > 0.0 || (law.kind() != JumpSizeLaw::Kind::point_mass && law.support_lo() >= 0.0)))
      throw Error(Errc::invalid_model, label + ": claim sizes must lie in (0, inf)");
    if (!claims && !(law.support_lo() > -1.0 ||
                     (law.kind() != JumpSizeLaw::Kind::point_mass && law.support_lo() >= -1.0)))
      throw Error(Errc::invalid_model, label + ": asset jump sizes must exceed -1");
    if (!std::isfinite(law.second_moment())) throw Error(Errc::invalid_model, label + ": infinite second moment");
  }
}

}  // namespace

RegimeModel validate_regime_model(RegimeModel model) {
  model.chain = validate_chain_model(std::move(model.chain));
  const Eigen::Index d = model.states();
  if (model.r.size() != d || model.alpha.size() != d)
    throw Error(Errc::invalid_model, "r and alpha need one entry per state");
  if (!(model.beta > 0.0) || !std::isfinite(model.beta)) throw Error(Errc::invalid_model, "beta must be positive");
  if (!std::isfinite(model.premium)) throw Error(Errc::invalid_model, "premium must be finite");
  check_marks(model.asset, d, "asset jumps", false);
  check_marks(model.claim, d, "claims", true);
  return model;
}

RegimeCompensators regime_compensators(const RegimeModel& model, int state) {
  const auto moments = [state](const MarkProcess& marks) {
    const double rate = marks.intensity(state);
    const JumpSizeLaw& law = marks.laws[static_cast<std::size_t>(state)];
    if (rate == 0.0) return MarkMoments{};
    return MarkMoments{rate, rate * law.mean(), rate * law.second_moment()};
  };
  return {moments(model.asset), moments(model.claim)};
}

MarketPath simulate_market(const RegimeModel& model, const ChainPath& chain, const TimeGrid& grid,
                           Rng& rng, const MarketStart& start) {
  if (!(chain.grid == grid)) throw Error(Errc::grid_mismatch, "chain path grid differs from market grid");
  const std::size_t n = grid.steps;
  const double dt = grid.dt;
  const double sqrt_dt = std::sqrt(dt);
  const double beta = model.beta;

  MarketPath path;
  path.grid = grid;
  path.bond.resize(n + 1);
  path.stock.resize(n + 1);
  path.dW.resize(n);
  path.dPsi.resize(n);
  path.claim_count.resize(n + 1);
  path.aggregate_claims.resize(n + 1);

  double log_b = 0.0;
  double log_s = std::log(start.stock);
  double count = 0.0;
  double claims = 0.0;
  path.bond[0] = 1.0;
  path.stock[0] = start.stock;
  path.claim_count[0] = 0.0;
  path.aggregate_claims[0] = 0.0;

  for (std::size_t k = 0; k < n; ++k) {
    const int j = chain.states[k];
    const double t0 = grid.time(k);
    const double dw = sqrt_dt * rng.normal();
    const double drift = model.alpha(j) - 0.5 * beta * beta;
    path.dW[k] = dw;
    path.dPsi[k] = drift * dt + beta * dw;
    log_b += model.r(j) * dt;
    log_s += path.dPsi[k];

    const std::uint64_t jumps = rng.poisson(model.asset.intensity(j) * dt);
    for (std::uint64_t m = 0; m < jumps; ++m) {
      const double when = t0 + rng.uniform() * dt;
      const double z = model.asset.laws[static_cast<std::size_t>(j)].sample(rng);
      if (!(z > -1.0)) throw Error(Errc::asset_jump_below_minus_one, "sampled asset jump size <= -1");
      log_s += std::log1p(z);
      path.asset_marks.push_back({when, z, k});
    }
    const std::uint64_t arrivals = rng.poisson(model.claim.intensity(j) * dt);
    for (std::uint64_t m = 0; m < arrivals; ++m) {
      const double when = t0 + rng.uniform() * dt;
      const double z = model.claim.laws[static_cast<std::size_t>(j)].sample(rng);
      claims += z;
      count += 1.0;
      path.claim_marks.push_back({when, z, k});
    }
    path.bond[k + 1] = std::exp(log_b);
    path.stock[k + 1] = std::exp(log_s);
    path.claim_count[k + 1] = count;
    path.aggregate_claims[k + 1] = claims;
  }
  const auto by_time = [](const Mark& a, const Mark& b) { return a.time < b.time; };
  std::stable_sort(path.asset_marks.begin(), path.asset_marks.end(), by_time);
  std::stable_sort(path.claim_marks.begin(), path.claim_marks.end(), by_time);
  path.reserve = reserve_path(model, path, start.reserve);
  return path;
}

std::vector<double> reserve_path(const RegimeModel& model, const MarketPath& market, double r0) {
  std::vector<double> reserve(market.grid.nodes());
  for (std::size_t k = 0; k < reserve.size(); ++k)
    reserve[k] = r0 + model.premium * market.grid.time(k) - market.aggregate_claims[k];
  return reserve;
}

}  // namespace insurisk
