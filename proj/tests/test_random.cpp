#include <doctest.h>

#include <cmath>
#include <vector>

#include "insurisk/random.hpp"
#include "insurisk/stats.hpp"

using namespace insurisk;

TEST_CASE("philox known answers") {
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == std::array<std::uint32_t, 4>{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        std::array<std::uint32_t, 4>{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        std::array<std::uint32_t, 4>{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are pure functions of their key") {
  Rng a(42, 7, StreamTag::market);
  Rng b(42, 7, StreamTag::market);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u32() == b.next_u32());
  Rng c(42, 8, StreamTag::market);
  Rng d(42, 7, StreamTag::chain);
  Rng e(42, 7, StreamTag::market);
  int same_c = 0, same_d = 0;
  for (int i = 0; i < 100; ++i) {
    const auto v = e.next_u32();
    same_c += c.next_u32() == v;
    same_d += d.next_u32() == v;
  }
  CHECK(same_c < 3);
  CHECK(same_d < 3);
}

TEST_CASE("uniform lies in the open unit interval") {
  Rng rng(3);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 200000; ++i) {
    const double u = rng.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
}

TEST_CASE("normal, exponential and poisson moments") {
  Rng rng(11);
  const int n = 200000;
  std::vector<double> z(n), z2(n), e(n), p(n), q(n);
  for (int i = 0; i < n; ++i) {
    z[i] = rng.normal();
    z2[i] = z[i] * z[i];
    e[i] = rng.exponential(2.0);
    p[i] = static_cast<double>(rng.poisson(3.5));
    q[i] = static_cast<double>(rng.poisson(40.0));
  }
  const auto mz = mean_estimate(z);
  const auto mz2 = mean_estimate(z2);
  const auto me = mean_estimate(e);
  const auto mp = mean_estimate(p);
  const auto mq = mean_estimate(q);
  CHECK(std::abs(mz.value) < 4 * mz.se);
  CHECK(std::abs(mz2.value - 1.0) < 4 * mz2.se);
  CHECK(std::abs(me.value - 0.5) < 4 * me.se);
  CHECK(std::abs(mp.value - 3.5) < 4 * mp.se);
  CHECK(std::abs(mq.value - 40.0) < 4 * mq.se);
  double var = 0.0;
  for (double v : q) var += (v - mq.value) * (v - mq.value);
  var /= n - 1;
  CHECK(var == doctest::Approx(40.0).epsilon(0.03));
}

TEST_CASE("poisson with zero mean is zero") {
  Rng rng(5);
  for (int i = 0; i < 100; ++i) CHECK(rng.poisson(0.0) == 0u);
}
