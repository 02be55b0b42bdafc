#include "insurisk/random.hpp"

#include <cmath>
#include <numbers>

#include "insurisk/error.hpp"

namespace insurisk {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

Rng::Rng(std::uint64_t master_seed, std::uint64_t path_index, StreamTag tag) noexcept
    : key_{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32)},
      counter_{0, static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(path_index),
               static_cast<std::uint32_t>(path_index >> 32)} {}

void Rng::refill() noexcept {
  block_ = philox4x32(counter_, key_);
  ++counter_[0];
  used_ = 0;
}

std::uint32_t Rng::next_u32() noexcept {
  if (used_ == 4) refill();
  return block_[used_++];
}

double Rng::uniform() noexcept {
  const std::uint64_t hi = next_u32();
  const std::uint64_t lo = next_u32();
  const std::uint64_t bits = ((hi << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

// Box-Muller; the second variate of each pair is kept for the next call.
double Rng::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double radius = std::sqrt(-2.0 * std::log(uniform()));
  const double angle = 2.0 * std::numbers::pi * uniform();
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

double Rng::exponential(double rate) noexcept { return -std::log(uniform()) / rate; }

std::uint64_t Rng::poisson(double mean) noexcept {
  if (!(mean > 0.0)) return 0;
  // Split large means into pieces small enough for inversion; sums of
  // independent Poisson variates are Poisson.
  std::uint64_t total = 0;
  const int pieces = static_cast<int>(std::ceil(mean / 16.0));
  const double piece = mean / pieces;
  const double p0 = std::exp(-piece);
  for (int k = 0; k < pieces; ++k) {
    double u = uniform();
    double p = p0;
    std::uint64_t n = 0;
    while (u > p) {
      u -= p;
      ++n;
      p *= piece / static_cast<double>(n);
      if (p <= 0.0) break;
    }
    total += n;
  }
  return total;
}

}  // namespace insurisk
