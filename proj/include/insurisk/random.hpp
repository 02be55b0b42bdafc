#pragma once

#include <array>
#include <cstdint>

namespace insurisk {

/// Independent random streams used by one simulated path.
enum class StreamTag : std::uint32_t {
  chain = 1,
  market = 2,
  memory = 3,
  aux = 4,
};

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// Counter-based stream keyed by (master_seed, path_index, tag).
///
/// The n-th draw of a stream depends only on the key and n, so results do not
/// depend on how paths are scheduled over threads.
class Rng {
 public:
  Rng(std::uint64_t master_seed, std::uint64_t path_index, StreamTag tag) noexcept;
  explicit Rng(std::uint64_t seed) noexcept : Rng(seed, 0, StreamTag::aux) {}

  std::uint32_t next_u32() noexcept;
  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform() noexcept;
  double normal() noexcept;
  double exponential(double rate) noexcept;
  std::uint64_t poisson(double mean) noexcept;

 private:
  void refill() noexcept;

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> block_{};
  unsigned used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace insurisk
