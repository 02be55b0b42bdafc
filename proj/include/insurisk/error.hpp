#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace insurisk {

enum class Errc {
  chain_column_sum,
  chain_negative_rate,
  chain_bad_distribution,
  invalid_grid,
  invalid_model,
  asset_jump_below_minus_one,
  filter_normalizer,
  delay_not_grid_multiple,
  missing_history,
  grid_mismatch,
  pi_denominator_singular,
  density_factor_nonpositive,
  invalid_scenario,
  empty_family,
  invalid_penalty,
  invalid_bounds,
  config_parse,
  config_validation,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace insurisk
