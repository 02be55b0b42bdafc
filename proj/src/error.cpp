#include "insurisk/error.hpp"

namespace insurisk {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::chain_column_sum: return "ChainColumnSumError";
    case Errc::chain_negative_rate: return "ChainNegativeRateError";
    case Errc::chain_bad_distribution: return "ChainDistributionError";
    case Errc::invalid_grid: return "InvalidGridError";
    case Errc::invalid_model: return "InvalidModelError";
    case Errc::asset_jump_below_minus_one: return "AssetJumpBelowMinusOneError";
    case Errc::filter_normalizer: return "FilterNormalizerError";
    case Errc::delay_not_grid_multiple: return "DelayNotGridMultipleError";
    case Errc::missing_history: return "MissingHistoryError";
    case Errc::grid_mismatch: return "GridMismatchError";
    case Errc::pi_denominator_singular: return "PiDenominatorSingularError";
    case Errc::density_factor_nonpositive: return "DensityFactorNonPositiveError";
    case Errc::invalid_scenario: return "InvalidScenarioError";
    case Errc::empty_family: return "EmptyFamilyError";
    case Errc::invalid_penalty: return "InvalidPenaltyError";
    case Errc::invalid_bounds: return "InvalidBoundsError";
    case Errc::config_parse: return "ConfigParseError";
    case Errc::config_validation: return "ConfigValidationError";
  }
  return "Error";
}

}  // namespace insurisk
