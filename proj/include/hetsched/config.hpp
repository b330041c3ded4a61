#pragma once

// Plain-text experiment configuration:
//
//   [scenario]
//   transmit_antennas = 6
//   snr_db = 0 10 20 30 40
//   [users]
//   user = 4 300 0.2 random      # antennas distance rx_corr tx_corr
//   random = 5                   # five fully random users
//   [experiment]
//   schedulers = algorithm1-group-min, conventional-grouping
//   criteria = selection-simplified
//
// Unknown sections or keys are errors.

#include "hetsched/harness.hpp"

#include <string>
#include <string_view>

namespace hetsched {

/// Throws ConfigError with a line number on malformed input.
ExperimentSpec parse_config(std::string_view text);
ExperimentSpec load_config(const std::string& path);

}  // namespace hetsched
