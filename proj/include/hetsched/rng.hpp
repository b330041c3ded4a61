#pragma once

#include <cstdint>
#include <random>

namespace hetsched {

// Every random quantity in a run is drawn from its own Mersenne Twister stream
// keyed by (seed, trial, index, purpose). Streams never share state, so trials
// can be evaluated in any order or in parallel and stay reproducible.
enum class StreamPurpose : std::uint32_t {
  kUserAttributes = 1,
  kFading = 2,
  kScheduler = 3,
  kBootstrap = 4,
  kTest = 5,
};

// Trial index used for attributes that stay fixed over a whole run.
inline constexpr std::uint64_t kPopulationTrial = ~std::uint64_t{0};

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t trial, std::uint64_t index,
                            StreamPurpose purpose);

}  // namespace hetsched
