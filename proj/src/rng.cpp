#include "hetsched/rng.hpp"

namespace hetsched {

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t trial, std::uint64_t index,
                            StreamPurpose purpose) {
  const auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
  const auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(seed),  hi(seed),  lo(trial), hi(trial),
                    lo(index), hi(index), static_cast<std::uint32_t>(purpose)};
  return std::mt19937_64(seq);
}

}  // namespace hetsched
