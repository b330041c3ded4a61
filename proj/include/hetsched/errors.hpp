#pragma once

#include <stdexcept>
#include <string>

namespace hetsched {

// A group or scenario that violates the block-diagonalization dimensionality
// constraint, or for which no feasible arrangement exists.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent configuration (files, presets, CLI options).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hetsched
