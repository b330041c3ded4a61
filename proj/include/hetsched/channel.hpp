#pragma once

// Heterogeneous user populations and Kronecker-correlated Rayleigh channel
// realizations with distance-driven received power.

#include "hetsched/subspace.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hetsched {

/// One user's attributes. An empty optional means "draw at random":
/// antennas uniform on {1..max_receive_antennas}, distance uniform on
/// [reference_distance, max_distance], correlation coefficients uniform on [0,1].
struct UserProfile {
  std::optional<int> antennas;
  std::optional<double> distance;
  std::optional<double> rx_correlation;
  std::optional<double> tx_correlation;

  bool operator==(const UserProfile&) const = default;
};

struct Scenario {
  int transmit_antennas = 4;
  std::vector<UserProfile> users;
  double noise_variance = 1.0;
  double path_loss_exponent = 3.0;
  double reference_distance = 200.0;
  double max_distance = 1000.0;
  int max_receive_antennas = 4;
  std::vector<double> snr_db{0.0, 10.0, 20.0, 30.0, 40.0};
  std::size_t trials = 2000;
  std::uint64_t seed = 1;
  // Random attributes are redrawn every trial; when false they are drawn once per run.
  bool redraw_per_trial = true;

  bool operator==(const Scenario&) const = default;
};

/// Throws ConfigError on a violated invariant; returns non-fatal warnings.
std::vector<std::string> validate_scenario(const Scenario& scenario);

struct UserChannel {
  std::size_t id = 0;
  ComplexMatrix channel;     // H_k = sqrt(rho_k) * normalized
  ComplexMatrix normalized;  // H̄_k
  double received_power = 1.0;
  double distance = 0.0;
  double rx_correlation = 0.0;
  double tx_correlation = 0.0;

  Index antennas() const { return channel.rows(); }
};

struct ChannelRealization {
  Index transmit_antennas = 0;
  std::vector<UserChannel> users;

  std::size_t size() const { return users.size(); }
  const UserChannel& operator[](std::size_t i) const { return users[i]; }

  /// Builds a realization from normalized channels and received powers (default 1).
  static ChannelRealization from_channels(std::span<const ComplexMatrix> normalized,
                                          std::span<const double> received_powers = {});
};

/// Stacked channels H_k of the listed members; a 0 x M_T matrix when empty.
ComplexMatrix stack_channels(const ChannelRealization& r, std::span<const std::size_t> members);

/// (d_ref / d)^alpha: received power normalized to its value at the reference distance.
double received_power(double distance, double path_loss_exponent, double reference_distance);

/// Real n x n matrix with entry (i, j) = coef^((i - j)^2) and 0^0 = 1.
ComplexMatrix correlation_matrix(double coef, Index n);

/// Hermitian PSD square root through an eigendecomposition.
ComplexMatrix matrix_sqrt_psd(const ComplexMatrix& r);

/// Realization of trial `trial`. Deterministic in (scenario.seed, trial).
ChannelRealization generate_realization(const Scenario& scenario, std::uint64_t trial);

}  // namespace hetsched
