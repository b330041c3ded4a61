#pragma once

// Block-diagonalization precoding, power allocation and group capacity.

#include "hetsched/channel.hpp"
#include "hetsched/subspace.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace hetsched {

enum class PowerPolicy { kEqual, kWaterfilling };

std::string_view to_string(PowerPolicy policy);
PowerPolicy parse_power_policy(std::string_view text);

struct UserPrecoder {
  std::size_t user = 0;
  // Null space of the other group members' stacked channels. Empty for a
  // zero channel, which gets no modes.
  OrthonormalBasis interference_null = OrthonormalBasis::identity(0);
  ComplexMatrix effective_channel;  // H_k * interference_null
  std::vector<double> mode_gains;   // squared singular values of the effective channel / noise
  std::vector<double> mode_powers;
};

struct BDPrecoderSet {
  std::vector<UserPrecoder> users;
  // Per-mode amplitude of the equal-power allocation (beta^2 = P_T / active modes).
  // For water-filling the per-mode powers carry the allocation and beta is 1.
  double beta = 1.0;

  std::size_t active_modes() const;
  double allocated_power() const;
};

/// Sum of numerical ranks of the members' channels, i.e. the spatial dimensions
/// the group consumes under block diagonalization.
Index group_dimension(const ChannelRealization& r, std::span<const std::size_t> members,
                      double tol = kDefaultRankTol);

/// Throws InfeasibleError("BD infeasible") when the group needs more than M_T dimensions.
BDPrecoderSet bd_precoders(const ChannelRealization& r, std::span<const std::size_t> members,
                           PowerPolicy policy, double total_power, double noise_variance,
                           double tol = kDefaultRankTol);

/// p_i = max(0, mu - 1/g_i) with sum p_i = budget. Zero gains get zero power.
std::vector<double> waterfill(std::span<const double> gains, double budget);

struct GroupCapacity {
  double total = 0.0;
  std::vector<double> per_user;  // bits/s/Hz, in member order
};

GroupCapacity group_capacity(const ChannelRealization& r, std::span<const std::size_t> members,
                             PowerPolicy policy, double total_power, double noise_variance);

double group_sum_capacity(const ChannelRealization& r, std::span<const std::size_t> members,
                          PowerPolicy policy, double total_power, double noise_variance);

/// log2 det(I_{M_T} + scale * H̄^H H̄ V V^H) for a precoder spanning `precoder`
/// with unit power per dimension.
double projector_capacity_transmit_form(const ComplexMatrix& normalized, double scale,
                                        const OrthonormalBasis& precoder);
/// Same quantity via the eigenvalues of T Σ² T^H, T = V^H V̄^(1).
double projector_capacity_eigen_form(const ComplexMatrix& normalized, double scale,
                                     const OrthonormalBasis& precoder);

struct CapacityBounds {
  double lower = 0.0;
  double upper = 0.0;
  double exact = 0.0;           // the user's BD capacity under equal power
  double sin2_sum = 0.0;        // Σ sin² of the angles to the interference row space
  double lambda_min = 0.0;      // extreme singular values of H̄_k
  double lambda_max = 0.0;
  double snr_scale = 0.0;       // rho_k * (per-mode power) / noise
};

/// Lower/upper bounds on one member's BD capacity in terms of the principal
/// angles between its row space and the other members' row space. Assumes equal
/// per-mode power across the group.
CapacityBounds capacity_bounds(const ChannelRealization& r, std::span<const std::size_t> members,
                               std::size_t member_position, double total_power,
                               double noise_variance);

}  // namespace hetsched
