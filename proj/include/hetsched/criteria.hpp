#pragma once

// Scheduling metrics. Every metric compares a candidate user against an
// aggregate of other users: the interference aggregate H̃_k of a group, or the
// already selected subset H_s of a greedy selection.

#include "hetsched/channel.hpp"

#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace hetsched {

enum class Criterion {
  kLargestPrincipalAngle,
  kCollinearity,
  kChordal,
  kGeometricalAngle,
  kGroupingOriented,
  kSelectionFull,
  kSelectionSimplified,
  kFrobeniusNorm,
  kProjectedNorm,
  kRandom,
};

std::string_view to_string(Criterion c);
Criterion parse_criterion(std::string_view text);
std::span<const Criterion> all_criteria();

// Raw metrics on channel matrices. `interference` may have zero rows (no
// interferers), in which case each metric returns its no-interference value.

/// Largest principal angle between the row spaces (larger is better). Row
/// spaces of unequal dimension always contain a direction orthogonal to the
/// smaller one, so the largest angle is pi/2 whenever the ranks differ.
double metric_largest_principal_angle(const ComplexMatrix& hk, const ComplexMatrix& interference);
/// Collinearity of the row-space projectors (smaller is better).
double metric_collinearity(const ComplexMatrix& hk, const ComplexMatrix& interference);
/// Chordal distance between the row spaces (larger is better).
double metric_chordal(const ComplexMatrix& hk, const ComplexMatrix& interference);
/// cos² of the geometrical angle (smaller is better).
double metric_geometrical(const ComplexMatrix& hk, const ComplexMatrix& hj);
/// Σ cos² of the principal angles to the interference row space (smaller is better).
double metric_grouping_oriented(const ComplexMatrix& hk, const ComplexMatrix& interference);

// Selection metrics. `snr_scale` converts rho_k into the per-mode SNR rho_k/σ²
// used by the high-SNR capacity approximations; it shifts every candidate's
// score equally at a given step.

/// log2((snr_scale * rho_k) det(H̄_k H̄_k^H) sin² ψ_{k,s}); -inf when the
/// candidate lies inside the subset's row space.
double c_gain(const ChannelRealization& r, std::size_t candidate,
              std::span<const std::size_t> subset, double snr_scale);
/// Σ_j log2((snr_scale * rho_j) det(H̄_j H̄_j^H) sin² ψ_{j,s\j} sin² ψ_{k,s\j}); 0 for an empty subset.
double c_loss(const ChannelRealization& r, std::size_t candidate,
              std::span<const std::size_t> subset, double snr_scale);

struct DeltaCapacityReport {
  double c_gain = 0.0;
  double c_loss = 0.0;
  double delta = 0.0;
  double sin2_candidate_subset = 1.0;           // sin² ψ_{k,s}
  std::vector<double> sin2_member_rest;         // sin² ψ_{j,s\j}, subset order
  std::vector<double> sin2_candidate_rest;      // sin² ψ_{k,s\j}, subset order
};

DeltaCapacityReport delta_capacity(const ChannelRealization& r, std::size_t candidate,
                                   std::span<const std::size_t> subset, double snr_scale);

/// c_gain - c_loss (larger is better); -inf when there is no gain.
double metric_selection_full(const ChannelRealization& r, std::size_t candidate,
                             std::span<const std::size_t> subset, double snr_scale);
/// rho_k det(H̄_k P⊥ H̄_k^H) with P⊥ the projector onto null(H_s) (larger is better).
double metric_selection_simplified(const ChannelRealization& r, std::size_t candidate,
                                   std::span<const std::size_t> subset);
/// rho_k det(H̄_k H̄_k^H) sin² ψ_{k,s}; the same value by way of principal angles.
double metric_selection_simplified_angle_form(const ChannelRealization& r, std::size_t candidate,
                                              std::span<const std::size_t> subset);
/// ||H_k P⊥||_F², the projected-norm rule of greedy zero-forcing selection.
double metric_projected_norm(const ChannelRealization& r, std::size_t candidate,
                             std::span<const std::size_t> subset);

struct ScoreContext {
  double snr_scale = 1.0;
  std::mt19937_64* rng = nullptr;  // required by Criterion::kRandom
};

/// Oriented score of adding `candidate` to `subset`: larger is always better.
/// Minimization metrics are negated. NaN never escapes (mapped to -inf).
double candidate_score(Criterion c, const ChannelRealization& r, std::size_t candidate,
                       std::span<const std::size_t> subset, const ScoreContext& ctx);

}  // namespace hetsched
