#pragma once

// Slow, independent reference implementations used to cross-check the
// library. Nothing here is used on the simulation path.

#include "hetsched/channel.hpp"
#include "hetsched/criteria.hpp"
#include "hetsched/precoding.hpp"
#include "hetsched/schedulers.hpp"

#include <functional>
#include <span>
#include <vector>

namespace hetsched::oracle {

/// Modified Gram-Schmidt over the columns of m, dropping columns whose residual
/// falls below tol * (largest column norm).
ComplexMatrix gram_schmidt(const ComplexMatrix& m, double tol = 1e-10);

/// True when the column spans of a and b coincide (both orthonormal).
bool same_span(const ComplexMatrix& a, const ComplexMatrix& b, double tol = 1e-8);

/// Principal angles by the recursive max-inner-product definition: power
/// iteration for the best pair, then deflation of both subspaces.
std::vector<double> recursive_principal_angles(const ComplexMatrix& u, const ComplexMatrix& v);

/// Water-filling by a dense scan over the water level, refined by linear
/// interpolation between the bracketing grid points.
std::vector<double> waterfill_scan(std::span<const double> gains, double budget,
                                   std::size_t grid = 200000);

/// Quantile from 1-based order-statistic positions 1 + (n - 1) * level.
double order_statistic_quantile(std::vector<double> samples, double level);

/// log2 det(I + scale * H^H H P) with P the projector onto the given basis.
double projector_capacity(const ComplexMatrix& normalized, double scale, const ComplexMatrix& basis);

struct ExactDelta {
  double gain = 0.0;
  double pre = 0.0;
  double post = 0.0;
  double loss() const { return pre - post; }
  double delta() const { return gain - loss(); }
};

/// Exact capacity change from adding `candidate` to `subset` with unit power per
/// transmit dimension scaled by snr_scale * rho, using stacked null spaces
/// instead of alternating projections.
ExactDelta exact_delta_capacity(const ChannelRealization& r, std::size_t candidate,
                                std::span<const std::size_t> subset, double snr_scale);

/// Kendall tau-a between two score vectors.
double kendall_tau(std::span<const double> a, std::span<const double> b);

/// Set partitions of {0..n-1} through restricted growth strings, filtered to
/// the given block sizes (groups of `group_size` plus one residual block).
std::vector<std::vector<std::vector<std::size_t>>> restricted_growth_partitions(
    std::size_t n, std::size_t group_size);

/// Max-min arrangement by full re-enumeration, scoring each user against the
/// rest of its group with `score`. First maximum wins.
std::vector<std::vector<std::size_t>> brute_force_conventional(
    const ChannelRealization& r, std::size_t group_size,
    const std::function<double(std::size_t, std::span<const std::size_t>)>& score);

/// Best feasible subset by enumerating subsets in order of size.
std::vector<std::size_t> brute_force_best_subset(const ChannelRealization& r, PowerPolicy policy,
                                                 double total_power, double noise_variance);

/// Greedy recursion written out step by step: start from the largest
/// Frobenius norm, then repeatedly take the best-scoring rank-feasible user.
std::vector<std::size_t> stepwise_greedy(
    const ChannelRealization& r,
    const std::function<double(std::size_t, std::span<const std::size_t>)>& score);

/// Sum of numerical ranks <= M_T for every group, checked with a fresh SVD.
bool arrangement_is_feasible(const ChannelRealization& r,
                             const std::vector<std::vector<std::size_t>>& groups);

}  // namespace hetsched::oracle
