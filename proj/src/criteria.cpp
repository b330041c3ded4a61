#include "hetsched/criteria.hpp"

#include "hetsched/errors.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hetsched {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct CriterionName {
  Criterion kind;
  std::string_view name;
};

constexpr std::array<CriterionName, 10> kCriterionNames{{
    {Criterion::kLargestPrincipalAngle, "largest-principal-angle"},
    {Criterion::kCollinearity, "collinearity"},
    {Criterion::kChordal, "chordal"},
    {Criterion::kGeometricalAngle, "geometrical-angle"},
    {Criterion::kGroupingOriented, "grouping-oriented"},
    {Criterion::kSelectionFull, "selection-full"},
    {Criterion::kSelectionSimplified, "selection-simplified"},
    {Criterion::kFrobeniusNorm, "frobenius-norm"},
    {Criterion::kProjectedNorm, "projected-norm"},
    {Criterion::kRandom, "random"},
}};

constexpr std::array<Criterion, 10> kAllCriteria{
    Criterion::kLargestPrincipalAngle, Criterion::kCollinearity,   Criterion::kChordal,
    Criterion::kGeometricalAngle,      Criterion::kGroupingOriented, Criterion::kSelectionFull,
    Criterion::kSelectionSimplified,   Criterion::kFrobeniusNorm,  Criterion::kProjectedNorm,
    Criterion::kRandom,
};

void require_nonzero(const ComplexMatrix& m, const char* what) {
  if (m.size() == 0 || m.norm() == 0.0) {
    throw std::invalid_argument(std::string(what) + ": zero channel matrix");
  }
}

double gram_determinant(const ComplexMatrix& h) {
  const ComplexMatrix g = h * h.adjoint();
  return std::max(0.0, g.determinant().real());
}

std::vector<std::size_t> without(std::span<const std::size_t> subset, std::size_t skip) {
  std::vector<std::size_t> rest;
  rest.reserve(subset.size());
  for (std::size_t pos = 0; pos < subset.size(); ++pos) {
    if (pos != skip) rest.push_back(subset[pos]);
  }
  return rest;
}

// Product of sin² over the principal angles between the row space of h and
// the row space of `aggregate`. Exactly 0 when h's row space already lies in
// the aggregate's, exactly 1 against an empty aggregate.
double sin2_against(const ComplexMatrix& h, const ComplexMatrix& aggregate) {
  if (aggregate.rows() == 0) return 1.0;
  ComplexMatrix both(aggregate.rows() + h.rows(), h.cols());
  both << aggregate, h;
  if (numerical_rank(both) == numerical_rank(aggregate)) return 0.0;
  return geometrical_angle_sin2(h, aggregate);
}

}  // namespace

std::string_view to_string(Criterion c) {
  for (const auto& entry : kCriterionNames) {
    if (entry.kind == c) return entry.name;
  }
  return "unknown";
}

Criterion parse_criterion(std::string_view text) {
  for (const auto& entry : kCriterionNames) {
    if (entry.name == text) return entry.kind;
  }
  std::string valid;
  for (const auto& entry : kCriterionNames) {
    if (!valid.empty()) valid += ", ";
    valid += entry.name;
  }
  throw ConfigError("unknown criterion '" + std::string(text) + "' (valid: " + valid + ")");
}

std::span<const Criterion> all_criteria() { return kAllCriteria; }

double metric_largest_principal_angle(const ComplexMatrix& hk, const ComplexMatrix& interference) {
  require_nonzero(hk, "largest principal angle");
  if (interference.rows() == 0) return std::numbers::pi / 2.0;
  require_nonzero(interference, "largest principal angle");
  const OrthonormalBasis u = row_space_basis(hk);
  const OrthonormalBasis v = row_space_basis(interference);
  if (u.dim() != v.dim()) return std::numbers::pi / 2.0;
  return principal_angles(u, v).largest();
}

double metric_collinearity(const ComplexMatrix& hk, const ComplexMatrix& interference) {
  require_nonzero(hk, "collinearity");
  if (interference.rows() == 0) return 0.0;
  return subspace_collinearity(hk, interference);
}

double metric_chordal(const ComplexMatrix& hk, const ComplexMatrix& interference) {
  require_nonzero(hk, "chordal distance");
  const OrthonormalBasis u = row_space_basis(hk);
  if (interference.rows() == 0) return std::sqrt(static_cast<double>(u.dim()));
  return chordal_distance(u, row_space_basis(interference));
}

double metric_geometrical(const ComplexMatrix& hk, const ComplexMatrix& hj) {
  require_nonzero(hk, "geometrical angle");
  if (hj.rows() == 0) return 0.0;
  return geometrical_angle_cos2(hk, hj);
}

double metric_grouping_oriented(const ComplexMatrix& hk, const ComplexMatrix& interference) {
  require_nonzero(hk, "grouping-oriented");
  if (interference.rows() == 0) return 0.0;
  return principal_angles(row_space_basis(hk), row_space_basis(interference)).cos2_sum();
}

DeltaCapacityReport delta_capacity(const ChannelRealization& r, std::size_t candidate,
                                   std::span<const std::size_t> subset, double snr_scale) {
  if (!(snr_scale > 0.0)) throw std::invalid_argument("delta_capacity: snr scale must be positive");
  for (std::size_t m : subset) {
    if (m == candidate) throw std::invalid_argument("delta_capacity: candidate already in subset");
  }
  const UserChannel& k = r.users.at(candidate);
  DeltaCapacityReport out;
  out.sin2_candidate_subset = sin2_against(k.normalized, stack_channels(r, subset));
  const double gain_arg =
      snr_scale * k.received_power * gram_determinant(k.normalized) * out.sin2_candidate_subset;
  out.c_gain = gain_arg > 0.0 ? std::log2(gain_arg) : kNegInf;

  for (std::size_t pos = 0; pos < subset.size(); ++pos) {
    const UserChannel& j = r.users[subset[pos]];
    const ComplexMatrix rest = stack_channels(r, without(subset, pos));
    const double sj = sin2_against(j.normalized, rest);
    const double sk = sin2_against(k.normalized, rest);
    out.sin2_member_rest.push_back(sj);
    out.sin2_candidate_rest.push_back(sk);
    // Logs are summed term by term so tiny factors never underflow the product.
    out.c_loss += std::log2(snr_scale * j.received_power) + std::log2(gram_determinant(j.normalized)) +
                  std::log2(sj) + std::log2(sk);
  }
  out.delta = out.c_gain == kNegInf ? kNegInf : out.c_gain - out.c_loss;
  if (std::isnan(out.delta)) out.delta = kNegInf;
  return out;
}

double c_gain(const ChannelRealization& r, std::size_t candidate,
              std::span<const std::size_t> subset, double snr_scale) {
  const UserChannel& k = r.users.at(candidate);
  const double arg = snr_scale * k.received_power * gram_determinant(k.normalized) *
                     sin2_against(k.normalized, stack_channels(r, subset));
  return arg > 0.0 ? std::log2(arg) : kNegInf;
}

double c_loss(const ChannelRealization& r, std::size_t candidate,
              std::span<const std::size_t> subset, double snr_scale) {
  return delta_capacity(r, candidate, subset, snr_scale).c_loss;
}

double metric_selection_full(const ChannelRealization& r, std::size_t candidate,
                             std::span<const std::size_t> subset, double snr_scale) {
  return delta_capacity(r, candidate, subset, snr_scale).delta;
}

double metric_selection_simplified(const ChannelRealization& r, std::size_t candidate,
                                   std::span<const std::size_t> subset) {
  const UserChannel& k = r.users.at(candidate);
  const Index n = r.transmit_antennas;
  ComplexMatrix p_perp = ComplexMatrix::Identity(n, n);
  if (!subset.empty()) {
    const ComplexMatrix hs = stack_channels(r, subset);
    if (hs.norm() > 0.0) p_perp -= row_space_basis(hs).projector();
  }
  return k.received_power * gram_determinant(k.normalized * p_perp);
}

double metric_selection_simplified_angle_form(const ChannelRealization& r, std::size_t candidate,
                                              std::span<const std::size_t> subset) {
  const UserChannel& k = r.users.at(candidate);
  return k.received_power * gram_determinant(k.normalized) *
         sin2_against(k.normalized, stack_channels(r, subset));
}

double metric_projected_norm(const ChannelRealization& r, std::size_t candidate,
                             std::span<const std::size_t> subset) {
  const UserChannel& k = r.users.at(candidate);
  if (subset.empty()) return k.channel.squaredNorm();
  const ComplexMatrix hs = stack_channels(r, subset);
  if (hs.norm() == 0.0) return k.channel.squaredNorm();
  const ComplexMatrix q = row_space_basis(hs).columns();
  return (k.channel - k.channel * q * q.adjoint()).squaredNorm();
}

double candidate_score(Criterion c, const ChannelRealization& r, std::size_t candidate,
                       std::span<const std::size_t> subset, const ScoreContext& ctx) {
  const ComplexMatrix& hk = r.users.at(candidate).channel;
  double score = 0.0;
  switch (c) {
    case Criterion::kLargestPrincipalAngle:
      score = metric_largest_principal_angle(hk, stack_channels(r, subset));
      break;
    case Criterion::kCollinearity:
      score = -metric_collinearity(hk, stack_channels(r, subset));
      break;
    case Criterion::kChordal:
      score = metric_chordal(hk, stack_channels(r, subset));
      break;
    case Criterion::kGeometricalAngle:
      score = -metric_geometrical(hk, stack_channels(r, subset));
      break;
    case Criterion::kGroupingOriented:
      score = -metric_grouping_oriented(hk, stack_channels(r, subset));
      break;
    case Criterion::kSelectionFull:
      score = metric_selection_full(r, candidate, subset, ctx.snr_scale);
      break;
    case Criterion::kSelectionSimplified:
      score = metric_selection_simplified(r, candidate, subset);
      break;
    case Criterion::kFrobeniusNorm:
      score = hk.squaredNorm();
      break;
    case Criterion::kProjectedNorm:
      score = metric_projected_norm(r, candidate, subset);
      break;
    case Criterion::kRandom:
      if (ctx.rng == nullptr) throw std::invalid_argument("random criterion needs an rng");
      score = std::uniform_real_distribution<double>(0.0, 1.0)(*ctx.rng);
      break;
  }
  return std::isnan(score) ? kNegInf : score;
}

}  // namespace hetsched
