#include "hetsched/precoding.hpp"

#include "hetsched/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace hetsched {

std::string_view to_string(PowerPolicy policy) {
  return policy == PowerPolicy::kEqual ? "equal" : "waterfilling";
}

PowerPolicy parse_power_policy(std::string_view text) {
  if (text == "equal") return PowerPolicy::kEqual;
  if (text == "waterfilling") return PowerPolicy::kWaterfilling;
  throw ConfigError("unknown power policy '" + std::string(text) + "' (equal|waterfilling)");
}

std::size_t BDPrecoderSet::active_modes() const {
  std::size_t n = 0;
  for (const auto& u : users) n += u.mode_gains.size();
  return n;
}

double BDPrecoderSet::allocated_power() const {
  double acc = 0.0;
  for (const auto& u : users) {
    for (double p : u.mode_powers) acc += p;
  }
  return acc;
}

Index group_dimension(const ChannelRealization& r, std::span<const std::size_t> members,
                      double tol) {
  Index dims = 0;
  for (std::size_t m : members) dims += numerical_rank(r.users.at(m).channel, tol);
  return dims;
}

BDPrecoderSet bd_precoders(const ChannelRealization& r, std::span<const std::size_t> members,
                           PowerPolicy policy, double total_power, double noise_variance,
                           double tol) {
  if (!(total_power > 0.0) || !(noise_variance > 0.0)) {
    throw std::invalid_argument("bd_precoders: power and noise variance must be positive");
  }
  const Index n_tx = r.transmit_antennas;
  if (group_dimension(r, members, tol) > n_tx) throw InfeasibleError("BD infeasible");

  BDPrecoderSet out;
  std::vector<std::size_t> others;
  std::vector<double> all_gains;
  for (std::size_t pos = 0; pos < members.size(); ++pos) {
    const UserChannel& user = r.users[members[pos]];
    UserPrecoder pre;
    pre.user = members[pos];
    Eigen::JacobiSVD<ComplexMatrix> own(user.channel);
    const double own_max = own.singularValues().size() ? own.singularValues()(0) : 0.0;
    if (own_max > 0.0) {
      others.clear();
      for (std::size_t q = 0; q < members.size(); ++q) {
        if (q != pos) others.push_back(members[q]);
      }
      pre.interference_null = null_space_basis(stack_channels(r, others), n_tx, tol);
      pre.effective_channel = user.channel * pre.interference_null.columns();
      const Eigen::VectorXd s = Eigen::JacobiSVD<ComplexMatrix>(pre.effective_channel).singularValues();
      for (Index i = 0; i < s.size(); ++i) {
        if (s(i) > tol * own_max) pre.mode_gains.push_back(s(i) * s(i) / noise_variance);
      }
    } else {
      pre.interference_null = OrthonormalBasis::trusted(ComplexMatrix(n_tx, 0));
      pre.effective_channel = ComplexMatrix(user.channel.rows(), 0);
    }
    all_gains.insert(all_gains.end(), pre.mode_gains.begin(), pre.mode_gains.end());
    out.users.push_back(std::move(pre));
  }

  if (all_gains.empty()) return out;
  std::vector<double> powers;
  if (policy == PowerPolicy::kEqual) {
    const double per_mode = total_power / static_cast<double>(all_gains.size());
    powers.assign(all_gains.size(), per_mode);
    out.beta = std::sqrt(per_mode);
  } else {
    powers = waterfill(all_gains, total_power);
  }
  std::size_t next = 0;
  for (auto& u : out.users) {
    u.mode_powers.assign(powers.begin() + static_cast<std::ptrdiff_t>(next),
                         powers.begin() + static_cast<std::ptrdiff_t>(next + u.mode_gains.size()));
    next += u.mode_gains.size();
  }
  return out;
}

std::vector<double> waterfill(std::span<const double> gains, double budget) {
  if (!(budget > 0.0)) throw std::invalid_argument("waterfill: budget must be positive");
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < gains.size(); ++i) {
    if (!(gains[i] >= 0.0) || !std::isfinite(gains[i])) {
      throw std::invalid_argument("waterfill: gains must be finite and non-negative");
    }
    if (gains[i] > 0.0) active.push_back(i);
  }
  if (active.empty()) throw std::invalid_argument("waterfill: all gains are zero");

  // Strongest modes first; the water level over the m strongest modes is
  // (budget + Σ 1/g) / m, valid once it clears the weakest of them.
  std::stable_sort(active.begin(), active.end(),
                   [&](std::size_t a, std::size_t b) { return gains[a] > gains[b]; });
  double level = 0.0;
  std::size_t m = active.size();
  for (; m >= 1; --m) {
    double inv_sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) inv_sum += 1.0 / gains[active[i]];
    level = (budget + inv_sum) / static_cast<double>(m);
    if (level > 1.0 / gains[active[m - 1]]) break;
  }
  std::vector<double> powers(gains.size(), 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    powers[active[i]] = std::max(0.0, level - 1.0 / gains[active[i]]);
  }
  return powers;
}

GroupCapacity group_capacity(const ChannelRealization& r, std::span<const std::size_t> members,
                             PowerPolicy policy, double total_power, double noise_variance) {
  const BDPrecoderSet set = bd_precoders(r, members, policy, total_power, noise_variance);
  GroupCapacity out;
  for (const auto& u : set.users) {
    double c = 0.0;
    for (std::size_t i = 0; i < u.mode_gains.size(); ++i) {
      c += std::log2(1.0 + u.mode_powers[i] * u.mode_gains[i]);
    }
    out.per_user.push_back(c);
    out.total += c;
  }
  return out;
}

double group_sum_capacity(const ChannelRealization& r, std::span<const std::size_t> members,
                          PowerPolicy policy, double total_power, double noise_variance) {
  return group_capacity(r, members, policy, total_power, noise_variance).total;
}

double projector_capacity_transmit_form(const ComplexMatrix& normalized, double scale,
                                        const OrthonormalBasis& precoder) {
  const Index n = normalized.cols();
  const ComplexMatrix m = ComplexMatrix::Identity(n, n) +
                          scale * normalized.adjoint() * normalized * precoder.projector();
  return std::log2(std::abs(m.determinant()));
}

double projector_capacity_eigen_form(const ComplexMatrix& normalized, double scale,
                                     const OrthonormalBasis& precoder) {
  Eigen::JacobiSVD<ComplexMatrix> svd(normalized, Eigen::ComputeThinV);
  const ComplexMatrix t = precoder.columns().adjoint() * svd.matrixV();
  const Eigen::VectorXd s2 = svd.singularValues().array().square();
  ComplexMatrix m = t * s2.asDiagonal() * t.adjoint();
  m = 0.5 * (m + m.adjoint());
  const Eigen::VectorXd eig = Eigen::SelfAdjointEigenSolver<ComplexMatrix>(m).eigenvalues();
  double c = 0.0;
  for (Index i = 0; i < eig.size(); ++i) c += std::log2(1.0 + scale * std::max(0.0, eig(i)));
  return c;
}

CapacityBounds capacity_bounds(const ChannelRealization& r, std::span<const std::size_t> members,
                               std::size_t member_position, double total_power,
                               double noise_variance) {
  if (member_position >= members.size()) {
    throw std::invalid_argument("capacity_bounds: member position out of range");
  }
  const BDPrecoderSet set =
      bd_precoders(r, members, PowerPolicy::kEqual, total_power, noise_variance);
  const UserPrecoder& pre = set.users[member_position];
  const UserChannel& user = r.users[members[member_position]];
  const double per_mode = set.active_modes()
                              ? total_power / static_cast<double>(set.active_modes())
                              : 0.0;

  CapacityBounds out;
  out.snr_scale = user.received_power * per_mode / noise_variance;
  for (std::size_t i = 0; i < pre.mode_gains.size(); ++i) {
    out.exact += std::log2(1.0 + pre.mode_powers[i] * pre.mode_gains[i]);
  }

  const Index n_rx = user.normalized.rows();
  Eigen::JacobiSVD<ComplexMatrix> svd(user.normalized, Eigen::ComputeThinV);
  const Eigen::VectorXd& lambda = svd.singularValues();
  out.lambda_max = lambda(0);
  out.lambda_min = (n_rx <= lambda.size()) ? lambda(n_rx - 1) : 0.0;
  if (pre.interference_null.dim() > 0) {
    // Singular values of T_k = Ṽ^H V̄^(1) are the sines of the angles between
    // the user's row space and the interference row space.
    out.sin2_sum = (pre.interference_null.columns().adjoint() * svd.matrixV()).squaredNorm();
  }
  const double m = static_cast<double>(n_rx);
  out.lower = std::log2(1.0 + out.snr_scale * out.lambda_min * out.lambda_min * out.sin2_sum);
  out.upper =
      m * std::log2(1.0 + out.snr_scale * out.lambda_max * out.lambda_max * out.sin2_sum / m);
  return out;
}

}  // namespace hetsched
