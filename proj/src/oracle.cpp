#include "hetsched/oracle.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace hetsched::oracle {

ComplexMatrix gram_schmidt(const ComplexMatrix& m, double tol) {
  double scale = 0.0;
  for (Index j = 0; j < m.cols(); ++j) scale = std::max(scale, m.col(j).norm());
  std::vector<Eigen::VectorXcd> kept;
  for (Index j = 0; j < m.cols(); ++j) {
    Eigen::VectorXcd v = m.col(j);
    // Two passes keep the residual orthogonal to working precision.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : kept) v -= q * q.dot(v);
    }
    if (v.norm() > tol * scale) kept.push_back(v / v.norm());
  }
  ComplexMatrix out(m.rows(), static_cast<Index>(kept.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) out.col(static_cast<Index>(i)) = kept[i];
  return out;
}

bool same_span(const ComplexMatrix& a, const ComplexMatrix& b, double tol) {
  if (a.cols() != b.cols() || a.rows() != b.rows()) return false;
  const ComplexMatrix pa = a * a.adjoint();
  const ComplexMatrix pb = b * b.adjoint();
  return (pa - pb).norm() <= tol * std::max(1.0, pa.norm());
}

std::vector<double> recursive_principal_angles(const ComplexMatrix& u, const ComplexMatrix& v) {
  if (u.rows() != v.rows()) throw std::invalid_argument("recursive angles: ambient mismatch");
  ComplexMatrix uu = u;
  ComplexMatrix vv = v;
  const Index count = std::min(u.cols(), v.cols());
  std::vector<double> angles;
  for (Index i = 0; i < count; ++i) {
    // Maximize |x^H uu^H vv y| over unit x, y by power iteration on uu^H vv vv^H uu.
    const ComplexMatrix c = uu.adjoint() * vv;
    const ComplexMatrix g = c * c.adjoint();
    Eigen::VectorXcd x = Eigen::VectorXcd::Ones(g.rows());
    for (Index j = 0; j < x.size(); ++j) x(j) += Complex(0.01 * static_cast<double>(j), 0.003 * j);
    x.normalize();
    for (int it = 0; it < 5000; ++it) {
      Eigen::VectorXcd next = g * x;
      const double n = next.norm();
      if (n == 0.0) break;
      next /= n;
      if ((next - x).norm() < 1e-15) {
        x = next;
        break;
      }
      x = next;
    }
    const double sigma = std::sqrt(std::max(0.0, (x.adjoint() * g * x)(0).real()));
    angles.push_back(std::acos(std::min(1.0, sigma)));
    // Directions achieving the maximum, removed from each subspace.
    const Eigen::VectorXcd ux = uu * x;
    Eigen::VectorXcd y = c.adjoint() * x;
    Eigen::VectorXcd vy;
    if (y.norm() > 1e-14) {
      vy = vv * (y / y.norm());
    } else {
      vy = vv.col(0);
    }
    auto deflate = [](const ComplexMatrix& basis, const Eigen::VectorXcd& dir) {
      const Eigen::VectorXcd d = dir / dir.norm();
      const ComplexMatrix projected = basis - d * (d.adjoint() * basis);
      return gram_schmidt(projected, 1e-8);
    };
    uu = deflate(uu, ux);
    vv = deflate(vv, vy);
    if (uu.cols() == 0 || vv.cols() == 0) break;
  }
  std::sort(angles.begin(), angles.end());
  return angles;
}

std::vector<double> waterfill_scan(std::span<const double> gains, double budget, std::size_t grid) {
  double max_inv = 0.0;
  double min_inv = std::numeric_limits<double>::infinity();
  for (double g : gains) {
    if (g > 0.0) {
      max_inv = std::max(max_inv, 1.0 / g);
      min_inv = std::min(min_inv, 1.0 / g);
    }
  }
  if (!std::isfinite(min_inv)) throw std::invalid_argument("waterfill_scan: all gains zero");
  auto used = [&](double mu) {
    double acc = 0.0;
    for (double g : gains) {
      if (g > 0.0) acc += std::max(0.0, mu - 1.0 / g);
    }
    return acc;
  };
  const double lo = min_inv;
  const double hi = max_inv + budget;
  double prev_mu = lo;
  double prev_used = used(lo);
  double mu = hi;
  for (std::size_t i = 1; i <= grid; ++i) {
    const double m = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid);
    const double u = used(m);
    if (u >= budget) {
      mu = prev_mu + (budget - prev_used) * (m - prev_mu) / (u - prev_used);
      break;
    }
    prev_mu = m;
    prev_used = u;
  }
  std::vector<double> p;
  for (double g : gains) p.push_back(g > 0.0 ? std::max(0.0, mu - 1.0 / g) : 0.0);
  return p;
}

double order_statistic_quantile(std::vector<double> samples, double level) {
  if (samples.empty()) throw std::invalid_argument("quantile: empty");
  std::sort(samples.begin(), samples.end());
  const double pos = 1.0 + (static_cast<double>(samples.size()) - 1.0) * level;
  const auto below = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(below);
  if (below >= samples.size()) return samples.back();
  return samples[below - 1] + frac * (samples[below] - samples[below - 1]);
}

double projector_capacity(const ComplexMatrix& normalized, double scale, const ComplexMatrix& basis) {
  if (basis.cols() == 0) return 0.0;
  const ComplexMatrix e = normalized * basis;
  const Index n = e.rows();
  const ComplexMatrix m = ComplexMatrix::Identity(n, n) + scale * e * e.adjoint();
  return std::log2(m.determinant().real());
}

namespace {

ComplexMatrix null_basis(const ChannelRealization& r, std::span<const std::size_t> members) {
  const Index n = r.transmit_antennas;
  if (members.empty()) return ComplexMatrix::Identity(n, n);
  const ComplexMatrix h = stack_channels(r, members);
  // Complement of the row space, built from Gram-Schmidt rather than an SVD.
  const ComplexMatrix rows = gram_schmidt(h.adjoint());
  ComplexMatrix both(n, rows.cols() + n);
  both << rows, ComplexMatrix::Identity(n, n);
  const ComplexMatrix full = gram_schmidt(both);
  return full.rightCols(full.cols() - rows.cols());
}

}  // namespace

ExactDelta exact_delta_capacity(const ChannelRealization& r, std::size_t candidate,
                                std::span<const std::size_t> subset, double snr_scale) {
  ExactDelta out;
  const UserChannel& k = r.users.at(candidate);
  out.gain = projector_capacity(k.normalized, snr_scale * k.received_power, null_basis(r, subset));
  for (std::size_t pos = 0; pos < subset.size(); ++pos) {
    std::vector<std::size_t> rest;
    for (std::size_t q = 0; q < subset.size(); ++q) {
      if (q != pos) rest.push_back(subset[q]);
    }
    const UserChannel& j = r.users[subset[pos]];
    const double a = snr_scale * j.received_power;
    out.pre += projector_capacity(j.normalized, a, null_basis(r, rest));
    rest.push_back(candidate);
    out.post += projector_capacity(j.normalized, a, null_basis(r, rest));
  }
  return out;
}

double kendall_tau(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("kendall_tau: sizes");
  double concordant = 0.0;
  double discordant = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const double s = (a[i] - a[j]) * (b[i] - b[j]);
      if (s > 0) concordant += 1.0;
      if (s < 0) discordant += 1.0;
    }
  }
  const double pairs = static_cast<double>(a.size() * (a.size() - 1) / 2);
  return (concordant - discordant) / pairs;
}

std::vector<std::vector<std::vector<std::size_t>>> restricted_growth_partitions(
    std::size_t n, std::size_t group_size) {
  std::vector<std::vector<std::vector<std::size_t>>> out;
  if (n == 0) return out;
  const std::size_t full = n / group_size;
  const std::size_t residual = n % group_size;
  std::vector<std::size_t> label(n, 0);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t blocks) {
    if (i == n) {
      std::vector<std::vector<std::size_t>> p(blocks);
      for (std::size_t u = 0; u < n; ++u) p[label[u]].push_back(u);
      std::size_t n_full = 0;
      std::size_t n_res = 0;
      for (const auto& g : p) {
        if (g.size() == group_size) {
          ++n_full;
        } else if (g.size() == residual) {
          ++n_res;
        } else {
          return;
        }
      }
      if (n_full == full && n_res == (residual ? 1u : 0u)) out.push_back(std::move(p));
      return;
    }
    for (std::size_t b = 0; b <= blocks; ++b) {
      label[i] = b;
      rec(i + 1, std::max(blocks, b + 1));
    }
  };
  rec(0, 0);
  return out;
}

std::vector<std::vector<std::size_t>> brute_force_conventional(
    const ChannelRealization& r, std::size_t group_size,
    const std::function<double(std::size_t, std::span<const std::size_t>)>& score) {
  std::vector<std::vector<std::size_t>> best;
  double best_value = -std::numeric_limits<double>::infinity();
  bool found = false;
  for (const auto& p : restricted_growth_partitions(r.size(), group_size)) {
    if (!arrangement_is_feasible(r, p)) continue;
    double value = std::numeric_limits<double>::infinity();
    for (const auto& g : p) {
      for (std::size_t u : g) {
        std::vector<std::size_t> others;
        for (std::size_t w : g) {
          if (w != u) others.push_back(w);
        }
        value = std::min(value, score(u, others));
      }
    }
    if (!found || value > best_value) {
      best = p;
      best_value = value;
      found = true;
    }
  }
  return best;
}

std::vector<std::size_t> brute_force_best_subset(const ChannelRealization& r, PowerPolicy policy,
                                                 double total_power, double noise_variance) {
  std::vector<std::size_t> best;
  double best_c = -std::numeric_limits<double>::infinity();
  const std::size_t n = r.size();
  for (std::size_t size = 1; size <= n; ++size) {
    std::vector<bool> pick(n, false);
    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(size), true);
    do {
      std::vector<std::size_t> members;
      for (std::size_t u = 0; u < n; ++u) {
        if (pick[u]) members.push_back(u);
      }
      if (!arrangement_is_feasible(r, {members})) continue;
      const double c = group_sum_capacity(r, members, policy, total_power, noise_variance);
      if (c > best_c) {
        best_c = c;
        best = members;
      }
    } while (std::prev_permutation(pick.begin(), pick.end()));
  }
  return best;
}

std::vector<std::size_t> stepwise_greedy(
    const ChannelRealization& r,
    const std::function<double(std::size_t, std::span<const std::size_t>)>& score) {
  std::size_t first = 0;
  for (std::size_t u = 1; u < r.size(); ++u) {
    if (r.users[u].channel.norm() > r.users[first].channel.norm()) first = u;
  }
  std::vector<std::size_t> chosen{first};
  while (true) {
    std::vector<std::pair<double, std::size_t>> options;
    for (std::size_t u = 0; u < r.size(); ++u) {
      if (std::find(chosen.begin(), chosen.end(), u) != chosen.end()) continue;
      std::vector<std::size_t> trial = chosen;
      trial.push_back(u);
      if (!arrangement_is_feasible(r, {trial})) continue;
      options.emplace_back(score(u, chosen), u);
    }
    if (options.empty()) return chosen;
    std::size_t pick = options.front().second;
    double best = options.front().first;
    for (const auto& [s, u] : options) {
      if (s > best) {
        best = s;
        pick = u;
      }
    }
    chosen.push_back(pick);
  }
}

bool arrangement_is_feasible(const ChannelRealization& r,
                             const std::vector<std::vector<std::size_t>>& groups) {
  for (const auto& g : groups) {
    Index dims = 0;
    for (std::size_t u : g) {
      const Eigen::VectorXd s =
          Eigen::BDCSVD<ComplexMatrix>(r.users.at(u).channel).singularValues();
      for (Index i = 0; i < s.size(); ++i) {
        if (s(i) > 1e-10 * s(0)) ++dims;
      }
    }
    if (dims > r.transmit_antennas) return false;
  }
  return true;
}

}  // namespace hetsched::oracle
