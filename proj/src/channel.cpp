#include "hetsched/channel.hpp"

#include "hetsched/errors.hpp"
#include "hetsched/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hetsched {

std::vector<std::string> validate_scenario(const Scenario& s) {
  if (s.transmit_antennas < 1) throw ConfigError("transmit_antennas must be >= 1");
  if (!(s.path_loss_exponent > 0.0)) throw ConfigError("path_loss_exponent must be > 0");
  if (!(s.reference_distance > 0.0)) throw ConfigError("reference_distance must be > 0");
  if (!(s.max_distance >= s.reference_distance)) {
    throw ConfigError("max_distance must be >= reference_distance");
  }
  if (!(s.noise_variance > 0.0)) throw ConfigError("noise_variance must be > 0");
  if (s.max_receive_antennas < 1) throw ConfigError("max_receive_antennas must be >= 1");
  if (s.trials < 1) throw ConfigError("trials must be >= 1");
  if (s.users.empty()) throw ConfigError("scenario has no users");
  if (s.snr_db.empty()) throw ConfigError("snr sweep is empty");
  for (double v : s.snr_db) {
    if (!std::isfinite(v)) throw ConfigError("snr values must be finite");
  }
  for (std::size_t i = 0; i < s.users.size(); ++i) {
    const auto& u = s.users[i];
    const std::string who = "user " + std::to_string(i) + ": ";
    if (u.antennas && *u.antennas < 1) throw ConfigError(who + "antennas must be >= 1");
    if (u.distance && !(*u.distance >= s.reference_distance)) {
      throw ConfigError(who + "distance must be >= reference_distance");
    }
    for (const auto& c : {u.rx_correlation, u.tx_correlation}) {
      if (c && !(*c >= 0.0 && *c <= 1.0)) throw ConfigError(who + "correlation must lie in [0,1]");
    }
  }

  std::vector<std::string> warnings;
  long fixed_total = 0;
  bool any_random = false;
  for (const auto& u : s.users) {
    if (u.antennas) {
      fixed_total += *u.antennas;
    } else {
      any_random = true;
    }
  }
  if (!any_random && fixed_total <= s.transmit_antennas) {
    warnings.push_back("total receive antennas (" + std::to_string(fixed_total) +
                       ") do not exceed transmit antennas; the system is not overloaded");
  }
  return warnings;
}

ChannelRealization ChannelRealization::from_channels(std::span<const ComplexMatrix> normalized,
                                                     std::span<const double> received_powers) {
  if (normalized.empty()) throw std::invalid_argument("from_channels: no users");
  if (!received_powers.empty() && received_powers.size() != normalized.size()) {
    throw std::invalid_argument("from_channels: received power count mismatch");
  }
  ChannelRealization r;
  r.transmit_antennas = normalized.front().cols();
  for (std::size_t i = 0; i < normalized.size(); ++i) {
    if (normalized[i].cols() != r.transmit_antennas || normalized[i].rows() < 1) {
      throw std::invalid_argument("from_channels: inconsistent channel shapes");
    }
    UserChannel u;
    u.id = i;
    u.received_power = received_powers.empty() ? 1.0 : received_powers[i];
    if (!(u.received_power > 0.0)) throw std::invalid_argument("from_channels: power must be > 0");
    u.normalized = normalized[i];
    u.channel = std::sqrt(u.received_power) * normalized[i];
    r.users.push_back(std::move(u));
  }
  return r;
}

ComplexMatrix stack_channels(const ChannelRealization& r, std::span<const std::size_t> members) {
  Index rows = 0;
  for (std::size_t m : members) rows += r.users.at(m).channel.rows();
  ComplexMatrix out(rows, r.transmit_antennas);
  Index row = 0;
  for (std::size_t m : members) {
    const auto& h = r.users[m].channel;
    out.middleRows(row, h.rows()) = h;
    row += h.rows();
  }
  return out;
}

double received_power(double distance, double path_loss_exponent, double reference_distance) {
  if (!(reference_distance > 0.0)) throw std::invalid_argument("reference distance must be > 0");
  if (!(distance >= reference_distance)) {
    throw std::invalid_argument("distance is closer than the reference distance");
  }
  return std::pow(reference_distance / distance, path_loss_exponent);
}

ComplexMatrix correlation_matrix(double coef, Index n) {
  if (!(coef >= 0.0 && coef <= 1.0)) {
    throw std::invalid_argument("correlation coefficient must lie in [0,1]");
  }
  ComplexMatrix out(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const double d = static_cast<double>(i - j);
      out(i, j) = std::pow(coef, d * d);
    }
  }
  return out;
}

ComplexMatrix matrix_sqrt_psd(const ComplexMatrix& r) {
  if (r.rows() != r.cols()) throw std::invalid_argument("matrix_sqrt_psd: matrix is not square");
  const double scale = std::max(1.0, r.norm());
  if ((r - r.adjoint()).norm() > 1e-10 * scale) {
    throw std::invalid_argument("matrix_sqrt_psd: matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(r);
  Eigen::VectorXd values = eig.eigenvalues();
  for (Index i = 0; i < values.size(); ++i) {
    if (values(i) < -1e-10 * scale) {
      throw std::invalid_argument("matrix_sqrt_psd: matrix is indefinite");
    }
    values(i) = std::sqrt(std::max(values(i), 0.0));
  }
  const ComplexMatrix& v = eig.eigenvectors();
  ComplexMatrix out = v * values.asDiagonal() * v.adjoint();
  return 0.5 * (out + out.adjoint());
}

namespace {

ComplexMatrix correlation_root(double coef, Index n) {
  if (coef == 0.0) return ComplexMatrix::Identity(n, n);
  return matrix_sqrt_psd(correlation_matrix(coef, n));
}

}  // namespace

ChannelRealization generate_realization(const Scenario& s, std::uint64_t trial) {
  ChannelRealization out;
  out.transmit_antennas = s.transmit_antennas;
  out.users.reserve(s.users.size());
  const std::uint64_t attribute_trial = s.redraw_per_trial ? trial : kPopulationTrial;

  for (std::size_t k = 0; k < s.users.size(); ++k) {
    const UserProfile& p = s.users[k];
    auto attr = make_stream(s.seed, attribute_trial, k, StreamPurpose::kUserAttributes);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> dist(s.reference_distance, s.max_distance);
    std::uniform_int_distribution<int> ant(1, s.max_receive_antennas);
    // Draw order is fixed so fixed attributes never shift the random ones.
    const int antennas_draw = ant(attr);
    const double distance_draw = dist(attr);
    const double gamma_draw = unit(attr);
    const double tau_draw = unit(attr);

    UserChannel u;
    u.id = k;
    const Index n_rx = p.antennas.value_or(antennas_draw);
    u.distance = p.distance.value_or(distance_draw);
    u.rx_correlation = p.rx_correlation.value_or(gamma_draw);
    u.tx_correlation = p.tx_correlation.value_or(tau_draw);
    u.received_power = received_power(u.distance, s.path_loss_exponent, s.reference_distance);

    auto fading = make_stream(s.seed, trial, k, StreamPurpose::kFading);
    std::normal_distribution<double> normal(0.0, 1.0);
    ComplexMatrix white(n_rx, s.transmit_antennas);
    for (Index i = 0; i < n_rx; ++i) {
      for (Index j = 0; j < s.transmit_antennas; ++j) {
        const double re = normal(fading);
        const double im = normal(fading);
        white(i, j) = Complex(re, im) / std::numbers::sqrt2;
      }
    }
    u.normalized = correlation_root(u.rx_correlation, n_rx) * white *
                   correlation_root(u.tx_correlation, s.transmit_antennas);
    u.channel = std::sqrt(u.received_power) * u.normalized;
    out.users.push_back(std::move(u));
  }
  return out;
}

}  // namespace hetsched
