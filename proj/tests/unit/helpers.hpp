#pragma once

#include "hetsched/channel.hpp"
#include "hetsched/rng.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace hetsched::testing {

inline std::mt19937_64 test_rng(std::uint64_t index) {
  return make_stream(20240611, 0, index, StreamPurpose::kTest);
}

inline ComplexMatrix random_matrix(std::mt19937_64& rng, Index rows, Index cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  ComplexMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = Complex(n(rng), n(rng)) / std::sqrt(2.0);
  }
  return m;
}

inline ComplexMatrix random_unitary(std::mt19937_64& rng, Index n) {
  Eigen::HouseholderQR<ComplexMatrix> qr(random_matrix(rng, n, n));
  return qr.householderQ() * ComplexMatrix::Identity(n, n);
}

inline ComplexMatrix unit_row(Index n, Index i, double scale = 1.0) {
  ComplexMatrix m = ComplexMatrix::Zero(1, n);
  m(0, i) = scale;
  return m;
}

/// Random realization with the given antenna counts and received powers in (0.05, 1].
inline ChannelRealization random_realization(std::mt19937_64& rng, Index n_tx,
                                             const std::vector<Index>& antennas) {
  std::uniform_real_distribution<double> power(0.05, 1.0);
  std::vector<ComplexMatrix> hs;
  std::vector<double> rho;
  for (Index a : antennas) {
    hs.push_back(random_matrix(rng, a, n_tx));
    rho.push_back(power(rng));
  }
  return ChannelRealization::from_channels(hs, rho);
}

/// Real 1 x 2 channel of the given norm at the given angle in degrees.
inline ComplexMatrix planar(double norm, double degrees) {
  const double t = degrees * std::acos(-1.0) / 180.0;
  ComplexMatrix m(1, 2);
  m << norm * std::cos(t), norm * std::sin(t);
  return m;
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace hetsched::testing
