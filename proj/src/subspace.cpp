#include "hetsched/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hetsched {

namespace {

void require_finite(const ComplexMatrix& m, const char* what) {
  if (!m.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": matrix has non-finite entries");
  }
}

void require_same_ambient(const OrthonormalBasis& u, const OrthonormalBasis& v, const char* what) {
  if (u.ambient_dim() != v.ambient_dim()) {
    throw std::invalid_argument(std::string(what) + ": ambient dimension mismatch (" +
                                std::to_string(u.ambient_dim()) + " vs " +
                                std::to_string(v.ambient_dim()) + ")");
  }
}

Index rank_from_singular_values(const Eigen::VectorXd& s, double tol) {
  if (s.size() == 0 || s(0) <= 0.0) return 0;
  const double cutoff = tol * s(0);
  Index r = 0;
  while (r < s.size() && s(r) > cutoff) ++r;
  return r;
}

}  // namespace

OrthonormalBasis::OrthonormalBasis(ComplexMatrix columns) : columns_(std::move(columns)) {
  require_finite(columns_, "OrthonormalBasis");
  if (columns_.cols() > columns_.rows()) {
    throw std::invalid_argument("OrthonormalBasis: more columns than ambient dimension");
  }
  const ComplexMatrix gram = columns_.adjoint() * columns_;
  const double err = (gram - ComplexMatrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  if (columns_.cols() > 0 && err > kOrthonormalTol) {
    throw std::invalid_argument("OrthonormalBasis: columns are not orthonormal (error " +
                                std::to_string(err) + ")");
  }
}

OrthonormalBasis OrthonormalBasis::identity(Index ambient_dim) {
  return trusted(ComplexMatrix::Identity(ambient_dim, ambient_dim));
}

OrthonormalBasis OrthonormalBasis::trusted(ComplexMatrix columns) {
  return OrthonormalBasis(std::move(columns), TrustedTag{});
}

double PrincipalAngleSet::cos2_sum() const {
  double acc = 0.0;
  for (double a : angles) acc += std::cos(a) * std::cos(a);
  return acc;
}

double PrincipalAngleSet::sin2_sum() const {
  double acc = 0.0;
  for (double a : angles) acc += std::sin(a) * std::sin(a);
  return acc;
}

double PrincipalAngleSet::cos2_product() const {
  double acc = 1.0;
  for (double a : angles) acc *= std::cos(a) * std::cos(a);
  return acc;
}

double PrincipalAngleSet::sin2_product() const {
  double acc = 1.0;
  for (double a : angles) acc *= std::sin(a) * std::sin(a);
  return acc;
}

double PrincipalAngleSet::log2_sin2_product() const {
  double acc = 0.0;
  for (double a : angles) {
    const double s = std::sin(a);
    if (s <= 0.0) return -std::numeric_limits<double>::infinity();
    acc += 2.0 * std::log2(s);
  }
  return acc;
}

Index numerical_rank(const ComplexMatrix& m, double tol) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return rank_from_singular_values(svd.singularValues(), tol);
}

ComplexMatrix stack_rows(std::span<const ComplexMatrix> blocks, Index cols) {
  Index rows = 0;
  for (const auto& b : blocks) {
    if (b.cols() != cols) throw std::invalid_argument("stack_rows: column count mismatch");
    rows += b.rows();
  }
  ComplexMatrix out(rows, cols);
  Index r = 0;
  for (const auto& b : blocks) {
    out.middleRows(r, b.rows()) = b;
    r += b.rows();
  }
  return out;
}

OrthonormalBasis orthonormal_range_basis(const ComplexMatrix& m, double tol) {
  require_finite(m, "orthonormal_range_basis");
  if (!(tol > 0.0)) throw std::invalid_argument("orthonormal_range_basis: tol must be positive");
  if (m.size() == 0) throw std::invalid_argument("zero subspace");
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU);
  const Index r = rank_from_singular_values(svd.singularValues(), tol);
  if (r == 0) throw std::invalid_argument("zero subspace");
  return OrthonormalBasis::trusted(svd.matrixU().leftCols(r));
}

OrthonormalBasis row_space_basis(const ComplexMatrix& m, double tol) {
  return orthonormal_range_basis(m.adjoint(), tol);
}

OrthonormalBasis null_space_basis(const ComplexMatrix& m, Index ambient_dim, double tol) {
  if (m.rows() == 0) return OrthonormalBasis::identity(ambient_dim);
  if (m.cols() != ambient_dim) {
    throw std::invalid_argument("null_space_basis: matrix has " + std::to_string(m.cols()) +
                                " columns, expected " + std::to_string(ambient_dim));
  }
  require_finite(m, "null_space_basis");
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullV);
  const Index r = rank_from_singular_values(svd.singularValues(), tol);
  if (r >= ambient_dim) throw std::invalid_argument("empty null space");
  return OrthonormalBasis::trusted(svd.matrixV().rightCols(ambient_dim - r));
}

PrincipalAngleSet principal_angles(const OrthonormalBasis& u, const OrthonormalBasis& v) {
  require_same_ambient(u, v, "principal_angles");
  if (u.dim() == 0 || v.dim() == 0) throw std::invalid_argument("principal_angles: zero subspace");

  const bool u_smaller = u.dim() <= v.dim();
  const ComplexMatrix& small = u_smaller ? u.columns() : v.columns();
  const ComplexMatrix& large = u_smaller ? v.columns() : u.columns();
  const Index p = small.cols();

  // Cosines resolve large angles well, sines resolve small ones; use whichever
  // is better conditioned for each angle.
  const ComplexMatrix cross = large.adjoint() * small;
  const Eigen::VectorXd cosines = Eigen::JacobiSVD<ComplexMatrix>(cross).singularValues();
  const ComplexMatrix residual = small - large * cross;
  const Eigen::VectorXd sines = Eigen::JacobiSVD<ComplexMatrix>(residual).singularValues();

  PrincipalAngleSet out;
  out.p = u.dim();
  out.q = v.dim();
  out.angles.resize(static_cast<std::size_t>(p));
  for (Index i = 0; i < p; ++i) {
    const double c = std::clamp(cosines(i), 0.0, 1.0);
    const double s = std::clamp(sines(p - 1 - i), 0.0, 1.0);
    out.angles[static_cast<std::size_t>(i)] = (c * c > 0.5) ? std::asin(s) : std::acos(c);
  }
  std::sort(out.angles.begin(), out.angles.end());
  return out;
}

double geometrical_angle_cos2(const ComplexMatrix& hk, const ComplexMatrix& hj) {
  return principal_angles(row_space_basis(hk), row_space_basis(hj)).cos2_product();
}

double geometrical_angle_sin2(const ComplexMatrix& hk, const ComplexMatrix& hj) {
  return principal_angles(row_space_basis(hk), row_space_basis(hj)).sin2_product();
}

double geometrical_angle_cos2_determinant(const ComplexMatrix& hk, const ComplexMatrix& hj,
                                          bool orthonormalize) {
  if (hk.cols() != hj.cols()) {
    throw std::invalid_argument("geometrical_angle_cos2_determinant: column count mismatch");
  }
  const bool swap = numerical_rank(hk) > numerical_rank(hj);
  const ComplexMatrix& small = swap ? hj : hk;
  const ComplexMatrix& large = swap ? hk : hj;
  const ComplexMatrix large_rows =
      orthonormalize ? ComplexMatrix(row_space_basis(large).columns().adjoint()) : large;
  const ComplexMatrix cross = small * large_rows.adjoint();
  const Complex num = (cross * cross.adjoint()).determinant();
  const Complex den = (small * small.adjoint()).determinant();
  if (std::abs(den) == 0.0) {
    throw std::invalid_argument("geometrical_angle_cos2_determinant: rank-deficient operand");
  }
  return num.real() / den.real();
}

double chordal_distance(const OrthonormalBasis& u, const OrthonormalBasis& v) {
  require_same_ambient(u, v, "chordal_distance");
  return std::sqrt(principal_angles(u, v).sin2_sum());
}

double chordal_distance_projection(const OrthonormalBasis& u, const OrthonormalBasis& v) {
  require_same_ambient(u, v, "chordal_distance_projection");
  return (u.projector() - v.projector()).norm() / std::numbers::sqrt2;
}

double collinearity(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("collinearity: shape mismatch");
  }
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("collinearity: zero matrix");
  const Complex tr = (a.array() * b.array().conjugate()).sum();
  return std::min(1.0, std::abs(tr) / (na * nb));
}

double subspace_collinearity(const ComplexMatrix& hk, const ComplexMatrix& hj) {
  return collinearity(row_space_basis(hk).projector(), row_space_basis(hj).projector());
}

ComplexMatrix subspace_intersection_projector(const OrthonormalBasis& a, const OrthonormalBasis& b,
                                              int kappa) {
  require_same_ambient(a, b, "subspace_intersection_projector");
  if (kappa < 1) throw std::invalid_argument("subspace_intersection_projector: kappa must be >= 1");
  const ComplexMatrix pa = a.projector();
  ComplexMatrix step = pa * b.projector() * pa;
  step = 0.5 * (step + step.adjoint());
  ComplexMatrix out = ComplexMatrix::Identity(pa.rows(), pa.cols());
  ComplexMatrix base = step;
  for (int e = kappa; e > 0; e >>= 1) {
    if (e & 1) out = out * base;
    if (e > 1) base = base * base;
  }
  return 0.5 * (out + out.adjoint());
}

}  // namespace hetsched
