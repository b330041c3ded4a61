#pragma once

// Subspace geometry on C^n: orthonormal bases, principal angles and the
// distance/similarity measures derived from them. Channel matrices are
// compared through their row spaces (the transmit-side subspaces).

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <vector>

namespace hetsched {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using Index = Eigen::Index;

/// Relative singular-value threshold used to decide numerical rank.
inline constexpr double kDefaultRankTol = 1e-10;

/// Tolerance on U^H U = I accepted by OrthonormalBasis.
inline constexpr double kOrthonormalTol = 1e-10;

class OrthonormalBasis {
 public:
  /// Validates that the columns are orthonormal; throws std::invalid_argument otherwise.
  explicit OrthonormalBasis(ComplexMatrix columns);

  static OrthonormalBasis identity(Index ambient_dim);
  /// Skips the orthonormality check. Only for columns produced by a unitary factorization.
  static OrthonormalBasis trusted(ComplexMatrix columns);

  Index ambient_dim() const { return columns_.rows(); }
  Index dim() const { return columns_.cols(); }
  const ComplexMatrix& columns() const { return columns_; }
  ComplexMatrix projector() const { return columns_ * columns_.adjoint(); }

 private:
  struct TrustedTag {};
  OrthonormalBasis(ComplexMatrix columns, TrustedTag) : columns_(std::move(columns)) {}

  ComplexMatrix columns_;
};

/// Principal angles in radians, ascending, between a p-dim and a q-dim subspace.
struct PrincipalAngleSet {
  std::vector<double> angles;
  Index p = 0;
  Index q = 0;

  double smallest() const { return angles.front(); }
  double largest() const { return angles.back(); }
  double cos2_sum() const;
  double sin2_sum() const;
  double cos2_product() const;
  double sin2_product() const;
  /// Sum of log2(sin^2) over the angles; -inf when an angle is zero.
  double log2_sin2_product() const;
};

Index numerical_rank(const ComplexMatrix& m, double tol = kDefaultRankTol);

/// Stacks blocks vertically. All blocks must share the column count `cols`.
ComplexMatrix stack_rows(std::span<const ComplexMatrix> blocks, Index cols);

OrthonormalBasis orthonormal_range_basis(const ComplexMatrix& m, double tol = kDefaultRankTol);
/// Range of m^H, i.e. the span of the conjugated rows of m.
OrthonormalBasis row_space_basis(const ComplexMatrix& m, double tol = kDefaultRankTol);
/// {x : m x = 0}. A matrix with no rows constrains nothing and yields the identity basis.
OrthonormalBasis null_space_basis(const ComplexMatrix& m, Index ambient_dim,
                                  double tol = kDefaultRankTol);

PrincipalAngleSet principal_angles(const OrthonormalBasis& u, const OrthonormalBasis& v);

/// cos^2 of the geometrical angle between the row spaces of hk and hj:
/// the product of cos^2 over all principal angles.
double geometrical_angle_cos2(const ComplexMatrix& hk, const ComplexMatrix& hj);
double geometrical_angle_sin2(const ComplexMatrix& hk, const ComplexMatrix& hj);

/// Determinant form det(M M^H) / det(H_k H_k^H) with M = H_k H_j^H, where H_k is
/// the lower-rank operand. With `orthonormalize` the larger operand is first
/// replaced by an orthonormal basis of its row space, which makes the value
/// equal to geometrical_angle_cos2. The raw form mixes in the singular values of
/// the larger operand and is exposed for comparison only.
double geometrical_angle_cos2_determinant(const ComplexMatrix& hk, const ComplexMatrix& hj,
                                          bool orthonormalize = true);

double chordal_distance(const OrthonormalBasis& u, const OrthonormalBasis& v);
/// (1/sqrt 2) ||P_U - P_V||_F; equals chordal_distance when dim U == dim V.
double chordal_distance_projection(const OrthonormalBasis& u, const OrthonormalBasis& v);

/// |tr(A B^H)| / (||A||_F ||B||_F) for equally shaped matrices.
double collinearity(const ComplexMatrix& a, const ComplexMatrix& b);
/// Collinearity of the row-space projectors of hk and hj (any row counts).
double subspace_collinearity(const ComplexMatrix& hk, const ComplexMatrix& hj);

/// (P_A P_B P_A)^kappa, the alternating-projection estimate of the projector
/// onto A ∩ B.
ComplexMatrix subspace_intersection_projector(const OrthonormalBasis& a, const OrthonormalBasis& b,
                                              int kappa);

}  // namespace hetsched
