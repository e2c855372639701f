#pragma once
// Dense linear-algebra kernel: generalized inverses, weighted least-norm
// solvers and null-space projectors. Everything here is at most a few
// dozen rows, so normal equations are formed explicitly.

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Geometry>

#include "pmw/error.hpp"

namespace pmw {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Reciprocal-condition threshold below which a factorization is rejected.
inline constexpr double kMinReciprocalCondition = 1e-12;
/// Absolute floor used by every relative comparison.
inline constexpr double kAbsFloor = 1e-12;

/// |a - b| <= max(rel * max(|a|, |b|), floor)
bool approx_equal(double a, double b, double rel, double floor = kAbsFloor);
/// Entrywise approx_equal; false on shape mismatch.
bool approx_equal(const Matrix& a, const Matrix& b, double rel, double floor = kAbsFloor);

/// Throws DimensionMismatch / InvalidArgument for empty or non-finite input.
void require_valid(const Matrix& a, const char* what);

/// Symmetric positive-definite weight, validated once on construction.
class WeightingMatrix {
 public:
  explicit WeightingMatrix(Matrix w);

  const Matrix& matrix() const noexcept { return w_; }
  Eigen::Index size() const noexcept { return w_.rows(); }
  /// W^{-1} x via the stored Cholesky factor.
  Matrix solve(const Matrix& x) const { return llt_.solve(x); }

 private:
  Matrix w_;
  Eigen::LLT<Matrix> llt_;
};

/// A^T (A A^T)^{-1} for a full-row-rank A.
Matrix mp_pinv(const Matrix& a);

/// W^{-1} A^T (A W^{-1} A^T)^{-1}; x = result * h minimizes x^T W x s.t. A x = h.
Matrix weighted_pinv(const Matrix& a, const WeightingMatrix& w);

/// W^{-1} A^T (A W^{-1} A^T)^{-1} given W^{-1} directly. W^{-1} may be
/// semidefinite as long as the Gram matrix is invertible.
Matrix pinv_with_inverse_weight(const Matrix& a, const Matrix& w_inverse);

/// I - inverse * A.
Matrix nullspace_projector(const Matrix& a, const Matrix& inverse);

/// Square solve with partial-pivot LU; Singular when badly conditioned.
Vector solve_linear(const Matrix& a, const Vector& b);

/// Singular values strictly above tol.
int numerical_rank(const Matrix& a, double tol = 1e-9);

/// sigma_max / sigma_min, infinite for rank-deficient input.
double condition_number(const Matrix& a);

/// Cross-product matrix: skew(r) * a == r.cross(a).
Mat3 skew(const Vec3& r);

/// Planar 90-degree rotation E = [0 -1; 1 0].
inline Eigen::Matrix2d rot90() {
  Eigen::Matrix2d e;
  e << 0.0, -1.0, 1.0, 0.0;
  return e;
}

/// E * r.
inline Vec2 perp(const Vec2& r) { return {-r.y(), r.x()}; }

}  // namespace pmw
