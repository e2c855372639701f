#include "pmw/numkernel.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

namespace pmw {

bool approx_equal(double a, double b, double rel, double floor) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) <= std::max(rel * scale, floor);
}

bool approx_equal(const Matrix& a, const Matrix& b, double rel, double floor) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (!approx_equal(a(i, j), b(i, j), rel, floor)) return false;
  return true;
}

void require_valid(const Matrix& a, const char* what) {
  if (a.rows() < 1 || a.cols() < 1)
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + " is empty");
  if (!a.allFinite())
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " has non-finite entries");
}

WeightingMatrix::WeightingMatrix(Matrix w) : w_(std::move(w)) {
  require_valid(w_, "weighting matrix");
  if (w_.rows() != w_.cols())
    throw Error(ErrorCode::DimensionMismatch, "weighting matrix must be square");
  const double scale = std::max(w_.cwiseAbs().maxCoeff(), kAbsFloor);
  if ((w_ - w_.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw Error(ErrorCode::NotPositiveDefinite, "weighting matrix is not symmetric");
  llt_.compute(w_);
  if (llt_.info() != Eigen::Success)
    throw Error(ErrorCode::NotPositiveDefinite, "Cholesky factorization failed");
}

namespace {


// Factor the n x n Gram matrix of a full-row-rank map.
Eigen::LLT<Matrix> factor_gram(const Matrix& gram) {
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success || llt.rcond() < kMinReciprocalCondition)
    throw Error(ErrorCode::RankDeficient, "map is not of full row rank");
  return llt;
}

void require_wide(const Matrix& a) {
  require_valid(a, "matrix");
  if (a.rows() > a.cols())
    throw Error(ErrorCode::RankDeficient, "more rows than columns; no full row rank");
}

}  // namespace

Matrix mp_pinv(const Matrix& a) {
  require_wide(a);
  const auto llt = factor_gram(a * a.transpose());
  // A^T (A A^T)^{-1} = (llt^{-1} A)^T by symmetry of the Gram matrix.
  return llt.solve(a).transpose();
}

Matrix weighted_pinv(const Matrix& a, const WeightingMatrix& w) {
  require_wide(a);
  if (w.size() != a.cols())
    throw Error(ErrorCode::DimensionMismatch, "weight size must equal column count");
  const Matrix winv_at = w.solve(a.transpose());
  const auto llt = factor_gram(a * winv_at);
  return winv_at * llt.solve(Matrix::Identity(a.rows(), a.rows()));
}

Matrix pinv_with_inverse_weight(const Matrix& a, const Matrix& w_inverse) {
  require_wide(a);
  require_valid(w_inverse, "inverse weight");
  if (w_inverse.rows() != a.cols() || w_inverse.cols() != a.cols())
    throw Error(ErrorCode::DimensionMismatch, "inverse weight size must equal column count");
  const Matrix winv_at = w_inverse * a.transpose();
  const auto llt = factor_gram(a * winv_at);
  return winv_at * llt.solve(Matrix::Identity(a.rows(), a.rows()));
}

Matrix nullspace_projector(const Matrix& a, const Matrix& inverse) {
  require_valid(a, "matrix");
  require_valid(inverse, "generalized inverse");
  if (inverse.rows() != a.cols() || inverse.cols() != a.rows())
    throw Error(ErrorCode::DimensionMismatch, "inverse must be cols(A) x rows(A)");
  return Matrix::Identity(a.cols(), a.cols()) - inverse * a;
}

Vector solve_linear(const Matrix& a, const Vector& b) {
  require_valid(a, "system matrix");
  if (a.rows() != a.cols() || b.size() != a.rows())
    throw Error(ErrorCode::DimensionMismatch, "solve_linear needs a square system");
  Eigen::PartialPivLU<Matrix> lu(a);
  if (!(lu.rcond() >= kMinReciprocalCondition))
    throw Error(ErrorCode::Singular, "system matrix is singular");
  return lu.solve(b);
}

int numerical_rank(const Matrix& a, double tol) {
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& s = svd.singularValues();
  return static_cast<int>((s.array() > tol).count());
}

double condition_number(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(s.size() - 1) <= 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / s(s.size() - 1);
}

Mat3 skew(const Vec3& r) {
  Mat3 s;
  s << 0.0, -r.z(), r.y(),
       r.z(), 0.0, -r.x(),
       -r.y(), r.x(), 0.0;
  return s;
}

}  // namespace pmw
