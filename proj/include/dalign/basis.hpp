#pragma once

#include <string>

#include "dalign/errors.hpp"
#include "dalign/types.hpp"

namespace dalign {

/// n x k matrix with orthonormal columns, standing for the subspace it spans.
/// Construction checks ||X^T X - I_k||_F <= tolerance.
template <typename Scalar>
class OrthonormalBasis {
 public:
  static Scalar default_tolerance(Index n) { return Scalar(1e-12) * Scalar(n); }

  explicit OrthonormalBasis(Matrix<Scalar> matrix) : OrthonormalBasis(matrix, default_tolerance(matrix.rows())) {}

  OrthonormalBasis(Matrix<Scalar> matrix, Scalar tolerance) : matrix_(std::move(matrix)), tolerance_(tolerance) {
    const Index n = matrix_.rows();
    const Index k = matrix_.cols();
    if (n < 1 || k < 1) throw Error(ErrorCode::invalid_basis, "basis must be nonempty");
    if (k > n) throw Error(ErrorCode::invalid_basis, "basis has more columns than rows");
    if (!matrix_.allFinite()) throw Error(ErrorCode::invalid_basis, "basis has non-finite entries");
    const Scalar defect = orthonormality_defect(matrix_);
    if (!(defect <= tolerance_)) {
      throw Error(ErrorCode::invalid_basis, "columns not orthonormal (||X^T X - I||_F = " +
                                                std::to_string(static_cast<double>(defect)) + ")");
    }
  }

  /// Orthonormal basis of the column space of a full-column-rank matrix.
  template <typename Derived>
  static OrthonormalBasis orthonormalize(const Eigen::MatrixBase<Derived>& a) {
    const Index n = a.rows();
    const Index k = a.cols();
    Eigen::HouseholderQR<Matrix<Scalar>> qr(a.derived().template cast<Scalar>());
    return OrthonormalBasis(qr.householderQ() * Matrix<Scalar>::Identity(n, k));
  }

  template <typename Derived>
  static Scalar orthonormality_defect(const Eigen::MatrixBase<Derived>& x) {
    return (x.transpose() * x - Matrix<Scalar>::Identity(x.cols(), x.cols())).norm();
  }

  const Matrix<Scalar>& matrix() const noexcept { return matrix_; }
  Index ambient_dim() const noexcept { return matrix_.rows(); }
  Index dim() const noexcept { return matrix_.cols(); }
  Scalar tolerance() const noexcept { return tolerance_; }

 private:
  Matrix<Scalar> matrix_;
  Scalar tolerance_;
};

}  // namespace dalign
