#pragma once

#include <array>
#include <cmath>

#include "dalign/basis.hpp"
#include "dalign/matrix_kernels.hpp"
#include "dalign/norms.hpp"

namespace dalign {

/// Canonical angles between two k-dimensional subspaces.
///
/// `cosines` holds the singular values of X^T Y in nonincreasing order.
/// `sines` holds sin(theta_i) with theta_1 >= ... >= theta_k, i.e. also in
/// nonincreasing order, paired as sines(i)^2 + cosines(k-1-i)^2 = 1.
template <typename Scalar>
struct AngleSpectrum {
  Vector<Scalar> cosines;
  Vector<Scalar> sines;

  Index size() const noexcept { return sines.size(); }

  /// theta_i; only for display, distances never go through arccos.
  Vector<Scalar> angles() const {
    using std::atan2;
    const Index k = size();
    Vector<Scalar> theta(k);
    for (Index i = 0; i < k; ++i) theta(i) = atan2(sines(i), cosines(k - 1 - i));
    return theta;
  }
};

namespace detail {

template <typename Scalar>
void require_same_shape(const OrthonormalBasis<Scalar>& x, const OrthonormalBasis<Scalar>& y) {
  if (x.ambient_dim() != y.ambient_dim() || x.dim() != y.dim())
    throw Error(ErrorCode::dimension_mismatch, "bases must have identical n x k shape");
}

template <typename Scalar>
Vector<Scalar> clamp_unit(Vector<Scalar> v) {
  for (Index i = 0; i < v.size(); ++i) v(i) = std::min(std::max(v(i), Scalar(0)), Scalar(1));
  return v;
}

}  // namespace detail

/// Cosines from X^T Y and sines from X_perp^T Y. Computing the sines from the
/// complement keeps them accurate to high relative precision for tiny angles,
/// where sqrt(1 - cos^2) would lose everything.
template <typename Scalar>
AngleSpectrum<Scalar> canonical_angles(const OrthonormalBasis<Scalar>& x, const OrthonormalBasis<Scalar>& y) {
  detail::require_same_shape(x, y);
  const Index n = x.ambient_dim();
  const Index k = x.dim();

  AngleSpectrum<Scalar> spectrum;
  spectrum.cosines = detail::clamp_unit<Scalar>(singular_values((x.matrix().transpose() * y.matrix()).eval()));
  spectrum.sines = Vector<Scalar>::Zero(k);
  if (n > k) {
    const Matrix<Scalar> complement = orthonormal_completion(x);
    const Vector<Scalar> s = singular_values((complement.transpose() * y.matrix()).eval());
    spectrum.sines.head(s.size()) = detail::clamp_unit<Scalar>(s);
  }
  return spectrum;
}

template <typename Scalar>
Scalar sin_theta_norm(const AngleSpectrum<Scalar>& angles, NormKind kind) {
  return norm_of_singular_values(angles.sines, kind);
}

/// Norm of the r largest sines, i.e. of [sin Theta]_bestr.
template <typename Scalar>
Scalar truncated_sin_theta_norm(const AngleSpectrum<Scalar>& angles, Index r, NormKind kind) {
  return truncated_norm_of_singular_values(angles.sines, r, kind);
}

template <typename Scalar>
struct RotationAlignment {
  Matrix<Scalar> q;                  // k x k orthogonal
  std::array<Scalar, 3> residuals;  // ||X - Y Q|| indexed by norm_index()

  Scalar residual(NormKind kind) const { return residuals[norm_index(kind)]; }
};

/// Orthogonal polar factor U V^T of a square matrix (any completion when the
/// matrix is singular).
template <typename Derived>
Matrix<typename Derived::Scalar> orthogonal_polar_factor(const Eigen::MatrixBase<Derived>& b) {
  using Scalar = typename Derived::Scalar;
  if (b.rows() != b.cols()) throw Error(ErrorCode::shape_error, "orthogonal polar factor needs a square matrix");
  if (b.rows() == 0) return Matrix<Scalar>(0, 0);
  Eigen::JacobiSVD<Matrix<Scalar>> solver(b.derived(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  return solver.matrixU() * solver.matrixV().transpose();
}

/// Q minimizing ||X - Y Q|| over orthogonal Q: the orthogonal polar factor of
/// Y^T X. The singular values of X - Y Q are then 2 sin(theta_i / 2), which
/// sit between sin(theta_i) and sqrt(2) sin(theta_i).
template <typename Scalar>
RotationAlignment<Scalar> align_rotation(const OrthonormalBasis<Scalar>& x, const OrthonormalBasis<Scalar>& y) {
  detail::require_same_shape(x, y);
  RotationAlignment<Scalar> out;
  out.q = orthogonal_polar_factor((y.matrix().transpose() * x.matrix()).eval());
  const Matrix<Scalar> diff = x.matrix() - y.matrix() * out.q;
  for (NormKind kind : kAllNormKinds) out.residuals[norm_index(kind)] = matrix_norm(diff, kind);
  return out;
}

}  // namespace dalign
