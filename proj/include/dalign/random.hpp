#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "dalign/types.hpp"

namespace dalign {

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seedable generator: std::mt19937_64 (whose output sequence is fixed by the
/// standard) with uniform and normal variates computed here rather than via
/// the <random> distributions, whose algorithms differ between standard
/// libraries.
///
/// Streams: Rng::stream(seed, a, b) seeds the engine with
/// splitmix64(splitmix64(seed ^ splitmix64(a)) ^ splitmix64(b + 1)), so each
/// (seed, a, b) triple gets its own sequence regardless of evaluation order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    return Rng(splitmix64(splitmix64(seed ^ splitmix64(a)) ^ splitmix64(b + 1)));
  }

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi].
  Index uniform_index(Index lo, Index hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<Index>(engine_() % span);
  }

  /// Standard normal via the Box-Muller transform.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

inline MatrixXd gaussian_matrix(Rng& rng, Index rows, Index cols) {
  MatrixXd g(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) g(i, j) = rng.gaussian();
  return g;
}

/// Orthonormalize the columns of a full-column-rank matrix by Householder QR,
/// flipping column signs so that diag(R) is nonnegative. Applied to a Gaussian
/// matrix this samples the Haar measure.
template <typename Derived>
Matrix<typename Derived::Scalar> sign_fixed_qr_factor(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  const Index n = a.rows();
  const Index k = a.cols();
  Eigen::HouseholderQR<Matrix<Scalar>> qr(a.derived());
  Matrix<Scalar> q = qr.householderQ() * Matrix<Scalar>::Identity(n, k);
  const Matrix<Scalar>& r = qr.matrixQR();
  for (Index j = 0; j < k; ++j) {
    if (r(j, j) < Scalar(0)) q.col(j) = -q.col(j);
  }
  return q;
}

/// Haar-distributed n x n orthogonal matrix.
template <typename Scalar = double>
Matrix<Scalar> haar_orthogonal(Rng& rng, Index n) {
  return sign_fixed_qr_factor(gaussian_matrix(rng, n, n).template cast<Scalar>().eval());
}

/// Haar-distributed point on the Stiefel manifold of n x k orthonormal frames.
template <typename Scalar = double>
Matrix<Scalar> random_orthonormal(Rng& rng, Index n, Index k) {
  return sign_fixed_qr_factor(gaussian_matrix(rng, n, k).template cast<Scalar>().eval());
}

}  // namespace dalign
