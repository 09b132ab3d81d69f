#pragma once

// Random instance generators shared by the unit and acceptance suites.

#include <cmath>

#include "dalign/basis.hpp"
#include "dalign/polar_align.hpp"
#include "dalign/random.hpp"

namespace dalign::testing {

inline MatrixXd uniform_matrix(Rng& rng, Index rows, Index cols, double lo = -1.0, double hi = 1.0) {
  MatrixXd m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.uniform(lo, hi);
  return m;
}

inline OrthonormalBasis<double> random_basis(Rng& rng, Index n, Index k) {
  return OrthonormalBasis<double>(random_orthonormal(rng, n, k));
}

/// Random rank-r matrix G1 G2^T (rows x cols).
inline MatrixXd random_rank_matrix(Rng& rng, Index rows, Index cols, Index r) {
  return gaussian_matrix(rng, rows, r) * gaussian_matrix(rng, cols, r).transpose();
}

/// A basis of a subspace near R(x): orthonormalize X + delta * G, then rotate
/// by a random orthogonal Q so the returned basis is arbitrary within its
/// subspace.
inline OrthonormalBasis<double> perturbed_basis(Rng& rng, const OrthonormalBasis<double>& x, double delta) {
  const Index n = x.ambient_dim();
  const Index k = x.dim();
  const MatrixXd moved = x.matrix() + delta * gaussian_matrix(rng, n, k);
  return OrthonormalBasis<double>(sign_fixed_qr_factor(moved) * haar_orthogonal(rng, k));
}

/// log-uniform in [lo, hi].
inline double log_uniform(Rng& rng, double lo, double hi) {
  return std::exp(rng.uniform(std::log(lo), std::log(hi)));
}

struct AlignedInstance {
  OrthonormalBasis<double> x;
  OrthonormalBasis<double> x_tilde;
  MatrixXd d;
  Index r;
  double delta;
};

/// Aligned X, X~ for a rank-r D (n x k). Redraws until the numerical ranks
/// of X^T D and X~^T D (formed from the aligned bases) both equal r. A redraw
/// happens when a trailing roundoff-level singular value of a rank-deficient
/// product lands above the tolerance; `redraws` counts them.
inline AlignedInstance random_aligned_instance(Rng& rng, Index n, Index k, Index r, double delta,
                                               Index* redraws = nullptr) {
  for (;;) {
    const MatrixXd d = r == k ? gaussian_matrix(rng, n, k) : random_rank_matrix(rng, n, k, r);
    const OrthonormalBasis<double> x_any = random_basis(rng, n, k);
    const OrthonormalBasis<double> xt_any = perturbed_basis(rng, x_any, delta);
    AlignResult<double> a = align(x_any, d);
    AlignResult<double> b = align(xt_any, d);
    if (numerical_rank((a.x.matrix().transpose() * d).eval()) == r &&
        numerical_rank((b.x.matrix().transpose() * d).eval()) == r)
      return {std::move(a.x), std::move(b.x), d, r, delta};
    if (redraws) ++*redraws;
  }
}

}  // namespace dalign::testing

#include <optional>

#include "dalign/errors.hpp"

namespace dalign::testing {

/// Code of the dalign::Error thrown by f, or nullopt if f returns normally.
template <typename F>
std::optional<ErrorCode> error_code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace dalign::testing

#define CHECK_ERROR(expr, expected_code) \
  CHECK(::dalign::testing::error_code_of([&] { (void)(expr); }) == std::optional<::dalign::ErrorCode>(expected_code))
