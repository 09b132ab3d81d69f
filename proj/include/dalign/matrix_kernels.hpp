#pragma once

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <string>

#include "dalign/basis.hpp"
#include "dalign/errors.hpp"
#include "dalign/norms.hpp"
#include "dalign/types.hpp"

namespace dalign {

/// How svd() decides the numerical rank: the rank is the number of singular
/// values strictly greater than the tolerance.
///   standard : max(m, n) * sigma_1 * u  (u = unit roundoff of the scalar type)
///   absolute : the given value
///   relative : value * sigma_1
struct RankPolicy {
  enum class Rule { standard, absolute, relative };

  Rule rule = Rule::standard;
  double value = 0.0;

  static RankPolicy standard() { return {}; }
  static RankPolicy absolute(double tol) { return {Rule::absolute, tol}; }
  static RankPolicy relative(double eps) { return {Rule::relative, eps}; }
};

template <typename Scalar>
struct SvdFactors {
  Matrix<Scalar> u;      // m x m
  Vector<Scalar> sigma;  // min(m, n), nonincreasing
  Matrix<Scalar> v;      // n x n
  Index numerical_rank = 0;
  Scalar rank_tolerance = Scalar(0);

  Index rows() const noexcept { return u.rows(); }
  Index cols() const noexcept { return v.rows(); }

  /// Smallest singular value counted in the rank, or 0 when the rank is 0.
  Scalar sigma_r() const { return numerical_rank > 0 ? sigma(numerical_rank - 1) : Scalar(0); }
};

template <typename Scalar>
Scalar unit_roundoff() {
  return std::numeric_limits<Scalar>::epsilon() / Scalar(2);
}

template <typename Scalar>
Scalar rank_tolerance(const Vector<Scalar>& sigma, Index rows, Index cols, const RankPolicy& policy) {
  const Scalar sigma_1 = sigma.size() > 0 ? sigma(0) : Scalar(0);
  switch (policy.rule) {
    case RankPolicy::Rule::standard:
      return Scalar(std::max(rows, cols)) * sigma_1 * unit_roundoff<Scalar>();
    case RankPolicy::Rule::absolute:
      return Scalar(policy.value);
    case RankPolicy::Rule::relative:
      return Scalar(policy.value) * sigma_1;
  }
  return Scalar(0);
}

template <typename Scalar>
Index count_above(const Vector<Scalar>& sigma, Scalar tolerance) {
  Index r = 0;
  while (r < sigma.size() && sigma(r) > tolerance) ++r;
  return r;
}

namespace detail {

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& b, const char* what) {
  if (b.rows() < 1 || b.cols() < 1) throw Error(ErrorCode::invalid_input, std::string(what) + " is empty");
  if (!b.allFinite()) throw Error(ErrorCode::invalid_input, std::string(what) + " has non-finite entries");
}

}  // namespace detail

/// Full SVD B = U diag(sigma) V^T together with the numerical rank under
/// `policy`. No sign convention is imposed on the singular vectors.
template <typename Derived>
SvdFactors<typename Derived::Scalar> svd(const Eigen::MatrixBase<Derived>& b, const RankPolicy& policy = {}) {
  using Scalar = typename Derived::Scalar;
  detail::require_finite(b, "matrix");
  Eigen::JacobiSVD<Matrix<Scalar>> solver(b.derived(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::numerical_failure, "SVD did not converge");

  SvdFactors<Scalar> f{solver.matrixU(), solver.singularValues(), solver.matrixV(), 0, Scalar(0)};
  f.rank_tolerance = rank_tolerance(f.sigma, b.rows(), b.cols(), policy);
  f.numerical_rank = count_above(f.sigma, f.rank_tolerance);
  return f;
}

template <typename Derived>
Vector<typename Derived::Scalar> singular_values(const Eigen::MatrixBase<Derived>& b) {
  using Scalar = typename Derived::Scalar;
  if (b.rows() == 0 || b.cols() == 0) return Vector<Scalar>();
  return Eigen::JacobiSVD<Matrix<Scalar>>(b.derived()).singularValues();
}

template <typename Derived>
Index numerical_rank(const Eigen::MatrixBase<Derived>& b, const RankPolicy& policy = {}) {
  using Scalar = typename Derived::Scalar;
  const Vector<Scalar> s = singular_values(b);
  return count_above(s, rank_tolerance(s, b.rows(), b.cols(), policy));
}

template <typename Derived>
typename Derived::Scalar matrix_norm(const Eigen::MatrixBase<Derived>& b, NormKind kind) {
  if (kind == NormKind::frobenius) return b.norm();
  return norm_of_singular_values(singular_values(b), kind);
}

/// ||B_bestr|| : the norm of B's best rank-r approximation.
template <typename Derived>
typename Derived::Scalar truncated_norm(const Eigen::MatrixBase<Derived>& b, Index r, NormKind kind) {
  if (r < 1) throw Error(ErrorCode::invalid_input, "truncation rank must be at least 1");
  detail::require_finite(b, "matrix");
  return truncated_norm_of_singular_values(singular_values(b), r, kind);
}

/// X_perp such that [X, X_perp] is orthogonal, from the full Householder
/// factorization of X.
template <typename Scalar>
Matrix<Scalar> orthonormal_completion(const OrthonormalBasis<Scalar>& x) {
  const Index n = x.ambient_dim();
  const Index k = x.dim();
  if (n == k) throw Error(ErrorCode::empty_complement, "basis already spans the whole space");
  Eigen::HouseholderQR<Matrix<Scalar>> qr(x.matrix());
  Matrix<Scalar> q = qr.householderQ();
  return q.rightCols(n - k);
}

namespace detail {

inline bool is_prime(Index p) {
  if (p < 2) return false;
  for (Index d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

// Paley construction I for a prime q = 3 (mod 4): H = I + [0 1^T; -1 J],
// J the Jacobsthal matrix J(i, j) = chi(j - i).
inline Matrix<int> paley_hadamard(Index q) {
  auto chi = [q](Index a) {
    a = ((a % q) + q) % q;
    if (a == 0) return 0;
    for (Index x = 1; x < q; ++x)
      if ((x * x) % q == a) return 1;
    return -1;
  };
  const Index n = q + 1;
  Matrix<int> h = Matrix<int>::Identity(n, n);
  for (Index j = 1; j < n; ++j) {
    h(0, j) += 1;
    h(j, 0) -= 1;
  }
  for (Index i = 1; i < n; ++i)
    for (Index j = 1; j < n; ++j) h(i, j) += chi(j - i);
  return h;
}

inline Matrix<int> hadamard_int(Index n) {
  if (n == 1) return Matrix<int>::Constant(1, 1, 1);
  if (n == 12 || n == 20) return paley_hadamard(n - 1);
  if (n % 2 == 0 && n >= 2) {
    const Matrix<int> half = hadamard_int(n / 2);
    const Index m = half.rows();
    Matrix<int> h(n, n);
    h.topLeftCorner(m, m) = half;
    h.topRightCorner(m, m) = half;
    h.bottomLeftCorner(m, m) = half;
    h.bottomRightCorner(m, m) = -half;
    return h;
  }
  throw Error(ErrorCode::unsupported_order, "no Hadamard construction for order " + std::to_string(n));
}

}  // namespace detail

/// True for the orders hadamard() can build: 2^a, 12 * 2^a and 20 * 2^a.
inline bool hadamard_order_supported(Index n) {
  if (n < 1) return false;
  while (n % 2 == 0 && n != 12 && n != 20) n /= 2;
  return n == 1 || n == 12 || n == 20;
}

/// Hadamard matrix of order n (entries +-1, H^T H = n I) by Sylvester
/// doubling from the seeds 1, 2, 12 and 20; the order-12 and order-20 seeds
/// come from the Paley construction.
template <typename Scalar = double>
Matrix<Scalar> hadamard(Index n) {
  if (!hadamard_order_supported(n))
    throw Error(ErrorCode::unsupported_order, "no Hadamard construction for order " + std::to_string(n));
  return detail::hadamard_int(n).cast<Scalar>();
}

}  // namespace dalign
