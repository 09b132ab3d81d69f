#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "dalign/basis.hpp"
#include "dalign/matrix_kernels.hpp"
#include "dalign/random.hpp"
#include "dalign/subspace_metrics.hpp"

namespace dalign {

/// Canonical polar decomposition B = Q H with Q = U_1 V_1^T the partial
/// isometry on the rank-r part and H = (B^T B)^{1/2}.
template <typename Scalar>
struct CanonicalPolar {
  Matrix<Scalar> q;  // n x m
  Matrix<Scalar> h;  // m x m, symmetric positive semidefinite
  Index rank = 0;
};

template <typename Derived>
CanonicalPolar<typename Derived::Scalar> polar(const Eigen::MatrixBase<Derived>& b, const RankPolicy& policy = {}) {
  using Scalar = typename Derived::Scalar;
  if (b.rows() < b.cols()) throw Error(ErrorCode::shape_error, "polar() needs n >= m; transpose the input");
  const SvdFactors<Scalar> f = svd(b, policy);
  const Index r = f.numerical_rank;
  const Index m = b.cols();
  CanonicalPolar<Scalar> out;
  out.rank = r;
  out.q = f.u.leftCols(r) * f.v.leftCols(r).transpose();
  out.h = f.v * f.sigma.head(m).asDiagonal() * f.v.transpose();
  return out;
}

/// All orthonormal bases Y of one subspace with Y^T D positive semidefinite:
///   Y(W) = base + freedom_left * W * freedom_right^T,  W orthogonal (k-r)x(k-r),
/// where base = X V_1 V_1^T depends on the subspace only.
template <typename Scalar>
struct AlignedBasisSet {
  Matrix<Scalar> base;           // n x k
  Matrix<Scalar> freedom_left;   // n x (k - r)
  Matrix<Scalar> freedom_right;  // k x (k - r)
  Index rank = 0;                // rank of X^T D
  Scalar sigma_r = Scalar(0);    // smallest positive singular value of X^T D (0 when r = 0)
  Scalar d_spectral_norm = Scalar(0);
  Scalar rank_tolerance = Scalar(0);

  Index ambient_dim() const noexcept { return base.rows(); }
  Index dim() const noexcept { return base.cols(); }
  Index freedom_dim() const noexcept { return dim() - rank; }
};

template <typename Scalar>
struct AlignResult {
  OrthonormalBasis<Scalar> x;
  AlignedBasisSet<Scalar> set;
};

/// Rotate a basis of a subspace so that X^T D is symmetric positive
/// semidefinite: X = X_any U V^T with U Sigma V^T the SVD of X_any^T D. The
/// returned set describes every such basis of the same subspace; X is its
/// member with W = I.
template <typename Scalar>
AlignResult<Scalar> align(const OrthonormalBasis<Scalar>& x_any, const Matrix<Scalar>& d,
                          const RankPolicy& policy = {}) {
  const Index n = x_any.ambient_dim();
  const Index k = x_any.dim();
  if (d.rows() != n || d.cols() != k)
    throw Error(ErrorCode::dimension_mismatch, "D must have the same n x k shape as the basis");
  detail::require_finite(d, "D");

  const Matrix<Scalar>& xa = x_any.matrix();
  const SvdFactors<Scalar> f = svd((xa.transpose() * d).eval(), policy);
  const Index r = f.numerical_rank;

  AlignedBasisSet<Scalar> set;
  set.rank = r;
  set.sigma_r = f.sigma_r();
  set.rank_tolerance = f.rank_tolerance;
  set.d_spectral_norm = singular_values(d)(0);
  set.base = xa * f.u.leftCols(r) * f.v.leftCols(r).transpose();
  set.freedom_left = xa * f.u.rightCols(k - r);
  set.freedom_right = f.v.rightCols(k - r);

  OrthonormalBasis<Scalar> x(xa * f.u * f.v.transpose(), x_any.tolerance());
  return {std::move(x), std::move(set)};
}

/// Y(W) = base + freedom_left W freedom_right^T.
template <typename Scalar>
OrthonormalBasis<Scalar> member(const AlignedBasisSet<Scalar>& set, const Matrix<Scalar>& w) {
  const Index p = set.freedom_dim();
  if (w.rows() != p || w.cols() != p)
    throw Error(ErrorCode::invalid_input, "W must be (k-r) x (k-r)");
  if (p == 0) return OrthonormalBasis<Scalar>(set.base);
  if (!w.allFinite() || (w.transpose() * w - Matrix<Scalar>::Identity(p, p)).norm() > Scalar(1e-10))
    throw Error(ErrorCode::invalid_input, "W must be orthogonal");
  return OrthonormalBasis<Scalar>(set.base + set.freedom_left * w * set.freedom_right.transpose());
}

template <typename Scalar>
struct OptimalRepresentative {
  OrthonormalBasis<Scalar> y_opt;
  Matrix<Scalar> w_opt;
};

/// The member of the set closest to x_tilde in the Frobenius norm. Splitting
/// ||X~ - Y(W)||_F^2 along [V_1, V_2] leaves a Procrustes problem in W whose
/// maximizer is the orthogonal polar factor of freedom_left^T X~ freedom_right.
template <typename Scalar>
OptimalRepresentative<Scalar> optimal_representative(const AlignedBasisSet<Scalar>& set,
                                                     const OrthonormalBasis<Scalar>& x_tilde) {
  if (x_tilde.ambient_dim() != set.ambient_dim() || x_tilde.dim() != set.dim())
    throw Error(ErrorCode::dimension_mismatch, "x_tilde shape does not match the set");
  const Matrix<Scalar> cross = set.freedom_left.transpose() * x_tilde.matrix() * set.freedom_right;
  Matrix<Scalar> w = orthogonal_polar_factor(cross);
  OrthonormalBasis<Scalar> y = member(set, w);
  return {std::move(y), std::move(w)};
}

/// X^T D symmetric PSD up to tolerance * ||D||_2 (asymmetry in Frobenius norm,
/// smallest eigenvalue of the symmetric part).
template <typename Scalar>
struct AlignmentCheck {
  Scalar asymmetry = Scalar(0);
  Scalar min_eigenvalue = Scalar(0);
  Scalar d_norm = Scalar(0);
  bool aligned = false;
};

template <typename Scalar>
AlignmentCheck<Scalar> check_alignment(const Matrix<Scalar>& x, const Matrix<Scalar>& d,
                                       Scalar tolerance = Scalar(1e-10)) {
  if (x.rows() != d.rows() || x.cols() != d.cols())
    throw Error(ErrorCode::dimension_mismatch, "x and D must have the same shape");
  const Matrix<Scalar> p = x.transpose() * d;
  const Matrix<Scalar> sym = (p + p.transpose()) / Scalar(2);
  AlignmentCheck<Scalar> c;
  c.d_norm = singular_values(d)(0);
  c.asymmetry = (p - p.transpose()).norm();
  c.min_eigenvalue = Eigen::SelfAdjointEigenSolver<Matrix<Scalar>>(sym, Eigen::EigenvaluesOnly).eigenvalues()(0);
  const Scalar bound = tolerance * std::max(c.d_norm, Scalar(1e-300));
  c.aligned = c.asymmetry <= bound && c.min_eigenvalue >= -bound;
  return c;
}

/// Distances ||X~ - Y(W)|| for many W at once. Every column involved lies in
/// span[X~, base, freedom_left] (dimension <= 2k), so the differences are
/// evaluated in an orthonormal basis of that span.
template <typename Scalar>
class MemberDistance {
 public:
  MemberDistance(const AlignedBasisSet<Scalar>& set, const Matrix<Scalar>& x_tilde) : set_(&set) {
    const Index n = set.ambient_dim();
    const Index k = set.dim();
    Matrix<Scalar> span(n, 2 * k + set.freedom_dim());
    span << x_tilde, set.base, set.freedom_left;
    const Index c = std::min<Index>(n, span.cols());
    Eigen::HouseholderQR<Matrix<Scalar>> qr(span);
    const Matrix<Scalar> q = qr.householderQ() * Matrix<Scalar>::Identity(n, c);
    x_tilde_ = q.transpose() * x_tilde;
    base_ = q.transpose() * set.base;
    left_ = q.transpose() * set.freedom_left;
  }

  Scalar operator()(const Matrix<Scalar>& w, NormKind kind) const {
    Matrix<Scalar> diff = x_tilde_ - base_;
    if (set_->freedom_dim() > 0) diff.noalias() -= left_ * w * set_->freedom_right.transpose();
    return matrix_norm(diff, kind);
  }

 private:
  const AlignedBasisSet<Scalar>* set_;
  Matrix<Scalar> x_tilde_;
  Matrix<Scalar> base_;
  Matrix<Scalar> left_;
};

template <typename Scalar>
struct HausdorffEstimate {
  Scalar value = Scalar(0);
  bool exact = false;  // true when both the inner min and the outer max are exact
  bool lower_bound = false;  // true when value is guaranteed <= the true distance
  Index outer_points = 0;
};

namespace detail {

/// Candidate W matrices: exactly {+1, -1} when p = 1, otherwise the identity
/// plus `samples` Haar-random orthogonal matrices.
template <typename Scalar>
std::vector<Matrix<Scalar>> freedom_candidates(Index p, Index samples, Rng& rng) {
  std::vector<Matrix<Scalar>> ws;
  if (p == 0) {
    ws.emplace_back(0, 0);
  } else if (p == 1) {
    ws.push_back(Matrix<Scalar>::Constant(1, 1, Scalar(1)));
    ws.push_back(Matrix<Scalar>::Constant(1, 1, Scalar(-1)));
  } else {
    ws.push_back(Matrix<Scalar>::Identity(p, p));
    for (Index s = 0; s < samples; ++s) ws.push_back(haar_orthogonal<Scalar>(rng, p));
  }
  return ws;
}

}  // namespace detail

/// max over Y~ in set_b of min over Y in set_a of ||Y~ - Y||.
///
/// The outer max is exact for k - r <= 1 and otherwise a maximum over the
/// identity plus `samples` Haar-random W, hence a lower bound. The inner min is
/// exact for the Frobenius norm (optimal_representative) and for k - r <= 1;
/// otherwise it is taken over sampled W plus the Frobenius optimum.
template <typename Scalar>
HausdorffEstimate<Scalar> hausdorff_distance_estimate(const AlignedBasisSet<Scalar>& set_a,
                                                      const AlignedBasisSet<Scalar>& set_b, NormKind kind,
                                                      Index samples = 512, std::uint64_t seed = 0) {
  if (set_a.ambient_dim() != set_b.ambient_dim() || set_a.dim() != set_b.dim())
    throw Error(ErrorCode::dimension_mismatch, "sets live in different shapes");
  if (set_a.rank != set_b.rank) throw Error(ErrorCode::rank_mismatch, "sets have different ranks");

  const Index p = set_a.freedom_dim();
  Rng outer_rng = Rng::stream(seed, 0);
  Rng inner_rng = Rng::stream(seed, 1);
  const auto outer = detail::freedom_candidates<Scalar>(p, samples, outer_rng);
  const bool inner_exact = kind == NormKind::frobenius || p <= 1;
  const auto inner = inner_exact ? std::vector<Matrix<Scalar>>{} : detail::freedom_candidates<Scalar>(p, samples, inner_rng);

  HausdorffEstimate<Scalar> est;
  est.exact = p <= 1;
  est.lower_bound = inner_exact;
  est.outer_points = static_cast<Index>(outer.size());
  for (const Matrix<Scalar>& w_b : outer) {
    const OrthonormalBasis<Scalar> y_b = member(set_b, w_b);
    Scalar best = std::numeric_limits<Scalar>::infinity();
    if (kind == NormKind::frobenius) {
      best = (y_b.matrix() - optimal_representative(set_a, y_b).y_opt.matrix()).norm();
    } else if (p <= 1) {
      for (const Matrix<Scalar>& w_a : detail::freedom_candidates<Scalar>(p, 0, inner_rng))
        best = std::min(best, matrix_norm((y_b.matrix() - member(set_a, w_a).matrix()).eval(), kind));
    } else {
      const MemberDistance<Scalar> distance(set_a, y_b.matrix());
      best = distance(optimal_representative(set_a, y_b).w_opt, kind);
      for (const Matrix<Scalar>& w_a : inner) best = std::min(best, distance(w_a, kind));
    }
    est.value = std::max(est.value, best);
  }
  return est;
}

}  // namespace dalign
