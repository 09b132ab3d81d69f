#pragma once

#include <cmath>
#include <limits>
#include <string_view>

#include "dalign/basis.hpp"
#include "dalign/matrix_kernels.hpp"
#include "dalign/norms.hpp"
#include "dalign/polar_align.hpp"
#include "dalign/subspace_metrics.hpp"

namespace dalign {

/// Which closed form produced eta.
enum class EtaBranch { full_rank, improved_frobenius, improved_spectral, generic };

constexpr std::string_view to_string(EtaBranch b) noexcept {
  switch (b) {
    case EtaBranch::full_rank: return "full_rank";
    case EtaBranch::improved_frobenius: return "improved_frobenius";
    case EtaBranch::improved_spectral: return "improved_spectral";
    case EtaBranch::generic: return "generic";
  }
  return "unknown";
}

enum class Regime { full_rank, rank_deficient };

constexpr std::string_view to_string(Regime r) noexcept {
  return r == Regime::full_rank ? "full_rank" : "rank_deficient";
}

constexpr EtaBranch eta_branch(NormKind kind, Index r, Index k) noexcept {
  if (r == k) return EtaBranch::full_rank;
  switch (kind) {
    case NormKind::frobenius: return EtaBranch::improved_frobenius;
    case NormKind::spectral: return EtaBranch::improved_spectral;
    case NormKind::trace: return EtaBranch::generic;
  }
  return EtaBranch::generic;
}

/// Coefficient eta with min_{Y in set} ||X~ - Y|| <= eta ||sin Theta(X, X~)||.
///
///   r = k          : sqrt2 (1 + 2d/(s + s~))
///   r < k, generic : sqrt2 (1 + 2d/(s + s~)) + (2 sqrt2 + 4) d / max(s, s~)
///   r < k, F       : sqrt2 (1 + 2d/(s + s~)) + 4 d / max(s, s~)
///   r < k, 2       : sqrt2 + sqrt(8d^2/(s + s~)^2 + 4d^2/max(s, s~)^2) + 4 d / max(s, s~)
///
/// with s, s~ the smallest positive singular values of X^T D and X~^T D and
/// d = ||D||_2. The trace norm uses the generic branch.
template <typename Scalar>
Scalar eta(NormKind kind, Index r, Index k, Scalar sigma_r, Scalar sigma_r_tilde, Scalar d_norm) {
  using std::sqrt;
  if (!(sigma_r > Scalar(0)) || !(sigma_r_tilde > Scalar(0)))
    throw Error(ErrorCode::invalid_input, "sigma_r and sigma_r_tilde must be positive");
  if (!(d_norm >= Scalar(0))) throw Error(ErrorCode::invalid_input, "||D||_2 must be nonnegative");
  if (r < 1 || r > k) throw Error(ErrorCode::invalid_input, "need 1 <= r <= k");

  const Scalar root2 = sqrt(Scalar(2));
  const Scalar sum = sigma_r + sigma_r_tilde;
  const Scalar larger = std::max(sigma_r, sigma_r_tilde);
  const Scalar base = root2 * (Scalar(1) + Scalar(2) * d_norm / sum);
  switch (eta_branch(kind, r, k)) {
    case EtaBranch::full_rank:
      return base;
    case EtaBranch::improved_frobenius:
      return base + Scalar(4) * d_norm / larger;
    case EtaBranch::improved_spectral:
      return root2 + sqrt(Scalar(8) * d_norm * d_norm / (sum * sum) + Scalar(4) * d_norm * d_norm / (larger * larger)) +
             Scalar(4) * d_norm / larger;
    case EtaBranch::generic:
      return base + (Scalar(2) * root2 + Scalar(4)) * d_norm / larger;
  }
  return base;
}

/// xi = eta * ||sin Theta||.
template <typename Scalar>
Scalar xi(NormKind kind, Index r, Index k, Scalar sigma_r, Scalar sigma_r_tilde, Scalar d_norm, Scalar sin_theta) {
  if (!(sin_theta >= Scalar(0))) throw Error(ErrorCode::invalid_input, "sin_theta must be nonnegative");
  return eta(kind, r, k, sigma_r, sigma_r_tilde, d_norm) * sin_theta;
}

/// xi with ||sin Theta|| replaced by ||[sin Theta]_bestr||; rank-deficient
/// case only.
template <typename Scalar>
Scalar xi_sharpened(NormKind kind, Index r, Index k, Scalar sigma_r, Scalar sigma_r_tilde, Scalar d_norm,
                    Scalar truncated_sin_theta) {
  if (r == k) throw Error(ErrorCode::not_applicable, "sharpening only applies when r < k");
  return xi(kind, r, k, sigma_r, sigma_r_tilde, d_norm, truncated_sin_theta);
}

template <typename Scalar>
struct WedinResult {
  Scalar bound_a = Scalar(0);  // ||F_bestr|| / max(sigma_r(B), sigma_r(B~))
  Scalar bound_b = Scalar(0);  // ||F|| / max(sigma_r(B), sigma_r(B~))
  Scalar measured_u = Scalar(0);
  Scalar measured_v = Scalar(0);
};

namespace detail {

template <typename Scalar>
Scalar leading_subspace_distance(const Matrix<Scalar>& a, const Matrix<Scalar>& b, Index r, NormKind kind) {
  const OrthonormalBasis<Scalar> x(a.leftCols(r));
  const OrthonormalBasis<Scalar> y(b.leftCols(r));
  return sin_theta_norm(canonical_angles(x, y), kind);
}

}  // namespace detail

/// Singular subspace perturbation for B~ = B + F with rank(B) = rank(B~) = r:
/// sin Theta between the leading r left (and right) singular subspaces
/// against the two Wedin-type bounds.
template <typename Scalar>
WedinResult<Scalar> wedin_bound(const Matrix<Scalar>& b, const Matrix<Scalar>& b_tilde, Index r, NormKind kind,
                                const RankPolicy& policy = {}) {
  if (b.rows() != b_tilde.rows() || b.cols() != b_tilde.cols())
    throw Error(ErrorCode::dimension_mismatch, "B and B~ must have the same shape");
  if (r < 1) throw Error(ErrorCode::invalid_input, "rank must be at least 1");
  const SvdFactors<Scalar> f = svd(b, policy);
  const SvdFactors<Scalar> ft = svd(b_tilde, policy);
  if (f.numerical_rank != r || ft.numerical_rank != r)
    throw Error(ErrorCode::rank_mismatch, "B and B~ must both have numerical rank r");

  const Matrix<Scalar> diff = b_tilde - b;
  const Scalar denom = std::max(f.sigma(r - 1), ft.sigma(r - 1));
  WedinResult<Scalar> out;
  // Both bounds come from one set of singular values of F, so (a) <= (b)
  // holds exactly.
  const Vector<Scalar> f_sigma = singular_values(diff);
  out.bound_a = truncated_norm_of_singular_values(f_sigma, r, kind) / denom;
  out.bound_b = norm_of_singular_values(f_sigma, kind) / denom;
  out.measured_u = detail::leading_subspace_distance(f.u, ft.u, r, kind);
  out.measured_v = detail::leading_subspace_distance(f.v, ft.v, r, kind);
  return out;
}

template <typename Scalar>
struct PolarPerturbation {
  Scalar bound_generic = Scalar(0);   // holds for every unitarily invariant norm
  Scalar bound_improved = std::numeric_limits<Scalar>::quiet_NaN();  // frobenius / spectral only
  Scalar measured = Scalar(0);        // ||Q - Q~||
  Index rank = 0;
};

/// Perturbation of the canonical polar factor for B~ = B + F (n >= m) with
/// rank(B) = rank(B~) = r:
///   r = n = m : ||Q - Q~|| <= 2/(s + s~) ||F||
///   otherwise : ||Q - Q~|| <= (2/(s + s~) + 2/max(s, s~)) ||F||
/// and for the Frobenius / spectral norms
///   ||Q - Q~||_F <= 2/(s + s~) ||F||_F
///   ||Q - Q~||_2 <= sqrt(4/(s + s~)^2 + 2/max(s, s~)^2) ||F||_2.
template <typename Scalar>
PolarPerturbation<Scalar> polar_perturbation_bound(const Matrix<Scalar>& b, const Matrix<Scalar>& b_tilde,
                                                   NormKind kind, const RankPolicy& policy = {}) {
  using std::sqrt;
  if (b.rows() != b_tilde.rows() || b.cols() != b_tilde.cols())
    throw Error(ErrorCode::dimension_mismatch, "B and B~ must have the same shape");
  const SvdFactors<Scalar> f = svd(b, policy);
  const SvdFactors<Scalar> ft = svd(b_tilde, policy);
  const Index r = f.numerical_rank;
  if (r != ft.numerical_rank) throw Error(ErrorCode::rank_mismatch, "B and B~ differ in numerical rank");
  if (r == 0) throw Error(ErrorCode::not_applicable, "polar factors of zero matrices");

  const CanonicalPolar<Scalar> p = polar(b, policy);
  const CanonicalPolar<Scalar> pt = polar(b_tilde, policy);
  const Matrix<Scalar> diff = b_tilde - b;
  const Scalar f_norm = matrix_norm(diff, kind);
  const Scalar sum = f.sigma_r() + ft.sigma_r();
  const Scalar larger = std::max(f.sigma_r(), ft.sigma_r());

  PolarPerturbation<Scalar> out;
  out.rank = r;
  out.measured = matrix_norm((p.q - pt.q).eval(), kind);
  const bool square_full = r == b.rows() && r == b.cols();
  out.bound_generic = (square_full ? Scalar(2) / sum : Scalar(2) / sum + Scalar(2) / larger) * f_norm;
  if (kind == NormKind::frobenius) out.bound_improved = Scalar(2) / sum * f_norm;
  if (kind == NormKind::spectral)
    out.bound_improved = sqrt(Scalar(4) / (sum * sum) + Scalar(2) / (larger * larger)) * f_norm;
  return out;
}

/// Inputs and outputs of one bound evaluation for aligned X, X~ and D.
template <typename Scalar>
struct BoundReport {
  NormKind kind = NormKind::frobenius;
  Regime regime = Regime::full_rank;
  EtaBranch eta_branch = EtaBranch::full_rank;
  Index r = 0;
  Index k = 0;
  Scalar sigma_r = Scalar(0);
  Scalar sigma_r_tilde = Scalar(0);
  Scalar d_norm = Scalar(0);
  Scalar rank_tolerance = Scalar(0);
  Scalar sin_theta = Scalar(0);
  Scalar sin_theta_truncated = Scalar(0);
  Scalar eta = Scalar(0);
  Scalar xi = Scalar(0);
  Scalar xi_sharpened = Scalar(0);
  /// min over the aligned set of ||X~ - Y||; when not computable exactly this
  /// is the upper end of [measured_lower, measured_upper].
  Scalar measured = Scalar(0);
  Scalar measured_lower = Scalar(0);
  Scalar measured_upper = Scalar(0);
  bool measured_exact = true;
  Scalar slack = Scalar(0);

  bool bound_holds(Scalar tol = Scalar(1e-10)) const { return measured <= xi + tol; }
};

/// Evaluate the bound for one pair of aligned bases. Both X^T D and X~^T D are
/// checked to be symmetric PSD and to share the numerical rank r >= 1.
///
/// measured:
///   r = k          : ||X - X~||
///   k - r = 1      : exact min over the two members of the set
///   Frobenius      : ||X~ - Y_opt||_F, exact
///   spectral       : in [||X~ - Y_opt||_F / sqrt(k), ||X~ - Y_opt||_2]
///   trace          : in [||X~ - Y_opt||_F, ||X~ - Y_opt||_tr]
template <typename Scalar>
BoundReport<Scalar> evaluate_instance(const OrthonormalBasis<Scalar>& x, const OrthonormalBasis<Scalar>& x_tilde,
                                      const Matrix<Scalar>& d, NormKind kind, const RankPolicy& policy = {}) {
  using std::sqrt;
  detail::require_same_shape(x, x_tilde);
  if (d.rows() != x.ambient_dim() || d.cols() != x.dim())
    throw Error(ErrorCode::dimension_mismatch, "D must have the same n x k shape as the bases");
  if (!check_alignment(x.matrix(), d).aligned) throw Error(ErrorCode::not_aligned, "X^T D is not symmetric PSD");
  if (!check_alignment(x_tilde.matrix(), d).aligned)
    throw Error(ErrorCode::not_aligned, "X~^T D is not symmetric PSD");

  const SvdFactors<Scalar> f = svd((x.matrix().transpose() * d).eval(), policy);
  const SvdFactors<Scalar> ft = svd((x_tilde.matrix().transpose() * d).eval(), policy);
  if (f.numerical_rank != ft.numerical_rank)
    throw Error(ErrorCode::rank_mismatch, "rank(X^T D) = " + std::to_string(f.numerical_rank) +
                                              " but rank(X~^T D) = " + std::to_string(ft.numerical_rank));
  if (f.numerical_rank == 0) throw Error(ErrorCode::not_applicable, "X^T D = 0; no bound to evaluate");

  BoundReport<Scalar> rep;
  rep.kind = kind;
  rep.k = x.dim();
  rep.r = f.numerical_rank;
  rep.regime = rep.r == rep.k ? Regime::full_rank : Regime::rank_deficient;
  rep.eta_branch = eta_branch(kind, rep.r, rep.k);
  rep.sigma_r = f.sigma_r();
  rep.sigma_r_tilde = ft.sigma_r();
  rep.rank_tolerance = std::max(f.rank_tolerance, ft.rank_tolerance);
  rep.d_norm = singular_values(d)(0);

  const AngleSpectrum<Scalar> angles = canonical_angles(x, x_tilde);
  rep.sin_theta = sin_theta_norm(angles, kind);
  rep.sin_theta_truncated = truncated_sin_theta_norm(angles, rep.r, kind);
  rep.eta = eta(kind, rep.r, rep.k, rep.sigma_r, rep.sigma_r_tilde, rep.d_norm);
  rep.xi = rep.eta * rep.sin_theta;
  rep.xi_sharpened = rep.regime == Regime::full_rank
                         ? rep.xi
                         : xi_sharpened(kind, rep.r, rep.k, rep.sigma_r, rep.sigma_r_tilde, rep.d_norm,
                                        rep.sin_theta_truncated);

  if (rep.regime == Regime::full_rank) {
    rep.measured = matrix_norm((x.matrix() - x_tilde.matrix()).eval(), kind);
    rep.measured_lower = rep.measured_upper = rep.measured;
    rep.measured_exact = true;
  } else {
    const AlignedBasisSet<Scalar> set = align(x, d, policy).set;
    const Index p = set.freedom_dim();
    if (p == 1) {
      Scalar best = std::numeric_limits<Scalar>::infinity();
      for (Scalar sign : {Scalar(1), Scalar(-1)}) {
        const Matrix<Scalar> w = Matrix<Scalar>::Constant(1, 1, sign);
        best = std::min(best, matrix_norm((x_tilde.matrix() - member(set, w).matrix()).eval(), kind));
      }
      rep.measured = rep.measured_lower = rep.measured_upper = best;
      rep.measured_exact = true;
    } else {
      const Matrix<Scalar> diff = x_tilde.matrix() - optimal_representative(set, x_tilde).y_opt.matrix();
      const Scalar frob = diff.norm();
      switch (kind) {
        case NormKind::frobenius:
          rep.measured_lower = rep.measured_upper = frob;
          rep.measured_exact = true;
          break;
        case NormKind::spectral:
          rep.measured_lower = frob / sqrt(Scalar(rep.k));
          rep.measured_upper = matrix_norm(diff, kind);
          rep.measured_exact = false;
          break;
        case NormKind::trace:
          rep.measured_lower = frob;
          rep.measured_upper = matrix_norm(diff, kind);
          rep.measured_exact = false;
          break;
      }
      rep.measured = rep.measured_upper;
    }
  }
  rep.slack = rep.measured > Scalar(0) ? rep.xi / rep.measured : std::numeric_limits<Scalar>::infinity();
  return rep;
}

}  // namespace dalign
