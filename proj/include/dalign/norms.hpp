#pragma once

#include <algorithm>
#include <array>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "dalign/errors.hpp"

namespace dalign {

/// The three unitarily invariant norms shipped by the library. All of them
/// are functions of the singular values only.
enum class NormKind { spectral, frobenius, trace };

inline constexpr std::array<NormKind, 3> kAllNormKinds = {NormKind::spectral, NormKind::frobenius,
                                                          NormKind::trace};

constexpr std::string_view to_string(NormKind kind) noexcept {
  switch (kind) {
    case NormKind::spectral: return "spectral";
    case NormKind::frobenius: return "frobenius";
    case NormKind::trace: return "trace";
  }
  return "unknown";
}

inline NormKind parse_norm_kind(std::string_view name) {
  for (NormKind kind : kAllNormKinds) {
    if (name == to_string(kind)) return kind;
  }
  throw Error(ErrorCode::invalid_input, "unknown norm kind '" + std::string(name) + "'");
}

constexpr std::size_t norm_index(NormKind kind) noexcept { return static_cast<std::size_t>(kind); }

/// Norm of diag(s) for a vector of nonnegative singular values.
///
/// Sums run sequentially in index order, so a truncated norm (a prefix of the
/// same sum) never exceeds the full norm even in floating point.
template <typename Derived>
typename Derived::Scalar norm_of_singular_values(const Eigen::MatrixBase<Derived>& s, NormKind kind) {
  using Scalar = typename Derived::Scalar;
  using std::sqrt;
  if (s.size() == 0) return Scalar(0);
  Scalar acc(0);
  switch (kind) {
    case NormKind::spectral: return s.maxCoeff();
    case NormKind::frobenius:
      for (Eigen::Index i = 0; i < s.size(); ++i) acc += s(i) * s(i);
      return sqrt(acc);
    case NormKind::trace:
      for (Eigen::Index i = 0; i < s.size(); ++i) acc += s(i);
      return acc;
  }
  return Scalar(0);
}

/// Same as norm_of_singular_values restricted to the r largest entries.
/// `s` must already be sorted in nonincreasing order.
template <typename Derived>
typename Derived::Scalar truncated_norm_of_singular_values(const Eigen::MatrixBase<Derived>& s,
                                                           Eigen::Index r, NormKind kind) {
  if (r <= 0) throw Error(ErrorCode::invalid_input, "truncation rank must be at least 1");
  const Eigen::Index keep = std::min<Eigen::Index>(r, s.size());
  return norm_of_singular_values(s.head(keep), kind);
}

}  // namespace dalign
