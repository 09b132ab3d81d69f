#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "dalign/basis.hpp"
#include "dalign/matrix_kernels.hpp"
#include "dalign/norms.hpp"
#include "dalign/random.hpp"
#include "dalign/subspace_metrics.hpp"

namespace dalign {

/// Sweep over delta of the Hadamard-pair experiment.
struct ExperimentConfig {
  Index n = 96;
  Index k = 5;
  std::vector<double> deltas = log_grid(1e-12, 1e-2, 40);
  Index rank_deficiency = 0;  // trailing columns of D set to zero
  std::uint64_t seed = 0;
  std::vector<NormKind> norms = {kAllNormKinds.begin(), kAllNormKinds.end()};
  Index w_samples = 512;

  /// Logarithmically spaced points from lo to hi inclusive.
  static std::vector<double> log_grid(double lo, double hi, Index points);

  /// Defaults for figures 1, 2 and 3 (rank deficiency 0, 1 and 2).
  static ExperimentConfig figure(int number);

  /// Throws InvalidInput / UnsupportedOrder.
  void validate() const;
};

nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);

template <typename Scalar>
struct HadamardPair {
  OrthonormalBasis<Scalar> x_diamond;
  OrthonormalBasis<Scalar> x_tilde_diamond;
  Matrix<Scalar> q1;
  Matrix<Scalar> q2;
};

/// X = M(:, 1:k), X~ = sqrt(1 - delta^2) M(:, 1:k) Q1 + delta M(:, k+1:2k) Q2
/// with M = hadamard(n) / sqrt(n). Q1 and Q2 are Haar samples drawn from
/// Rng::stream(seed, stream, 0) and Rng::stream(seed, stream, 1); the Gaussian
/// draws are made in double and orthonormalized in Scalar, so every scalar
/// type sees the same random matrices.
template <typename Scalar>
HadamardPair<Scalar> make_pair(Index n, Index k, double delta, std::uint64_t seed, std::uint64_t stream) {
  using std::sqrt;
  if (2 * k > n || k < 1) throw Error(ErrorCode::invalid_input, "need 1 <= k and 2k <= n");
  if (!(delta >= 0.0 && delta <= 1.0)) throw Error(ErrorCode::invalid_input, "delta must lie in [0, 1]");
  const Matrix<Scalar> m = hadamard<Scalar>(n) / sqrt(Scalar(n));
  Rng rng1 = Rng::stream(seed, stream, 0);
  Rng rng2 = Rng::stream(seed, stream, 1);
  Matrix<Scalar> q1 = haar_orthogonal<Scalar>(rng1, k);
  Matrix<Scalar> q2 = haar_orthogonal<Scalar>(rng2, k);
  const Scalar d = Scalar(delta);
  const Scalar c = sqrt(Scalar(1) - d * d);
  Matrix<Scalar> x = m.leftCols(k);
  Matrix<Scalar> xt = c * (m.leftCols(k) * q1) + d * (m.middleCols(k, k) * q2);
  return {OrthonormalBasis<Scalar>(std::move(x)), OrthonormalBasis<Scalar>(std::move(xt)), std::move(q1),
          std::move(q2)};
}

template <typename Scalar>
HadamardPair<Scalar> make_pair(const ExperimentConfig& config, double delta, std::uint64_t stream) {
  return make_pair<Scalar>(config.n, config.k, delta, config.seed, stream);
}

/// D = [I_k; tail] with tail(m, j) = m / (8n + j - 1) for 1-based rows
/// m = k+1..n and columns j = 1..k; the last `zero_last` columns are zeroed.
template <typename Scalar = double>
Matrix<Scalar> paper_d(Index n, Index k, Index zero_last) {
  if (k < 1 || n < k) throw Error(ErrorCode::invalid_input, "need 1 <= k <= n");
  if (zero_last < 0 || zero_last > k) throw Error(ErrorCode::invalid_input, "zero_last must lie in [0, k]");
  Matrix<Scalar> d = Matrix<Scalar>::Zero(n, k);
  d.topRows(k).setIdentity();
  for (Index i = k; i < n; ++i)
    for (Index j = 0; j < k; ++j) d(i, j) = Scalar(i + 1) / Scalar(8 * n + j);
  d.rightCols(zero_last).setZero();
  return d;
}

template <typename Scalar>
struct ClosedFormCheck {
  double delta = 0.0;
  std::array<Scalar, 3> expected{};  // delta, sqrt(k) delta, k delta
  std::array<Scalar, 3> computed{};
  std::array<Scalar, 3> relative_error{};
};

/// Compare ||sin Theta|| of the Hadamard pair with delta, sqrt(k) delta and
/// k delta. Throws VerificationFailure (naming norm and delta) when the
/// relative error exceeds `relative_tolerance`; for delta = 0 the computed
/// values must be below `zero_tolerance`.
template <typename Scalar>
ClosedFormCheck<Scalar> verify_closed_form(const ExperimentConfig& config, double delta, std::uint64_t stream = 0,
                                           double relative_tolerance = 1e-9, double zero_tolerance = 1e-12) {
  using std::abs;
  using std::sqrt;
  const HadamardPair<Scalar> pair = make_pair<Scalar>(config, delta, stream);
  const AngleSpectrum<Scalar> angles = canonical_angles(pair.x_diamond, pair.x_tilde_diamond);
  const Scalar d = Scalar(delta);
  ClosedFormCheck<Scalar> check;
  check.delta = delta;
  check.expected = {d, sqrt(Scalar(config.k)) * d, Scalar(config.k) * d};
  for (NormKind kind : kAllNormKinds) {
    const std::size_t i = norm_index(kind);
    check.computed[i] = sin_theta_norm(angles, kind);
    const Scalar err = abs(check.computed[i] - check.expected[i]);
    const bool ok = check.expected[i] > Scalar(0) ? err <= Scalar(relative_tolerance) * check.expected[i]
                                                  : check.computed[i] <= Scalar(zero_tolerance);
    check.relative_error[i] = check.expected[i] > Scalar(0) ? err / check.expected[i] : err;
    if (!ok) {
      throw Error(ErrorCode::verification_failure,
                  std::string(to_string(kind)) + " norm at delta=" + std::to_string(delta) + ": computed " +
                      std::to_string(static_cast<double>(check.computed[i])) + ", expected " +
                      std::to_string(static_cast<double>(check.expected[i])));
    }
  }
  return check;
}

/// One (delta, norm) point of a sweep.
struct SweepRow {
  double delta = 0.0;
  NormKind norm = NormKind::spectral;
  double sin_theta = 0.0;           // closed form
  double sin_theta_computed = 0.0;  // from canonical angles
  double measured = 0.0;
  double measured_lower = 0.0;
  double measured_upper = 0.0;
  double xi = 0.0;
  double xi_sharpened = 0.0;
  double slack = 0.0;
  double sigma_r = 0.0;
  double sigma_r_tilde = 0.0;
  double sampled_min = 0.0;  // min over sampled members (W oracle)
  bool rank_ok = false;
  bool bound_ok = false;
  bool closed_form_ok = false;
  bool oracle_ok = false;

  bool passed() const { return rank_ok && bound_ok && closed_form_ok && oracle_ok; }
};

/// Column names of sweep.csv, in SweepRow field order.
const std::vector<std::string>& sweep_columns();

/// For every delta (in order) and every configured norm: build the pair and
/// D, align both bases, evaluate the bound and cross-check against the closed
/// form and a sampled-W oracle. Rows whose rank hypothesis fails are flagged
/// and the sweep continues.
std::vector<SweepRow> run_sweep(const ExperimentConfig& config);

std::string sweep_csv(const std::vector<SweepRow>& rows);

struct NormSummary {
  NormKind norm = NormKind::spectral;
  double measured_slope = 0.0;  // least-squares slope of log(measured) vs log(delta)
  double xi_slope = 0.0;
  double slack_min = 0.0;
  double slack_max = 0.0;
  double slack_band() const { return slack_max / slack_min; }
};

struct SweepSummary {
  bool all_rows_pass = false;
  std::vector<NormSummary> norms;
};

SweepSummary summarize(const std::vector<SweepRow>& rows);

/// Log-log plot of measured and xi against delta for one norm.
std::string sweep_svg(const std::vector<SweepRow>& rows, NormKind norm, const std::string& title);

/// Writes sweep.csv, sweep_<norm>.svg for each norm and config.json into `dir`.
void write_experiment(const std::filesystem::path& dir, const ExperimentConfig& config,
                      const std::vector<SweepRow>& rows);

}  // namespace dalign
