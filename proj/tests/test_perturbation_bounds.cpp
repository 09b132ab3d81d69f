#include <doctest.h>

#include <cmath>

#include "dalign/experiments.hpp"
#include "dalign/perturbation_bounds.hpp"
#include "dalign/report_json.hpp"
#include "support.hpp"

using namespace dalign;
using dalign::testing::log_uniform;
using dalign::testing::random_aligned_instance;

namespace {

const double kRoot2 = std::sqrt(2.0);

// Rank-r pair B = G1 G2^T and B~ = (G1 + e E1)(G2 + e E2)^T.
std::pair<MatrixXd, MatrixXd> equal_rank_pair(Rng& rng, Index m, Index n, Index r, double e) {
  const MatrixXd g1 = gaussian_matrix(rng, m, r);
  const MatrixXd g2 = gaussian_matrix(rng, n, r);
  const MatrixXd b = g1 * g2.transpose();
  const MatrixXd bt = (g1 + e * gaussian_matrix(rng, m, r)) * (g2 + e * gaussian_matrix(rng, n, r)).transpose();
  return {b, bt};
}

}  // namespace

TEST_CASE("eta coefficients") {
  CHECK(eta(NormKind::spectral, 3, 3, 1.0, 1.0, 1.0) == doctest::Approx(2 * kRoot2));
  CHECK(eta(NormKind::trace, 3, 3, 1.0, 1.0, 1.0) == doctest::Approx(2 * kRoot2));
  CHECK(eta(NormKind::frobenius, 2, 3, 1.0, 1.0, 1.0) == doctest::Approx(2 * kRoot2 + 4));
  CHECK(eta(NormKind::frobenius, 2, 3, 1.0, 1.0, 1.0) == doctest::Approx(6.8284271247));
  CHECK(eta(NormKind::spectral, 2, 3, 1.0, 1.0, 1.0) == doctest::Approx(kRoot2 + std::sqrt(6.0) + 4));
  CHECK(eta(NormKind::trace, 2, 3, 1.0, 1.0, 1.0) == doctest::Approx(4 * kRoot2 + 4));
  // sigma != sigma~: the max uses the larger one.
  CHECK(eta(NormKind::frobenius, 1, 2, 1.0, 3.0, 2.0) == doctest::Approx(kRoot2 * (1 + 1.0) + 8.0 / 3.0));

  CHECK(eta_branch(NormKind::trace, 2, 2) == EtaBranch::full_rank);
  CHECK(eta_branch(NormKind::frobenius, 1, 2) == EtaBranch::improved_frobenius);
  CHECK(eta_branch(NormKind::spectral, 1, 2) == EtaBranch::improved_spectral);
  CHECK(eta_branch(NormKind::trace, 1, 2) == EtaBranch::generic);

  CHECK_ERROR(eta(NormKind::spectral, 1, 2, 0.0, 1.0, 1.0), ErrorCode::invalid_input);
  CHECK_ERROR(eta(NormKind::spectral, 1, 2, 1.0, -1.0, 1.0), ErrorCode::invalid_input);
  CHECK_ERROR(eta(NormKind::spectral, 0, 2, 1.0, 1.0, 1.0), ErrorCode::invalid_input);
  CHECK_ERROR(eta(NormKind::spectral, 3, 2, 1.0, 1.0, 1.0), ErrorCode::invalid_input);
}

TEST_CASE("property: eta ordering") {
  Rng rng(1);
  for (int rep = 0; rep < 20000; ++rep) {
    const double s = log_uniform(rng, 1e-6, 1e3);
    const double st = log_uniform(rng, 1e-6, 1e3);
    const double d = std::max(s, st) * log_uniform(rng, 1.0, 1e4);
    const double full = eta(NormKind::frobenius, 3, 3, s, st, d);
    const double fro = eta(NormKind::frobenius, 2, 3, s, st, d);
    const double two = eta(NormKind::spectral, 2, 3, s, st, d);
    const double generic = eta(NormKind::trace, 2, 3, s, st, d);
    CHECK(full > kRoot2);
    CHECK(full <= fro * (1 + 1e-15));
    CHECK(fro <= generic * (1 + 1e-15));
    CHECK(two <= generic * (1 + 1e-15));
  }
}

TEST_CASE("xi and xi_sharpened") {
  CHECK(xi(NormKind::spectral, 2, 2, 1.0, 1.0, 1.0, 0.0) == 0.0);
  CHECK(xi(NormKind::spectral, 2, 2, 1.0, 1.0, 1.0, 0.5) == doctest::Approx(kRoot2));
  CHECK_ERROR(xi(NormKind::spectral, 2, 2, 1.0, 1.0, 1.0, -0.1), ErrorCode::invalid_input);
  CHECK_ERROR(xi_sharpened(NormKind::trace, 3, 3, 1.0, 1.0, 1.0, 0.1), ErrorCode::not_applicable);

  // Five equal angles delta, r = 4: trace drops one term, spectral is unchanged.
  const double delta = 1e-3;
  const double e = eta(NormKind::trace, 4, 5, 0.2, 0.2, 1.0);
  CHECK(xi_sharpened(NormKind::trace, 4, 5, 0.2, 0.2, 1.0, 4 * delta) == doctest::Approx(4 * delta * e));
  CHECK(xi(NormKind::trace, 4, 5, 0.2, 0.2, 1.0, 5 * delta) == doctest::Approx(5 * delta * e));
  CHECK(xi_sharpened(NormKind::spectral, 4, 5, 0.2, 0.2, 1.0, delta) ==
        xi(NormKind::spectral, 4, 5, 0.2, 0.2, 1.0, delta));
}

TEST_CASE("xi for the experiment instance matches an independent evaluation") {
  const double delta = 1e-6;
  const auto pair = make_pair<double>(96, 5, delta, 0, 0);
  const MatrixXd d = paper_d(96, 5, 0);
  const auto x = align(pair.x_diamond, d).x;
  const auto xt = align(pair.x_tilde_diamond, d).x;

  const double d_norm = Eigen::BDCSVD<MatrixXd>(d).singularValues()(0);
  const double s = Eigen::BDCSVD<MatrixXd>(x.matrix().transpose() * d).singularValues()(4);
  const double st = Eigen::BDCSVD<MatrixXd>(xt.matrix().transpose() * d).singularValues()(4);
  const double expected = kRoot2 * (1 + 2 * d_norm / (s + st)) * delta;

  const auto rep = evaluate_instance(x, xt, d, NormKind::spectral);
  CHECK(rep.xi == doctest::Approx(expected).epsilon(1e-8));
  CHECK(rep.d_norm == doctest::Approx(d_norm).epsilon(1e-14));
  CHECK(rep.regime == Regime::full_rank);
  CHECK(rep.xi_sharpened == rep.xi);
}

TEST_CASE("Wedin bound") {
  SUBCASE("identical matrices") {
    const MatrixXd b = MatrixXd::Identity(3, 2);
    const auto w = wedin_bound(b, b, 2, NormKind::frobenius);
    CHECK(w.bound_a == 0.0);
    CHECK(w.measured_u <= 1e-15);
  }
  SUBCASE("a rotated rank-one matrix") {
    const double alpha = 0.3;
    MatrixXd b = MatrixXd::Zero(2, 2);
    b(0, 0) = 1.0;
    MatrixXd bt = MatrixXd::Zero(2, 2);
    bt(0, 0) = std::cos(alpha);
    bt(1, 0) = std::sin(alpha);
    const auto w = wedin_bound(b, bt, 1, NormKind::spectral);
    CHECK(w.measured_u == doctest::Approx(std::sin(alpha)));
    CHECK(w.measured_v <= 1e-15);
    CHECK(w.bound_a == doctest::Approx(2 * std::sin(alpha / 2)));
    CHECK(w.measured_u <= w.bound_a);
  }
  SUBCASE("errors") {
    CHECK_ERROR(wedin_bound(MatrixXd(MatrixXd::Identity(2, 2)), MatrixXd(MatrixXd::Identity(3, 2)), 1,
                            NormKind::spectral),
                ErrorCode::dimension_mismatch);
    MatrixXd rank1 = MatrixXd::Zero(2, 2);
    rank1(0, 0) = 1.0;
    CHECK_ERROR(wedin_bound(MatrixXd(MatrixXd::Identity(2, 2)), rank1, 1, NormKind::spectral),
                ErrorCode::rank_mismatch);
  }
}

TEST_CASE("property: Wedin bounds on random equal-rank pairs") {
  Rng rng(2);
  for (int rep = 0; rep < 300; ++rep) {
    const Index m = rng.uniform_index(2, 12);
    const Index n = rng.uniform_index(2, 12);
    const Index r = rng.uniform_index(1, std::min(m, n));
    auto [b, bt] = equal_rank_pair(rng, m, n, r, log_uniform(rng, 1e-8, 1.0));
    for (NormKind kind : kAllNormKinds) {
      const auto w = wedin_bound(b, bt, r, kind);
      CHECK(w.bound_a <= w.bound_b * (1 + 1e-14));
      CHECK(w.measured_u <= w.bound_a + 1e-10);
      CHECK(w.measured_v <= w.bound_a + 1e-10);
    }
  }
}

TEST_CASE("property: polar factor perturbation") {
  Rng rng(3);
  for (int rep = 0; rep < 300; ++rep) {
    const Index m = rng.uniform_index(1, 10);
    const Index n = rng.uniform_index(m, 12);
    const Index r = rng.uniform_index(1, m);
    auto [b, bt] = equal_rank_pair(rng, n, m, r, log_uniform(rng, 1e-8, 1.0));
    for (NormKind kind : kAllNormKinds) {
      const auto p = polar_perturbation_bound(b, bt, kind);
      CHECK(p.rank == r);
      CHECK(p.measured <= p.bound_generic + 1e-10);
      if (kind != NormKind::trace) CHECK(p.measured <= p.bound_improved + 1e-10);
      else CHECK(std::isnan(p.bound_improved));
    }
  }
}

TEST_CASE("evaluate_instance") {
  SUBCASE("identical bases") {
    const auto pair = make_pair<double>(96, 5, 0.0, 0, 0);
    const MatrixXd d = paper_d(96, 5, 0);
    const auto x = align(pair.x_diamond, d).x;
    const auto rep = evaluate_instance(x, x, d, NormKind::frobenius);
    CHECK(rep.measured == 0.0);
    CHECK(rep.xi <= 1e-12);
    CHECK(std::isinf(rep.slack));
    CHECK(to_json(rep)["slack"].is_null());
  }
  SUBCASE("full-rank experiment point") {
    const auto pair = make_pair<double>(96, 5, 1e-3, 0, 0);
    const MatrixXd d = paper_d(96, 5, 0);
    const auto x = align(pair.x_diamond, d).x;
    const auto xt = align(pair.x_tilde_diamond, d).x;
    for (NormKind kind : kAllNormKinds) {
      const auto rep = evaluate_instance(x, xt, d, kind);
      CHECK(rep.r == 5);
      CHECK(rep.bound_holds());
      CHECK(rep.slack > 1.0);
      CHECK(rep.slack < 50.0);
      CHECK(rep.measured == doctest::Approx(matrix_norm((x.matrix() - xt.matrix()).eval(), kind)));
    }
  }
  SUBCASE("k - r = 2 reports a sandwich interval") {
    const auto pair = make_pair<double>(96, 5, 1e-3, 0, 0);
    const MatrixXd d = paper_d(96, 5, 2);
    const auto x = align(pair.x_diamond, d).x;
    const auto xt = align(pair.x_tilde_diamond, d).x;
    const auto fro = evaluate_instance(x, xt, d, NormKind::frobenius);
    CHECK(fro.measured_exact);
    const auto two = evaluate_instance(x, xt, d, NormKind::spectral);
    CHECK(two.r == 3);
    CHECK(two.eta_branch == EtaBranch::improved_spectral);
    CHECK_FALSE(two.measured_exact);
    CHECK(two.measured_lower == doctest::Approx(fro.measured / std::sqrt(5.0)));
    CHECK(two.measured_lower <= two.measured_upper);
    CHECK(two.measured == two.measured_upper);
    CHECK(two.bound_holds());
    const auto tr = evaluate_instance(x, xt, d, NormKind::trace);
    CHECK(tr.measured_lower == doctest::Approx(fro.measured));
    CHECK(tr.xi_sharpened < tr.xi);
    CHECK(tr.xi_sharpened == doctest::Approx(tr.xi * 3.0 / 5.0).epsilon(1e-6));
  }
  SUBCASE("hypothesis failures") {
    const MatrixXd d = MatrixXd::Identity(4, 2);
    const OrthonormalBasis<double> top(MatrixXd::Identity(4, 2));
    MatrixXd bottom_m = MatrixXd::Zero(4, 2);
    bottom_m(2, 0) = bottom_m(3, 1) = 1.0;
    const OrthonormalBasis<double> bottom(bottom_m);
    CHECK_ERROR(evaluate_instance(top, bottom, d, NormKind::spectral), ErrorCode::rank_mismatch);
    CHECK_ERROR(evaluate_instance(bottom, bottom, d, NormKind::spectral), ErrorCode::not_applicable);
    const OrthonormalBasis<double> flipped(MatrixXd(-MatrixXd::Identity(4, 2)));
    CHECK_ERROR(evaluate_instance(top, flipped, d, NormKind::spectral), ErrorCode::not_aligned);
    CHECK_ERROR(evaluate_instance(top, top, MatrixXd(MatrixXd::Identity(4, 3)), NormKind::spectral),
                ErrorCode::dimension_mismatch);
  }
}

TEST_CASE("property: the bound holds on random aligned instances") {
  Rng rng(4);
  for (int rep = 0; rep < 500; ++rep) {
    const Index k = rng.uniform_index(1, 6);
    const Index n = rng.uniform_index(k + 1, 30);
    const Index r = std::max<Index>(1, k - rng.uniform_index(0, 2));
    const auto inst = random_aligned_instance(rng, n, k, r, log_uniform(rng, 1e-6, 0.5));
    for (NormKind kind : kAllNormKinds) {
      const auto report = evaluate_instance(inst.x, inst.x_tilde, inst.d, kind);
      CHECK(report.r == r);
      CHECK(report.measured_lower <= report.measured_upper * (1 + 1e-12));
      CHECK(report.bound_holds());
      if (r < k) CHECK(report.xi_sharpened <= report.xi * (1 + 1e-15));
    }
  }
}

TEST_CASE("report JSON carries every field") {
  const auto pair = make_pair<double>(96, 5, 1e-3, 0, 0);
  const MatrixXd d = paper_d(96, 5, 1);
  const auto j = to_json(evaluate_instance(align(pair.x_diamond, d).x, align(pair.x_tilde_diamond, d).x, d,
                                           NormKind::trace));
  for (const char* key : {"kind", "regime", "eta_branch", "r", "k", "sigma_r", "sigma_r_tilde", "d_norm",
                          "sin_theta", "sin_theta_truncated", "eta", "xi", "xi_sharpened", "measured", "slack"})
    CHECK_MESSAGE(j.contains(key), key);
  CHECK(j["kind"] == "trace");
  CHECK(j["regime"] == "rank_deficient");
  CHECK(j["r"] == 4);
}
