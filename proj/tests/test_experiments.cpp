#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dalign/experiments.hpp"
#include "dalign/extended_precision.hpp"
#include "dalign/polar_align.hpp"
#include "support.hpp"

using namespace dalign;

namespace {

ExperimentConfig small_config(int figure, Index points) {
  ExperimentConfig c = ExperimentConfig::figure(figure);
  c.deltas = ExperimentConfig::log_grid(1e-10, 1e-2, points);
  c.w_samples = 64;
  c.seed = 7;
  return c;
}

}  // namespace

TEST_CASE("log grid") {
  const auto g = ExperimentConfig::log_grid(1e-12, 1e-2, 40);
  REQUIRE(g.size() == 40);
  CHECK(g.front() == 1e-12);
  CHECK(g.back() == 1e-2);
  for (std::size_t i = 1; i < g.size(); ++i)
    CHECK(std::log10(g[i]) - std::log10(g[i - 1]) == doctest::Approx(10.0 / 39.0));
  CHECK(ExperimentConfig::log_grid(0.5, 0.5, 1) == std::vector<double>{0.5});
  CHECK_ERROR(ExperimentConfig::log_grid(0.0, 1.0, 3), ErrorCode::invalid_input);
  CHECK_ERROR(ExperimentConfig::log_grid(1.0, 0.5, 3), ErrorCode::invalid_input);
}

TEST_CASE("Hadamard pair") {
  SUBCASE("delta = 0 gives the same subspace") {
    const auto p = make_pair<double>(96, 5, 0.0, 1, 0);
    CHECK(canonical_angles(p.x_diamond, p.x_tilde_diamond).sines.maxCoeff() <= 1e-14);
  }
  SUBCASE("delta = 1 gives orthogonal subspaces") {
    const auto p = make_pair<double>(96, 5, 1.0, 1, 0);
    CHECK((p.x_diamond.matrix().transpose() * p.x_tilde_diamond.matrix()).norm() <= 1e-14);
    CHECK(canonical_angles(p.x_diamond, p.x_tilde_diamond).sines.minCoeff() >= 1 - 1e-14);
  }
  SUBCASE("delta = 0.5: X^T X~ has singular values sqrt(1 - delta^2)") {
    const auto p = make_pair<double>(96, 5, 0.5, 1, 0);
    const Eigen::VectorXd s = singular_values((p.x_diamond.matrix().transpose() * p.x_tilde_diamond.matrix()).eval());
    for (Index i = 0; i < 5; ++i) CHECK(s(i) == doctest::Approx(std::sqrt(0.75)).epsilon(1e-13));
  }
  SUBCASE("Q1 and Q2 are orthogonal and depend on seed and stream") {
    const auto a = make_pair<double>(96, 5, 0.1, 1, 0);
    const auto b = make_pair<double>(96, 5, 0.1, 1, 1);
    const auto c = make_pair<double>(96, 5, 0.1, 2, 0);
    const auto a2 = make_pair<double>(96, 5, 0.1, 1, 0);
    CHECK((a.q1.transpose() * a.q1 - MatrixXd::Identity(5, 5)).norm() <= 1e-14);
    CHECK((a.q1 - a.q2).norm() > 0.1);
    CHECK((a.q1 - b.q1).norm() > 0.1);
    CHECK((a.q1 - c.q1).norm() > 0.1);
    CHECK(a.q1 == a2.q1);
    CHECK(a.x_tilde_diamond.matrix() == a2.x_tilde_diamond.matrix());
  }
  CHECK_ERROR(make_pair<double>(96, 49, 0.1, 0, 0), ErrorCode::invalid_input);
  CHECK_ERROR(make_pair<double>(96, 5, 1.5, 0, 0), ErrorCode::invalid_input);
  CHECK_ERROR(make_pair<double>(28, 5, 0.1, 0, 0), ErrorCode::unsupported_order);
}

TEST_CASE("experiment D") {
  const MatrixXd d = paper_d(96, 5, 0);
  CHECK(d.topRows(5) == MatrixXd::Identity(5, 5));
  CHECK(d(5, 0) == doctest::Approx(6.0 / 768.0));  // 1-based (6, 1): 6 / (8 * 96 + 0)
  CHECK(d(95, 4) == doctest::Approx(96.0 / 772.0));
  CHECK(numerical_rank(d) == 5);
  CHECK(numerical_rank(paper_d(96, 5, 1)) == 4);
  CHECK(numerical_rank(paper_d(96, 5, 2)) == 3);
  CHECK(paper_d(96, 5, 2).rightCols(2).norm() == 0.0);
  CHECK_ERROR(paper_d(96, 5, 6), ErrorCode::invalid_input);
  CHECK_ERROR(paper_d(3, 5, 0), ErrorCode::invalid_input);
}

TEST_CASE("closed form of the Hadamard pair") {
  const ExperimentConfig c = ExperimentConfig::figure(1);
  SUBCASE("double at delta = 1e-12 within the representation limit") {
    const auto check = verify_closed_form<double>(c, 1e-12, 0, 1e-3);
    CHECK(check.computed[norm_index(NormKind::spectral)] >= 0.999e-12);
    CHECK(check.computed[norm_index(NormKind::spectral)] <= 1.001e-12);
  }
  SUBCASE("double at delta = 1e-2") {
    const auto check = verify_closed_form<double>(c, 1e-2);
    CHECK(std::abs(check.computed[norm_index(NormKind::trace)] - 5e-2) <= 5e-11);
  }
  SUBCASE("delta = 0") {
    const auto check = verify_closed_form<double>(c, 0.0);
    for (double v : check.computed) CHECK(v <= 1e-12);
  }
  SUBCASE("quad precision meets 1e-9 at delta = 1e-12") {
    const auto check = verify_closed_form<Quad>(c, 1e-12, 0, 1e-9);
    for (const Quad& e : check.relative_error) CHECK(static_cast<double>(e) <= 1e-9);
  }
  SUBCASE("failures name the norm and delta") {
    try {
      verify_closed_form<double>(c, 1e-12, 0, 1e-15);
      FAIL("expected VerificationFailure");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::verification_failure);
      CHECK(std::string(e.what()).find("delta=") != std::string::npos);
      CHECK(std::string(e.what()).find("norm") != std::string::npos);
    }
  }
}

TEST_CASE("config validation and JSON") {
  ExperimentConfig c = ExperimentConfig::figure(2);
  CHECK(c.rank_deficiency == 1);
  CHECK(c.n == 96);
  CHECK(c.k == 5);
  CHECK(c.deltas.size() == 40);
  CHECK_NOTHROW(c.validate());
  CHECK_ERROR(ExperimentConfig::figure(4), ErrorCode::invalid_input);

  const ExperimentConfig back = config_from_json(to_json(c));
  CHECK(back.n == c.n);
  CHECK(back.k == c.k);
  CHECK(back.deltas == c.deltas);
  CHECK(back.rank_deficiency == c.rank_deficiency);
  CHECK(back.seed == c.seed);
  CHECK(back.norms == c.norms);
  CHECK(back.w_samples == c.w_samples);

  auto bad = c;
  bad.n = 28;
  CHECK_ERROR(bad.validate(), ErrorCode::unsupported_order);
  bad = c;
  bad.deltas = {0.5, 1.0};
  CHECK_ERROR(bad.validate(), ErrorCode::invalid_input);
  bad = c;
  bad.rank_deficiency = 3;
  CHECK_ERROR(bad.validate(), ErrorCode::invalid_input);
  bad = c;
  bad.norms.clear();
  CHECK_ERROR(bad.validate(), ErrorCode::invalid_input);
  CHECK_ERROR(config_from_json(nlohmann::json{{"n", "ninety-six"}}), ErrorCode::invalid_input);
  CHECK_ERROR(config_from_json(nlohmann::json{{"norms", {"max"}}}), ErrorCode::invalid_input);
}

TEST_CASE("sweeps pass and are deterministic") {
  for (int figure : {1, 2, 3}) {
    const ExperimentConfig c = small_config(figure, 6);
    const auto rows = run_sweep(c);
    REQUIRE(rows.size() == 6 * 3);
    for (const auto& row : rows) {
      CHECK(row.passed());
      CHECK(row.measured_lower <= row.measured_upper);
      CHECK(row.sampled_min >= row.measured - 1e-10);
      CHECK(row.measured <= row.xi);
      CHECK(row.xi_sharpened <= row.xi * (1 + 1e-15));
    }
    CHECK(rows[0].delta == c.deltas[0]);
    CHECK(rows[0].norm == NormKind::spectral);
    CHECK(rows[2].norm == NormKind::trace);
    CHECK(sweep_csv(rows) == sweep_csv(run_sweep(c)));

    const SweepSummary s = summarize(rows);
    CHECK(s.all_rows_pass);
    REQUIRE(s.norms.size() == 3);
    for (const auto& n : s.norms) {
      CHECK(n.measured_slope == doctest::Approx(1.0).epsilon(0.05));
      CHECK(n.slack_min > 1.0);
    }
  }
}

TEST_CASE("sweep output files") {
  const ExperimentConfig c = small_config(1, 4);
  const auto rows = run_sweep(c);
  const std::string csv = sweep_csv(rows);
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  std::string expected;
  for (const auto& col : sweep_columns()) expected += (expected.empty() ? "" : ",") + col;
  CHECK(header == expected);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(rows.size() + 1));

  const std::string svg = sweep_svg(rows, NormKind::frobenius, "test");
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.find("<polyline") != std::string::npos);

  const auto dir = std::filesystem::temp_directory_path() / "dalign_experiment_test";
  std::filesystem::remove_all(dir);
  write_experiment(dir, c, rows);
  for (const char* f : {"sweep.csv", "config.json", "sweep_spectral.svg", "sweep_frobenius.svg", "sweep_trace.svg"})
    CHECK_MESSAGE(std::filesystem::exists(dir / f), f);
  std::ifstream in(dir / "sweep.csv");
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == csv);
  std::filesystem::remove_all(dir);
}
