// dalign: command-line front end for the subspace alignment library.
//
//   dalign angles     --x X.txt --y Y.txt [--norm spectral|frobenius|trace|all]
//   dalign align      --x X.txt --d D.txt [--emit-set [--set-prefix P]]
//   dalign bounds     --x X.txt --xt XT.txt --d D.txt --norm <kind|all> [--json]
//   dalign experiment --figure 1|2|3 [--n 96 --k 5 --seed S --points 40 --out DIR]
//   dalign experiment --custom config.json [--out DIR]

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "dalign/experiments.hpp"
#include "dalign/matrix_io.hpp"
#include "dalign/perturbation_bounds.hpp"
#include "dalign/polar_align.hpp"
#include "dalign/report_json.hpp"
#include "dalign/subspace_metrics.hpp"

namespace {

using namespace dalign;

std::vector<NormKind> selected_norms(const std::string& name) {
  if (name == "all") return {kAllNormKinds.begin(), kAllNormKinds.end()};
  return {parse_norm_kind(name)};
}

OrthonormalBasis<double> read_basis(const std::string& path) { return OrthonormalBasis<double>(read_matrix_file(path)); }

int run_angles(const std::string& x_path, const std::string& y_path, const std::string& norm) {
  const auto norms = selected_norms(norm);
  const AngleSpectrum<double> angles = canonical_angles(read_basis(x_path), read_basis(y_path));
  const Index k = angles.size();
  std::cout << "index,sine,cosine\n";
  for (Index i = 0; i < k; ++i) {
    std::cout << i + 1 << ',' << format_shortest(angles.sines(i)) << ','
              << format_shortest(angles.cosines(k - 1 - i)) << '\n';
  }
  std::cout << "norm,value\n";
  for (NormKind kind : norms) std::cout << to_string(kind) << ',' << format_shortest(sin_theta_norm(angles, kind)) << '\n';
  return 0;
}

int run_align(const std::string& x_path, const std::string& d_path, bool emit_set, std::string prefix) {
  const AlignResult<double> result = align(read_basis(x_path), read_matrix_file(d_path));
  write_matrix(std::cout, result.x.matrix());
  if (emit_set) {
    if (prefix.empty()) {
      std::filesystem::path p(x_path);
      prefix = (p.parent_path() / p.stem()).string();
    }
    write_matrix_file(prefix + ".base.txt", result.set.base);
    // With r = k the freedom factors have no columns and are not written.
    if (result.set.freedom_dim() > 0) {
      write_matrix_file(prefix + ".freedom_left.txt", result.set.freedom_left);
      write_matrix_file(prefix + ".freedom_right.txt", result.set.freedom_right);
    }
    std::cerr << "rank " << result.set.rank << ", freedom " << result.set.freedom_dim() << "; set written to "
              << prefix << ".*.txt\n";
  }
  return 0;
}

int run_bounds(const std::string& x_path, const std::string& xt_path, const std::string& d_path,
               const std::string& norm, bool as_json, bool align_inputs) {
  const MatrixXd d = read_matrix_file(d_path);
  OrthonormalBasis<double> x = read_basis(x_path);
  OrthonormalBasis<double> xt = read_basis(xt_path);
  if (align_inputs) {
    x = align(x, d).x;
    xt = align(xt, d).x;
  }
  std::vector<BoundReport<double>> reports;
  for (NormKind kind : selected_norms(norm)) reports.push_back(evaluate_instance(x, xt, d, kind));

  if (as_json) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& rep : reports) out.push_back(to_json(rep));
    std::cout << (out.size() == 1 ? out[0] : out).dump(2) << '\n';
    return 0;
  }
  std::cout << "kind,regime,eta_branch,r,k,sigma_r,sigma_r_tilde,d_norm,sin_theta,sin_theta_truncated,eta,xi,"
               "xi_sharpened,measured,measured_lower,measured_upper,measured_exact,slack\n";
  for (const auto& rep : reports) {
    std::cout << to_string(rep.kind) << ',' << to_string(rep.regime) << ',' << to_string(rep.eta_branch) << ','
              << rep.r << ',' << rep.k << ',' << format_shortest(rep.sigma_r) << ','
              << format_shortest(rep.sigma_r_tilde) << ',' << format_shortest(rep.d_norm) << ','
              << format_shortest(rep.sin_theta) << ',' << format_shortest(rep.sin_theta_truncated) << ','
              << format_shortest(rep.eta) << ',' << format_shortest(rep.xi) << ','
              << format_shortest(rep.xi_sharpened) << ',' << format_shortest(rep.measured) << ','
              << format_shortest(rep.measured_lower) << ',' << format_shortest(rep.measured_upper) << ','
              << (rep.measured_exact ? 1 : 0) << ',' << format_shortest(rep.slack) << '\n';
  }
  return 0;
}

struct ExperimentArgs {
  int figure = 0;
  std::string custom;
  Index n = 96;
  Index k = 5;
  std::uint64_t seed = 0;
  Index points = 40;
  Index w_samples = 512;
  std::string out = "experiment_out";
};

int run_experiment(const ExperimentArgs& args) {
  ExperimentConfig config;
  if (!args.custom.empty()) {
    std::ifstream in(args.custom);
    if (!in) throw Error(ErrorCode::io_error, "cannot open " + args.custom);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::invalid_input, std::string("bad JSON in ") + args.custom + ": " + e.what());
    }
    config = config_from_json(j);
  } else {
    config = ExperimentConfig::figure(args.figure);
    config.n = args.n;
    config.k = args.k;
    config.seed = args.seed;
    config.w_samples = args.w_samples;
    config.deltas = ExperimentConfig::log_grid(1e-12, 1e-2, args.points);
  }
  const std::vector<SweepRow> rows = run_sweep(config);
  write_experiment(args.out, config, rows);

  const SweepSummary summary = summarize(rows);
  for (const NormSummary& s : summary.norms) {
    std::cerr << to_string(s.norm) << ": slope(measured)=" << s.measured_slope << " slope(xi)=" << s.xi_slope
              << " slack in [" << s.slack_min << ", " << s.slack_max << "]\n";
  }
  std::size_t failed = 0;
  for (const SweepRow& r : rows) failed += r.passed() ? 0 : 1;
  std::cerr << rows.size() << " rows, " << failed << " failed; output in " << args.out << '\n';
  return summary.all_rows_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"D-aligned orthonormal bases, canonical angles and perturbation bounds"};
  app.require_subcommand(1);

  std::string x_path, y_path, xt_path, d_path, norm = "all", prefix;
  bool emit_set = false, as_json = false, align_inputs = false;

  auto* angles = app.add_subcommand("angles", "canonical angles and sin-theta norms between two subspaces");
  angles->add_option("--x", x_path, "orthonormal basis file")->required();
  angles->add_option("--y", y_path, "orthonormal basis file")->required();
  angles->add_option("--norm", norm, "spectral|frobenius|trace|all")
      ->check(CLI::IsMember({"spectral", "frobenius", "trace", "all"}));

  auto* align_cmd = app.add_subcommand("align", "rotate a basis so that X^T D is symmetric PSD");
  align_cmd->add_option("--x", x_path, "orthonormal basis file")->required();
  align_cmd->add_option("--d", d_path, "n x k matrix D")->required();
  align_cmd->add_flag("--emit-set", emit_set, "also write base / freedom factors of the aligned set");
  align_cmd->add_option("--set-prefix", prefix, "path prefix for --emit-set files (default: --x without extension)");

  auto* bounds = app.add_subcommand("bounds", "evaluate the perturbation bound for aligned X, X~");
  bounds->add_option("--x", x_path, "aligned basis X")->required();
  bounds->add_option("--xt", xt_path, "aligned basis X~")->required();
  bounds->add_option("--d", d_path, "n x k matrix D")->required();
  bounds->add_option("--norm", norm, "spectral|frobenius|trace|all")
      ->required()
      ->check(CLI::IsMember({"spectral", "frobenius", "trace", "all"}));
  bounds->add_flag("--json", as_json, "print the report(s) as JSON");
  bounds->add_flag("--align-inputs", align_inputs, "align X and X~ to D before evaluating");

  ExperimentArgs exp;
  auto* experiment = app.add_subcommand("experiment", "regenerate a Hadamard-pair delta sweep");
  auto* figure_opt = experiment->add_option("--figure", exp.figure, "1 (r=k), 2 (r=k-1) or 3 (r=k-2)")
                         ->check(CLI::Range(1, 3));
  auto* custom_opt = experiment->add_option("--custom", exp.custom, "JSON config file");
  figure_opt->excludes(custom_opt);
  experiment->add_option("--n", exp.n, "ambient dimension")->excludes(custom_opt);
  experiment->add_option("--k", exp.k, "subspace dimension")->excludes(custom_opt);
  experiment->add_option("--seed", exp.seed, "RNG seed")->excludes(custom_opt);
  experiment->add_option("--points", exp.points, "number of deltas in [1e-12, 1e-2]")->excludes(custom_opt);
  experiment->add_option("--w-samples", exp.w_samples, "sampled W per row for the oracle check")
      ->excludes(custom_opt);
  experiment->add_option("--out", exp.out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*angles) return run_angles(x_path, y_path, norm);
    if (*align_cmd) return run_align(x_path, d_path, emit_set, prefix);
    if (*bounds) return run_bounds(x_path, xt_path, d_path, norm, as_json, align_inputs);
    if (*experiment) {
      if (exp.figure == 0 && exp.custom.empty()) {
        std::cerr << "experiment: one of --figure or --custom is required\n";
        return 2;
      }
      return run_experiment(exp);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
