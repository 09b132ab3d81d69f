#include "dalign/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "dalign/matrix_io.hpp"
#include "dalign/perturbation_bounds.hpp"
#include "dalign/polar_align.hpp"

namespace dalign {

std::vector<double> ExperimentConfig::log_grid(double lo, double hi, Index points) {
  if (points < 1 || !(lo > 0.0) || !(hi >= lo)) throw Error(ErrorCode::invalid_input, "bad log grid");
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(points));
  if (points == 1) return {lo};
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (Index i = 0; i < points; ++i) {
    grid.push_back(std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1)));
  }
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

ExperimentConfig ExperimentConfig::figure(int number) {
  if (number < 1 || number > 3) throw Error(ErrorCode::invalid_input, "figure must be 1, 2 or 3");
  ExperimentConfig config;
  config.rank_deficiency = number - 1;
  return config;
}

void ExperimentConfig::validate() const {
  if (k < 1 || 2 * k > n) throw Error(ErrorCode::invalid_input, "need 1 <= k and 2k <= n");
  if (!hadamard_order_supported(n))
    throw Error(ErrorCode::unsupported_order, "n = " + std::to_string(n) + " has no Hadamard construction");
  if (deltas.empty()) throw Error(ErrorCode::invalid_input, "no deltas");
  for (double d : deltas)
    if (!(d > 0.0 && d < 1.0)) throw Error(ErrorCode::invalid_input, "deltas must lie in (0, 1)");
  if (rank_deficiency < 0 || rank_deficiency > 2 || rank_deficiency >= k)
    throw Error(ErrorCode::invalid_input, "rank_deficiency must be 0, 1 or 2 and below k");
  if (norms.empty()) throw Error(ErrorCode::invalid_input, "no norms");
  if (w_samples < 0) throw Error(ErrorCode::invalid_input, "w_samples must be nonnegative");
}

nlohmann::json to_json(const ExperimentConfig& config) {
  nlohmann::json j;
  j["n"] = config.n;
  j["k"] = config.k;
  j["deltas"] = config.deltas;
  j["rank_deficiency"] = config.rank_deficiency;
  j["seed"] = config.seed;
  std::vector<std::string> norms;
  for (NormKind kind : config.norms) norms.emplace_back(to_string(kind));
  j["norms"] = norms;
  j["w_samples"] = config.w_samples;
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig config;
  try {
    if (j.contains("n")) config.n = j.at("n").get<Index>();
    if (j.contains("k")) config.k = j.at("k").get<Index>();
    if (j.contains("deltas")) config.deltas = j.at("deltas").get<std::vector<double>>();
    if (j.contains("rank_deficiency")) config.rank_deficiency = j.at("rank_deficiency").get<Index>();
    if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("norms")) {
      config.norms.clear();
      for (const auto& name : j.at("norms")) config.norms.push_back(parse_norm_kind(name.get<std::string>()));
    }
    if (j.contains("w_samples")) config.w_samples = j.at("w_samples").get<Index>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::invalid_input, std::string("bad experiment config: ") + e.what());
  }
  config.validate();
  return config;
}

const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> columns = {
      "delta",          "norm",           "sin_theta", "sin_theta_computed", "measured",
      "measured_lower", "measured_upper", "xi",        "xi_sharpened",       "slack",
      "sigma_r",        "sigma_r_tilde",  "sampled_min", "rank_ok",          "bound_ok",
      "closed_form_ok", "oracle_ok"};
  return columns;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double closed_form_sin_theta(double delta, Index k, NormKind kind) {
  switch (kind) {
    case NormKind::spectral: return delta;
    case NormKind::frobenius: return std::sqrt(static_cast<double>(k)) * delta;
    case NormKind::trace: return static_cast<double>(k) * delta;
  }
  return kNaN;
}

// Smallest ||X~ - Y(W)|| over the set's candidate W: both members when k - r
// is 1, otherwise the identity plus `samples` Haar draws.
double sampled_member_min(const AlignedBasisSet<double>& set, const MatrixXd& x_tilde, NormKind kind,
                          Index samples, Rng& rng) {
  const MemberDistance<double> distance(set, x_tilde);
  double best = std::numeric_limits<double>::infinity();
  for (const MatrixXd& w : detail::freedom_candidates<double>(set.freedom_dim(), samples, rng))
    best = std::min(best, distance(w, kind));
  return best;
}

}  // namespace

std::vector<SweepRow> run_sweep(const ExperimentConfig& config) {
  config.validate();
  const MatrixXd d = paper_d(config.n, config.k, config.rank_deficiency);
  const Index expected_rank = config.k - config.rank_deficiency;

  std::vector<SweepRow> rows;
  rows.reserve(config.deltas.size() * config.norms.size());
  for (std::size_t i = 0; i < config.deltas.size(); ++i) {
    const double delta = config.deltas[i];
    const HadamardPair<double> pair = make_pair<double>(config, delta, i);
    const AlignResult<double> aligned = align(pair.x_diamond, d);
    const AlignResult<double> aligned_tilde = align(pair.x_tilde_diamond, d);
    const bool rank_ok = aligned.set.rank == expected_rank && aligned_tilde.set.rank == expected_rank;

    for (std::size_t j = 0; j < config.norms.size(); ++j) {
      const NormKind kind = config.norms[j];
      SweepRow row;
      row.delta = delta;
      row.norm = kind;
      row.sin_theta = closed_form_sin_theta(delta, config.k, kind);
      row.rank_ok = rank_ok;
      if (!rank_ok) {
        row.sin_theta_computed = row.measured = row.measured_lower = row.measured_upper = kNaN;
        row.xi = row.xi_sharpened = row.slack = row.sampled_min = kNaN;
        row.sigma_r = aligned.set.sigma_r;
        row.sigma_r_tilde = aligned_tilde.set.sigma_r;
        rows.push_back(row);
        continue;
      }
      BoundReport<double> rep;
      try {
        rep = evaluate_instance(aligned.x, aligned_tilde.x, d, kind);
      } catch (const Error&) {
        row.rank_ok = false;
        row.sin_theta_computed = row.measured = row.measured_lower = row.measured_upper = kNaN;
        row.xi = row.xi_sharpened = row.slack = row.sampled_min = kNaN;
        rows.push_back(row);
        continue;
      }
      row.sin_theta_computed = rep.sin_theta;
      row.measured = rep.measured;
      row.measured_lower = rep.measured_lower;
      row.measured_upper = rep.measured_upper;
      row.xi = rep.xi;
      row.xi_sharpened = rep.xi_sharpened;
      row.slack = rep.slack;
      row.sigma_r = rep.sigma_r;
      row.sigma_r_tilde = rep.sigma_r_tilde;
      row.bound_ok = rep.measured <= rep.xi;
      row.closed_form_ok = std::abs(row.sin_theta - row.sin_theta_computed) <= 1e-9 * (1.0 + row.sin_theta);

      if (rep.regime == Regime::full_rank) {
        row.sampled_min = rep.measured;
        row.oracle_ok = true;
      } else {
        Rng rng = Rng::stream(config.seed, i, 2 + j);
        const AlignedBasisSet<double> set = align(aligned.x, d).set;
        row.sampled_min = sampled_member_min(set, aligned_tilde.x.matrix(), kind, config.w_samples, rng);
        // No member may beat the exact minimum or fall below the lower bound.
        const double floor = rep.measured_exact ? rep.measured : rep.measured_lower;
        row.oracle_ok = row.sampled_min >= floor - 1e-10 && rep.measured_lower <= rep.measured_upper;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  const auto& columns = sweep_columns();
  for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
  out << '\n';
  auto flag = [](bool b) { return b ? "1" : "0"; };
  for (const SweepRow& r : rows) {
    out << format_shortest(r.delta) << ',' << to_string(r.norm) << ',' << format_shortest(r.sin_theta) << ','
        << format_shortest(r.sin_theta_computed) << ',' << format_shortest(r.measured) << ','
        << format_shortest(r.measured_lower) << ',' << format_shortest(r.measured_upper) << ','
        << format_shortest(r.xi) << ',' << format_shortest(r.xi_sharpened) << ',' << format_shortest(r.slack) << ','
        << format_shortest(r.sigma_r) << ',' << format_shortest(r.sigma_r_tilde) << ','
        << format_shortest(r.sampled_min) << ',' << flag(r.rank_ok) << ',' << flag(r.bound_ok) << ','
        << flag(r.closed_form_ok) << ',' << flag(r.oracle_ok) << '\n';
  }
  return out.str();
}

namespace {

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxx > 0 ? sxy / sxx : kNaN;
}

}  // namespace

SweepSummary summarize(const std::vector<SweepRow>& rows) {
  SweepSummary summary;
  summary.all_rows_pass = !rows.empty();
  std::vector<NormKind> seen;
  for (const SweepRow& r : rows) {
    summary.all_rows_pass = summary.all_rows_pass && r.passed();
    if (std::find(seen.begin(), seen.end(), r.norm) == seen.end()) seen.push_back(r.norm);
  }
  for (NormKind kind : seen) {
    std::vector<double> deltas, measured, xis;
    NormSummary s;
    s.norm = kind;
    s.slack_min = std::numeric_limits<double>::infinity();
    s.slack_max = 0.0;
    for (const SweepRow& r : rows) {
      if (r.norm != kind || !r.rank_ok || !(r.measured > 0.0)) continue;
      deltas.push_back(r.delta);
      measured.push_back(r.measured);
      xis.push_back(r.xi);
      s.slack_min = std::min(s.slack_min, r.slack);
      s.slack_max = std::max(s.slack_max, r.slack);
    }
    s.measured_slope = deltas.size() >= 2 ? loglog_slope(deltas, measured) : kNaN;
    s.xi_slope = deltas.size() >= 2 ? loglog_slope(deltas, xis) : kNaN;
    summary.norms.push_back(s);
  }
  return summary;
}

namespace {

struct LogAxis {
  double lo, hi;   // decades (log10)
  double p0, p1;   // pixel range
  double map(double v) const { return p0 + (std::log10(v) - lo) / (hi - lo) * (p1 - p0); }
};

void polyline(std::ostringstream& svg, const std::vector<std::pair<double, double>>& pts, const LogAxis& ax,
              const LogAxis& ay, const char* color, const char* dash) {
  svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\"";
  if (dash) svg << " stroke-dasharray=\"" << dash << "\"";
  svg << " points=\"";
  for (const auto& [x, y] : pts) svg << ax.map(x) << ',' << ay.map(y) << ' ';
  svg << "\"/>\n";
}

}  // namespace

std::string sweep_svg(const std::vector<SweepRow>& rows, NormKind norm, const std::string& title) {
  std::vector<std::pair<double, double>> measured, xi, lower;
  bool interval = false;
  for (const SweepRow& r : rows) {
    if (r.norm != norm || !r.rank_ok || !(r.measured > 0.0) || !(r.xi > 0.0)) continue;
    measured.emplace_back(r.delta, r.measured);
    xi.emplace_back(r.delta, r.xi);
    if (r.measured_lower > 0.0) lower.emplace_back(r.delta, r.measured_lower);
    interval = interval || r.measured_lower < r.measured_upper;
  }

  constexpr double width = 640, height = 440, left = 80, right = 20, top = 40, bottom = 60;
  double xlo = 0, xhi = 1, ylo = 0, yhi = 1;
  if (!measured.empty()) {
    double xmin = measured.front().first, xmax = xmin, ymin = measured.front().second, ymax = ymin;
    for (const auto* series : {&measured, &xi, &lower}) {
      for (const auto& [x, y] : *series) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
    }
    xlo = std::floor(std::log10(xmin));
    xhi = std::ceil(std::log10(xmax));
    ylo = std::floor(std::log10(ymin));
    yhi = std::ceil(std::log10(ymax));
    if (xhi <= xlo) xhi = xlo + 1;
    if (yhi <= ylo) yhi = ylo + 1;
  }
  const LogAxis ax{xlo, xhi, left, width - right};
  const LogAxis ay{ylo, yhi, height - bottom, top};

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
  svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << width - left - right << "\" height=\""
      << height - top - bottom << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double e = xlo; e <= xhi + 0.5; e += 1.0) {
    const double px = ax.map(std::pow(10.0, e));
    svg << "<line x1=\"" << px << "\" y1=\"" << top << "\" x2=\"" << px << "\" y2=\"" << height - bottom
        << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << px << "\" y=\"" << height - bottom + 18 << "\" text-anchor=\"middle\">1e" << e
        << "</text>\n";
  }
  for (double e = ylo; e <= yhi + 0.5; e += 1.0) {
    const double py = ay.map(std::pow(10.0, e));
    svg << "<line x1=\"" << left << "\" y1=\"" << py << "\" x2=\"" << width - right << "\" y2=\"" << py
        << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << left - 8 << "\" y=\"" << py + 4 << "\" text-anchor=\"end\">1e" << e << "</text>\n";
  }
  svg << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 16
      << "\" text-anchor=\"middle\">delta</text>\n";

  polyline(svg, xi, ax, ay, "#c0392b", nullptr);
  polyline(svg, measured, ax, ay, "#2471a3", nullptr);
  if (interval) polyline(svg, lower, ax, ay, "#229954", "6,4");

  const double lx = left + 14;
  double ly = top + 18;
  auto legend = [&](const char* color, const char* dash, const char* label) {
    svg << "<line x1=\"" << lx << "\" y1=\"" << ly - 4 << "\" x2=\"" << lx + 28 << "\" y2=\"" << ly - 4
        << "\" stroke=\"" << color << "\" stroke-width=\"1.8\"";
    if (dash) svg << " stroke-dasharray=\"" << dash << "\"";
    svg << "/>\n<text x=\"" << lx + 36 << "\" y=\"" << ly << "\">" << label << "</text>\n";
    ly += 18;
  };
  legend("#c0392b", nullptr, "xi (bound)");
  legend("#2471a3", nullptr, interval ? "upper end of min ||X~ - Y||" : "min ||X~ - Y||");
  if (interval) legend("#229954", "6,4", "lower end of min ||X~ - Y||");
  svg << "</svg>\n";
  return svg.str();
}

void write_experiment(const std::filesystem::path& dir, const ExperimentConfig& config,
                      const std::vector<SweepRow>& rows) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::io_error, "cannot create " + dir.string());
  auto write = [&](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
    out << text;
  };
  write(dir / "sweep.csv", sweep_csv(rows));
  for (NormKind kind : config.norms) {
    const std::string name(to_string(kind));
    const std::string title = name + " norm, n=" + std::to_string(config.n) + ", k=" + std::to_string(config.k) +
                              ", r=" + std::to_string(config.k - config.rank_deficiency);
    write(dir / ("sweep_" + name + ".svg"), sweep_svg(rows, kind, title));
  }
  write(dir / "config.json", to_json(config).dump(2) + "\n");
}

}  // namespace dalign
