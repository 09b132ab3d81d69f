#include "dalign/report_json.hpp"

#include <cmath>
#include <string>

namespace dalign {

nlohmann::json to_json(const BoundReport<double>& report) {
  nlohmann::json j;
  j["kind"] = std::string(to_string(report.kind));
  j["regime"] = std::string(to_string(report.regime));
  j["eta_branch"] = std::string(to_string(report.eta_branch));
  j["r"] = report.r;
  j["k"] = report.k;
  j["sigma_r"] = report.sigma_r;
  j["sigma_r_tilde"] = report.sigma_r_tilde;
  j["d_norm"] = report.d_norm;
  j["rank_tolerance"] = report.rank_tolerance;
  j["sin_theta"] = report.sin_theta;
  j["sin_theta_truncated"] = report.sin_theta_truncated;
  j["eta"] = report.eta;
  j["xi"] = report.xi;
  j["xi_sharpened"] = report.xi_sharpened;
  j["measured"] = report.measured;
  j["measured_lower"] = report.measured_lower;
  j["measured_upper"] = report.measured_upper;
  j["measured_exact"] = report.measured_exact;
  j["slack"] = std::isfinite(report.slack) ? nlohmann::json(report.slack) : nlohmann::json(nullptr);
  return j;
}

}  // namespace dalign
