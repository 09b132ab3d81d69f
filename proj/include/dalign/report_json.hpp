#pragma once

#include <json.hpp>

#include "dalign/perturbation_bounds.hpp"

namespace dalign {

/// BoundReport as a JSON object keyed by the report's field names. An
/// infinite slack (measured == 0) is written as null.
nlohmann::json to_json(const BoundReport<double>& report);

}  // namespace dalign
