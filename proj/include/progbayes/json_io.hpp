#pragma once

#include <json.hpp>

#include "progbayes/estimators.hpp"
#include "progbayes/prior_elicitation.hpp"
#include "progbayes/theory.hpp"

namespace progbayes {

nlohmann::json report_to_json(const AnalysisReport& report);

nlohmann::json prior_estimate_to_json(const PriorEstimate& estimate);

/// Reads back a PriorEstimate emitted by prior_estimate_to_json. Only the
/// lambda field is required; diagnostics are optional.
PriorEstimate prior_estimate_from_json(const nlohmann::json& j);

nlohmann::json theory_row_to_json(const OperatingPoint& point, const TheoryOutput& output);

}  // namespace progbayes
