#pragma once

// File formats: model input JSON, solution JSON, residual reports and
// simulator path logs. Doubles are written losslessly (shortest round-trip
// form in JSON, 17 significant digits in CSV).

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dualdiv/closed_form.hpp"
#include "dualdiv/hjb.hpp"
#include "dualdiv/model.hpp"
#include "dualdiv/simulate.hpp"

namespace dualdiv::io {

using nlohmann::json;

/// "%.17g", locale independent.
std::string format_double(double v);

LevyMeasureSpec levy_from_json(const json& j);
json levy_to_json(const LevyMeasureSpec& spec);

/// Parses {"c", "lambda", "beta", "discount": {...}}; unknown fields and
/// wrong types throw InvalidInput. Does not validate ranges.
std::pair<DualModelParams, DiscountSpec> model_from_json(const json& j);
json model_to_json(const DualModelParams& params, const DiscountSpec& disc);

/// model_from_json + validate.
ValidatedModel load_model(const std::string& path);

json solution_to_json(const ThresholdSolution& sol, const DualModelParams& params);
json solution_to_json(const BarrierSolution& sol, const DualModelParams& params);
ThresholdSolution threshold_from_json(const json& j);
BarrierSolution barrier_from_json(const json& j);

/// The "params" block recorded with a solution.
DualModelParams solution_params(const json& j);

json report_to_json(const ResidualReport& rep);
/// Columns: x, residual_or_operator, gradient_slack, branch.
void write_report_csv(std::ostream& os, const ResidualReport& rep);

/// Columns: t_event, event_type, surplus_before, surplus_after, dividend_paid, discount_weight.
void write_path_log_csv(std::ostream& os, const std::vector<PathEvent>& events);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace dualdiv::io
