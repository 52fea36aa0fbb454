#pragma once

// JSON forms of the public records. Doubles round-trip exactly
// (shortest representation, up to 17 significant digits).

#include "useries/estimators.hpp"
#include "useries/measure.hpp"
#include "useries/sog.hpp"

#include <json.hpp>

namespace useries {

struct ParameterPlan;

nlohmann::json to_json(const SogParams& params);
/// Rebuilds with a prescribed cutoff; the fields are not re-solved.
SogParams params_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ErrorBreakdown& breakdown);
nlohmann::json to_json(const ErrorReport& report);
nlohmann::json to_json(const ParameterPlan& plan);
nlohmann::json to_json(const Vec3& v);

} // namespace useries
