#pragma once

#include <json.hpp>

#include "floodrisk/fitting.hpp"
#include "floodrisk/safety.hpp"

namespace floodrisk {

// {"family": "GEV", "params": [...]} plus "lp3_space" for the LP3 families.
nlohmann::json to_json(const DistributionModel& model);
DistributionModel model_from_json(const nlohmann::json& j);

// Model fields plus loglik, aic, bic, k, n, converged and per-seed results.
nlohmann::json to_json(const FittedModel& fit);
FittedModel fitted_model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SafetyVerdict& verdict);
nlohmann::json to_json(const HazardCurve& curve);

}  // namespace floodrisk
