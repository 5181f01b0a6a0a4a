#include "floodrisk/serialization.hpp"

#include <cmath>

#include "floodrisk/errors.hpp"

namespace floodrisk {

using nlohmann::json;

namespace {

bool uses_lp3(Family f) { return f == Family::LP3 || f == Family::MixedLP3; }

// JSON has no infinity; infinite return periods are written as null.
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

json to_json(const DistributionModel& model) {
  json j;
  j["family"] = std::string(family_name(model.family()));
  j["params"] = std::vector<double>(model.params().begin(), model.params().end());
  if (uses_lp3(model.family())) j["lp3_space"] = std::string(lp3_space_name(model.lp3_space()));
  return j;
}

DistributionModel model_from_json(const json& j) {
  try {
    const Family family = parse_family(j.at("family").get<std::string>());
    const auto params = j.at("params").get<std::vector<double>>();
    const Lp3Space space =
        j.contains("lp3_space") ? parse_lp3_space(j.at("lp3_space").get<std::string>()) : Lp3Space::Log10;
    return DistributionModel(family, params, space);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid distribution JSON: ") + e.what());
  }
}

json to_json(const FittedModel& fit) {
  json j = to_json(fit.model);
  j["loglik"] = fit.loglik;
  j["aic"] = fit.aic;
  j["bic"] = fit.bic;
  j["k"] = fit.parameter_count;
  j["n"] = fit.record_count;
  j["converged"] = fit.converged;
  json seeds = json::array();
  for (const SeedResult& s : fit.per_seed) {
    seeds.push_back({{"seed", s.seed},
                     {"loglik", finite_or_null(s.loglik)},
                     {"params", s.params},
                     {"generations", s.generations}});
  }
  j["per_seed"] = seeds;
  return j;
}

FittedModel fitted_model_from_json(const json& j) {
  try {
    FittedModel fit{model_from_json(j), j.at("loglik").get<double>(), j.at("aic").get<double>(),
                    j.at("bic").get<double>(), j.at("k").get<std::size_t>(),
                    j.at("n").get<std::size_t>(), {}, j.at("converged").get<bool>()};
    for (const json& s : j.value("per_seed", json::array())) {
      SeedResult r;
      r.seed = s.at("seed").get<std::uint64_t>();
      r.loglik = s.at("loglik").is_null() ? kInfeasibleLogLik : s.at("loglik").get<double>();
      r.params = s.at("params").get<std::vector<double>>();
      r.generations = s.value("generations", std::size_t{0});
      fit.per_seed.push_back(std::move(r));
    }
    return fit;
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid fitted-model JSON: ") + e.what());
  }
}

json to_json(const SafetyVerdict& verdict) {
  json j;
  j["model"] = std::string(family_name(verdict.model));
  j["headline"] = std::string(safety_class_name(verdict.headline));
  json rows = json::array();
  for (std::size_t i = 0; i < verdict.return_periods.size(); ++i) {
    rows.push_back({{"return_period_years", finite_or_null(verdict.return_periods[i])},
                    {"class", std::string(safety_class_name(verdict.classes[i]))}});
  }
  j["per_hydrograph"] = rows;
  return j;
}

json to_json(const HazardCurve& curve) {
  json j;
  j["model"] = std::string(family_name(curve.model));
  json pts = json::array();
  for (const HazardPoint& p : curve.points) {
    pts.push_back({{"return_period_years", p.return_period},
                   {"peak_flow_m3s", p.peak_flow},
                   {"stage_min_m", p.stage_min},
                   {"stage_max_m", p.stage_max},
                   {"overtopped", p.overtopped}});
  }
  j["points"] = pts;
  return j;
}

}  // namespace floodrisk
