#include "floodrisk/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "floodrisk/errors.hpp"

namespace floodrisk {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

const json& section(const json& j, const char* name) {
  static const json empty = json::object();
  if (!j.contains(name)) return empty;
  const json& s = j.at(name);
  if (!s.is_object()) throw ConfigError(std::string("config section '") + name + "' must be an object");
  return s;
}

template <class T>
T get_or(const json& j, const char* key, T fallback, const char* where) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key '") + where + "." + key + "' has the wrong type");
  }
}

std::optional<double> optional_number(const json& j, const char* key, const char* where) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return get_or<double>(j, key, 0.0, where);
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

std::ifstream open(const fs::path& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw ConfigError(std::string("cannot open ") + what + " file: " + path.string());
  return in;
}

AgeModel::Kind parse_age_kind(const std::string& s) {
  if (s == "uniform") return AgeModel::Kind::Uniform;
  if (s == "triangular") return AgeModel::Kind::Triangular;
  if (s == "fixed") return AgeModel::Kind::Fixed;
  throw ConfigError("errors.age_model must be uniform, triangular or fixed, got '" + s + "'");
}

}  // namespace

RunConfig parse_config(const std::string& text, const fs::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j,
                 {"schema_version", "description", "data", "censoring", "errors", "likelihood", "fit",
                  "hydrographs", "routing_step_s", "reservoir", "overtopping", "thresholds",
                  "assessment", "output_dir"},
                 "config");
  const int version = get_or<int>(j, "schema_version", 0, "config");
  if (version != kConfigSchemaVersion) {
    throw ConfigError("unsupported schema_version " + std::to_string(version) + " (expected " +
                      std::to_string(kConfigSchemaVersion) + ")");
  }

  RunConfig c;

  const json& data = section(j, "data");
  reject_unknown(data, {"rdb", "rdb_units", "historical_paleo"}, "data");
  if (!data.contains("rdb")) throw ConfigError("config key 'data.rdb' is required");
  c.rdb = resolve(base_dir, get_or<std::string>(data, "rdb", "", "data"));
  const std::string units = get_or<std::string>(data, "rdb_units", "cms", "data");
  if (units == "cfs") {
    c.rdb_factor = kCfsToCms;
  } else if (units != "cms") {
    throw ConfigError("data.rdb_units must be 'cfs' or 'cms', got '" + units + "'");
  }
  if (data.contains("historical_paleo") && !data.at("historical_paleo").is_null()) {
    c.historical_paleo = resolve(base_dir, get_or<std::string>(data, "historical_paleo", "", "data"));
  }

  const json& cens = section(j, "censoring");
  reject_unknown(cens, {"threshold_m3s", "record_length_years"}, "censoring");
  c.censoring_threshold = optional_number(cens, "threshold_m3s", "censoring");
  c.censoring_record_length = optional_number(cens, "record_length_years", "censoring");

  const json& err = section(j, "errors");
  reject_unknown(err, {"cv_gage", "cv_historical", "paleo_mode_fraction", "age_model"}, "errors");
  c.errors.cv_gage = get_or(err, "cv_gage", c.errors.cv_gage, "errors");
  c.errors.cv_historical = get_or(err, "cv_historical", c.errors.cv_historical, "errors");
  c.errors.paleo_mode_fraction = get_or(err, "paleo_mode_fraction", c.errors.paleo_mode_fraction, "errors");
  c.errors.age_kind = parse_age_kind(get_or<std::string>(err, "age_model", "uniform", "errors"));
  if (c.errors.cv_gage < 0 || c.errors.cv_historical < 0) {
    throw ConfigError("errors.cv_gage and errors.cv_historical must be >= 0");
  }

  const json& lik = section(j, "likelihood");
  reject_unknown(lik, {"gage_nodes", "historical_nodes", "age_nodes", "paleo_nodes"}, "likelihood");
  LikelihoodConfig& lc = c.fit.likelihood;
  lc.gage_nodes = get_or(lik, "gage_nodes", lc.gage_nodes, "likelihood");
  lc.historical_nodes = get_or(lik, "historical_nodes", lc.historical_nodes, "likelihood");
  lc.age_nodes = get_or(lik, "age_nodes", lc.age_nodes, "likelihood");
  lc.paleo_nodes = get_or(lik, "paleo_nodes", lc.paleo_nodes, "likelihood");
  for (int n : {lc.gage_nodes, lc.historical_nodes, lc.age_nodes, lc.paleo_nodes}) {
    if (n < 1 || n % 2 == 0) throw ConfigError("likelihood node counts must be odd and >= 1");
  }

  const json& fit = section(j, "fit");
  reject_unknown(fit,
                 {"families", "seeds", "population_size", "max_generations", "mutation_factor",
                  "crossover_rate", "convergence_tol", "stall_generations", "stall_tol", "lp3_space",
                  "min_spread_fraction"},
                 "fit");
  FitConfig& f = c.fit;
  f.seeds = get_or(fit, "seeds", f.seeds, "fit");
  f.population_size = get_or(fit, "population_size", f.population_size, "fit");
  f.max_generations = get_or(fit, "max_generations", f.max_generations, "fit");
  f.mutation_factor = get_or(fit, "mutation_factor", f.mutation_factor, "fit");
  f.crossover_rate = get_or(fit, "crossover_rate", f.crossover_rate, "fit");
  f.convergence_tol = get_or(fit, "convergence_tol", f.convergence_tol, "fit");
  f.stall_generations = get_or(fit, "stall_generations", f.stall_generations, "fit");
  f.stall_tol = get_or(fit, "stall_tol", f.stall_tol, "fit");
  f.min_spread_fraction = get_or(fit, "min_spread_fraction", f.min_spread_fraction, "fit");
  if (!(f.min_spread_fraction >= 0 && f.min_spread_fraction < 1)) {
    throw ConfigError("fit.min_spread_fraction must be in [0, 1)");
  }
  f.lp3_space = parse_lp3_space(get_or<std::string>(fit, "lp3_space", "log10", "fit"));
  for (const std::string& name :
       get_or<std::vector<std::string>>(fit, "families", {}, "fit")) {
    c.families.push_back(parse_family(name));
  }
  if (c.families.empty()) c.families.assign(kAllFamilies.begin(), kAllFamilies.end());
  f.validate(2);  // dimension-independent checks

  c.routing_step = get_or(j, "routing_step_s", c.routing_step, "config");
  if (!(c.routing_step > 0)) throw ConfigError("routing_step_s must be positive");
  if (j.contains("hydrographs")) {
    if (!j.at("hydrographs").is_array()) throw ConfigError("'hydrographs' must be an array");
    for (const json& h : j.at("hydrographs")) {
      reject_unknown(h, {"label", "path", "resample_step_s"}, "hydrographs[]");
      HydrographSource src;
      src.label = get_or<std::string>(h, "label", "", "hydrographs[]");
      if (src.label.empty() || !h.contains("path")) {
        throw ConfigError("every hydrograph needs a label and a path");
      }
      src.path = resolve(base_dir, get_or<std::string>(h, "path", "", "hydrographs[]"));
      src.resample_step = optional_number(h, "resample_step_s", "hydrographs[]");
      c.hydrographs.push_back(std::move(src));
    }
  }

  if (j.contains("reservoir")) {
    const json& r = section(j, "reservoir");
    reject_unknown(r, {"stage_storage", "stage_discharge", "initial_stage_m", "flood_pool_top_m", "crest_m"},
                   "reservoir");
    for (const char* key : {"stage_storage", "stage_discharge", "initial_stage_m", "flood_pool_top_m", "crest_m"}) {
      if (!r.contains(key)) throw ConfigError(std::string("config key 'reservoir.") + key + "' is required");
    }
    ReservoirSource src;
    src.stage_storage = resolve(base_dir, get_or<std::string>(r, "stage_storage", "", "reservoir"));
    src.stage_discharge = resolve(base_dir, get_or<std::string>(r, "stage_discharge", "", "reservoir"));
    src.initial_stage = get_or<double>(r, "initial_stage_m", 0.0, "reservoir");
    src.flood_pool_top = get_or<double>(r, "flood_pool_top_m", 0.0, "reservoir");
    src.crest = get_or<double>(r, "crest_m", 0.0, "reservoir");
    if (!(src.initial_stage <= src.flood_pool_top && src.flood_pool_top < src.crest)) {
      throw ConfigError("reservoir needs initial_stage_m <= flood_pool_top_m < crest_m");
    }
    c.reservoir = src;
  }

  const json& ot = section(j, "overtopping");
  reject_unknown(ot, {"reference_peak_m3s", "floor_factor", "ceiling_factor", "rel_tol"}, "overtopping");
  c.overtopping.reference_peak = get_or(ot, "reference_peak_m3s", 0.0, "overtopping");
  c.overtopping.floor_factor = get_or(ot, "floor_factor", c.overtopping.floor_factor, "overtopping");
  c.overtopping.ceiling_factor = get_or(ot, "ceiling_factor", c.overtopping.ceiling_factor, "overtopping");
  c.overtopping.rel_tol = get_or(ot, "rel_tol", c.overtopping.rel_tol, "overtopping");
  if (!(c.overtopping.floor_factor > 0 && c.overtopping.floor_factor < c.overtopping.ceiling_factor &&
        c.overtopping.rel_tol > 0)) {
    throw ConfigError("overtopping needs 0 < floor_factor < ceiling_factor and rel_tol > 0");
  }

  const json& th = section(j, "thresholds");
  reject_unknown(th, {"lower_years", "upper_years"}, "thresholds");
  c.thresholds.lower = get_or(th, "lower_years", c.thresholds.lower, "thresholds");
  c.thresholds.upper = get_or(th, "upper_years", c.thresholds.upper, "thresholds");
  c.thresholds.validate();

  const json& as = section(j, "assessment");
  reject_unknown(as,
                 {"hazard_return_periods", "curve_return_periods", "comparison_models",
                  "comparison_return_periods"},
                 "assessment");
  c.hazard_return_periods = get_or<std::vector<double>>(
      as, "hazard_return_periods", {10, 100, 1e3, 1e4, 1e5, 1e6}, "assessment");
  c.curve_return_periods = get_or<std::vector<double>>(
      as, "curve_return_periods",
      {1.01, 1.5, 2, 5, 10, 25, 50, 100, 200, 500, 1e3, 1e4, 1e5, 1e6}, "assessment");
  c.comparison_return_periods =
      get_or<std::vector<double>>(as, "comparison_return_periods", {100, 500, 1000}, "assessment");
  const auto pair = get_or<std::vector<std::string>>(as, "comparison_models", {"LP3", "MixedGEV"}, "assessment");
  if (pair.size() != 2) throw ConfigError("assessment.comparison_models must name two families");
  c.comparison_a = parse_family(pair[0]);
  c.comparison_b = parse_family(pair[1]);
  for (const auto* list : {&c.hazard_return_periods, &c.curve_return_periods, &c.comparison_return_periods}) {
    for (double t : *list) {
      if (!(t > 1)) throw ConfigError("assessment return periods must exceed 1 year");
    }
  }

  c.output_dir = resolve(base_dir, get_or<std::string>(j, "output_dir", "out", "config"));
  return c;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

PeakDataset load_dataset(const RunConfig& config) {
  auto rdb = open(config.rdb, "RDB");
  const RdbParseResult parsed = parse_usgs_rdb(rdb, {config.rdb_factor});
  HistoricalPaleoRecords records;
  if (!config.historical_paleo.empty()) {
    auto csv = open(config.historical_paleo, "historical/paleo");
    records = parse_historical_paleo_csv(csv);
  }
  const CensoringSpec censoring = default_censoring(parsed.peaks, records.historical,
                                                    config.censoring_threshold,
                                                    config.censoring_record_length);
  const PeakDataset raw(parsed.peaks, records.historical, censoring, records.paleo);
  return attach_error_models(raw, config.errors);
}

std::vector<Hydrograph> load_hydrographs(const RunConfig& config) {
  if (config.hydrographs.empty()) throw ConfigError("config lists no hydrographs");
  std::vector<Hydrograph> out;
  for (const HydrographSource& src : config.hydrographs) {
    auto in = open(src.path, "hydrograph");
    Hydrograph h = parse_hydrograph_csv(in, src.label, src.resample_step);
    if (std::abs(h.step - config.routing_step) > 1e-9 * config.routing_step) {
      if (!src.resample_step) {
        throw ConfigError("hydrograph '" + src.label + "' has step " + std::to_string(h.step) +
                          " s; set resample_step_s to the routing step");
      }
      h = resample_hydrograph(h, config.routing_step);
    }
    out.push_back(std::move(h));
  }
  return out;
}

ReservoirSpec load_reservoir(const RunConfig& config) {
  if (!config.reservoir) throw ConfigError("config has no reservoir section");
  const ReservoirSource& src = *config.reservoir;
  auto storage = open(src.stage_storage, "stage-storage");
  auto discharge = open(src.stage_discharge, "stage-discharge");
  ReservoirSpec r;
  r.stage_storage = parse_rating_csv(storage);
  r.stage_discharge = parse_rating_csv(discharge);
  r.initial_stage = src.initial_stage;
  r.flood_pool_top = src.flood_pool_top;
  r.crest = src.crest;
  r.validate();
  return r;
}

}  // namespace floodrisk
