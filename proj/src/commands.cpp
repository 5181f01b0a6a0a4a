#include "floodrisk/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "floodrisk/errors.hpp"
#include "floodrisk/serialization.hpp"

namespace floodrisk {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  if (!out) throw ConfigError("failed writing " + path.string());
}

fs::path prepare_output(const RunConfig& config) {
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + config.output_dir.string() + ": " + ec.message());
  return config.output_dir;
}

std::string file_label(const std::string& label) {
  std::string s = label;
  for (char& c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
  }
  return s;
}

std::string_view source_name(PlottingPoint::Source s) {
  switch (s) {
    case PlottingPoint::Source::Gage: return "gage";
    case PlottingPoint::Source::Historical: return "historical";
    case PlottingPoint::Source::Paleo: return "paleo";
  }
  return "gage";
}

std::string empirical_csv(const PeakDataset& dataset) {
  std::ostringstream s;
  s << "source,year,discharge_m3s,return_period_years\n";
  for (const PlottingPoint& p : empirical_return_periods(dataset)) {
    s << source_name(p.source) << ',' << p.year << ',' << num(p.discharge) << ',' << num(p.return_period) << '\n';
  }
  return s.str();
}

std::string frequency_curve_csv(std::span<const FittedModel> fits, const std::vector<double>& periods) {
  std::ostringstream s;
  s << "model,return_period_years,quantile_m3s\n";
  for (const FittedModel& f : fits) {
    for (double t : periods) {
      s << family_name(f.model.family()) << ',' << num(t) << ',' << num(f.model.quantile(1.0 - 1.0 / t)) << '\n';
    }
  }
  return s.str();
}

std::string hazard_band_csv(const std::vector<HazardCurve>& curves) {
  std::ostringstream s;
  s << "model,return_period_years,peak_flow_m3s,stage_min_m,stage_max_m,overtopped_flag\n";
  for (const HazardCurve& c : curves) {
    for (const HazardPoint& p : c.points) {
      s << family_name(c.model) << ',' << num(p.return_period) << ',' << num(p.peak_flow) << ','
        << num(p.stage_min) << ',' << num(p.stage_max) << ',' << (p.overtopped ? 1 : 0) << '\n';
    }
  }
  return s.str();
}

std::string cumulative_volume_csv(const std::vector<Hydrograph>& shapes, double peak) {
  std::ostringstream s;
  s << "hydrograph,time_s,discharge_m3s,cumulative_volume_m3\n";
  for (const Hydrograph& shape : shapes) {
    const Hydrograph h = scale_hydrograph(shape, peak);
    const auto v = cumulative_volume(h);
    for (std::size_t i = 0; i < h.ordinates.size(); ++i) {
      s << h.label << ',' << num(h.step * static_cast<double>(i)) << ',' << num(h.ordinates[i]) << ',' << num(v[i])
        << '\n';
    }
  }
  return s.str();
}

std::string comparison_csv(const Assessment& a) {
  std::ostringstream s;
  s << "return_period_years,quantile_" << family_name(a.comparison_a) << "_m3s,quantile_"
    << family_name(a.comparison_b) << "_m3s,return_period_under_" << family_name(a.comparison_b) << "_years\n";
  for (const QuantileComparisonRow& r : a.comparison) {
    s << num(r.return_period) << ',' << num(r.quantile_a) << ',' << num(r.quantile_b) << ','
      << num(r.return_period_of_a_under_b) << '\n';
  }
  return s.str();
}

std::optional<std::vector<FittedModel>> try_load_fits(const RunConfig& config) {
  for (Family f : config.families) {
    if (!fs::exists(config.output_dir / fit_artifact_name(f))) return std::nullopt;
  }
  return load_fit_artifacts(config.output_dir, config.families);
}

}  // namespace

RunConfig apply_overrides(RunConfig config, const CommandOptions& options) {
  if (options.seeds) {
    if (options.seeds->empty()) throw ConfigError("--seed-list must name at least one seed");
    config.fit.seeds = *options.seeds;
  }
  if (options.out_dir) config.output_dir = *options.out_dir;
  config.families = select_families(config, options.family);
  return config;
}

std::vector<Family> select_families(const RunConfig& config, const std::optional<std::string>& name) {
  if (!name || *name == "all") return config.families;
  return {parse_family(*name)};
}

std::string fit_artifact_name(Family family) { return "fit_" + std::string(family_name(family)) + ".json"; }

std::vector<FittedModel> load_fit_artifacts(const fs::path& dir, std::span<const Family> families) {
  std::vector<FittedModel> fits;
  for (Family f : families) {
    const fs::path path = dir / fit_artifact_name(f);
    std::ifstream in(path);
    if (!in) {
      throw ConfigError("missing fit artifact " + path.string() + "; run `floodrisk fit` with the same config first");
    }
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw ParseError("cannot parse " + path.string() + ": " + e.what());
    }
    FittedModel fit = fitted_model_from_json(j);
    if (fit.model.family() != f) throw ParseError(path.string() + " holds a " + std::string(family_name(fit.model.family())) + " fit");
    fits.push_back(std::move(fit));
  }
  return fits;
}

std::string summary_table(std::span<const FittedModel> fits) {
  std::vector<std::size_t> order(fits.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  if (!fits.empty()) order = rank_models(fits).by_bic;
  std::ostringstream s;
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %2s %12s %12s %12s %s\n", "model", "k", "loglik", "BIC", "AIC", "converged");
  s << line;
  for (std::size_t i : order) {
    const FittedModel& f = fits[i];
    std::snprintf(line, sizeof line, "%-10s %2zu %12.3f %12.3f %12.3f %s\n",
                  std::string(family_name(f.model.family())).c_str(), f.parameter_count, f.loglik, f.bic, f.aic,
                  f.converged ? "yes" : "no");
    s << line;
  }
  return s.str();
}

double reference_peak(const RunConfig& config, const PeakDataset& dataset) {
  if (config.overtopping.reference_peak > 0) return config.overtopping.reference_peak;
  double peak = 0.0;
  for (const AnnualPeak& p : dataset.peaks()) peak = std::max(peak, p.discharge);
  if (!(peak > 0)) throw DataError("no positive gaged peak to anchor hydrograph scaling");
  return peak;
}

Assessment assess(std::span<const FittedModel> fits, const std::vector<Hydrograph>& shapes,
                  const ReservoirSpec& reservoir, const RunConfig& config, double reference) {
  if (fits.empty()) throw DomainError("assessment needs at least one fitted model");
  if (shapes.empty()) throw DomainError("assessment needs at least one hydrograph");
  OvertoppingSearch search = config.overtopping;
  search.reference_peak = reference;
  std::vector<std::optional<double>> peaks;
  for (const Hydrograph& shape : shapes) peaks.push_back(find_overtopping_peak(shape, reservoir, search).peak);

  Assessment a;
  a.comparison_a = config.comparison_a;
  a.comparison_b = config.comparison_b;
  for (const FittedModel& fit : fits) {
    std::vector<double> periods;
    for (std::size_t s = 0; s < shapes.size(); ++s) {
      periods.push_back(peaks[s] ? overtopping_return_period(fit, *peaks[s]) : std::numeric_limits<double>::infinity());
    }
    SafetyVerdict v = classify(periods, config.thresholds, fit.model.family());
    for (std::size_t s = 0; s < shapes.size(); ++s) {
      a.rows.push_back({fit.model.family(), shapes[s].label, peaks[s], periods[s], v.classes[s]});
    }
    a.verdicts.push_back(std::move(v));
  }
  a.hazard = hazard_band(std::vector<FittedModel>(fits.begin(), fits.end()), shapes, reservoir,
                         config.hazard_return_periods);

  const auto find = [&](Family f) -> const FittedModel* {
    for (const FittedModel& fit : fits) {
      if (fit.model.family() == f) return &fit;
    }
    return nullptr;
  };
  const FittedModel* fa = find(config.comparison_a);
  const FittedModel* fb = find(config.comparison_b);
  if (fa && fb) a.comparison = quantile_comparison(fa->model, fb->model, config.comparison_return_periods);
  return a;
}

json to_json(const Assessment& a) {
  json rows = json::array();
  for (const AssessmentRow& r : a.rows) {
    rows.push_back({{"model", std::string(family_name(r.model))},
                    {"hydrograph", r.hydrograph},
                    {"overtopping_peak_m3s", r.overtopping_peak ? json(*r.overtopping_peak) : json(nullptr)},
                    {"return_period_years", finite_or_null(r.return_period)},
                    {"class", std::string(safety_class_name(r.safety_class))}});
  }
  json verdicts = json::array();
  for (const SafetyVerdict& v : a.verdicts) verdicts.push_back(to_json(v));
  json hazard = json::array();
  for (const HazardCurve& c : a.hazard) hazard.push_back(to_json(c));
  json comparison = json::array();
  for (const QuantileComparisonRow& r : a.comparison) {
    comparison.push_back({{"return_period_years", r.return_period},
                          {"quantile_a_m3s", r.quantile_a},
                          {"quantile_b_m3s", r.quantile_b},
                          {"return_period_of_a_under_b_years", finite_or_null(r.return_period_of_a_under_b)}});
  }
  return {{"rows", rows},
          {"verdicts", verdicts},
          {"hazard_curves", hazard},
          {"quantile_comparison",
           {{"a", std::string(family_name(a.comparison_a))},
            {"b", std::string(family_name(a.comparison_b))},
            {"rows", comparison}}}};
}

// ---------------------------------------------------------------- subcommands

int cmd_fit(const RunConfig& base, const CommandOptions& options, std::ostream& out, std::ostream& err) {
  const RunConfig config = apply_overrides(base, options);
  const PeakDataset dataset = load_dataset(config);
  const fs::path dir = prepare_output(config);

  std::vector<FittedModel> fits;
  bool failed = false;
  for (Family f : config.families) {
    try {
      FittedModel fit = fit_mle(f, dataset, config.fit);
      write_file(dir / fit_artifact_name(f), to_json(fit).dump(2) + "\n");
      if (!fit.converged) err << "warning: " << family_name(f) << " seeds disagree beyond convergence_tol\n";
      fits.push_back(std::move(fit));
    } catch (const std::exception& e) {
      err << "error: fit " << family_name(f) << " failed: " << e.what() << '\n';
      failed = true;
    }
  }

  std::ostringstream csv;
  csv << "model,k,n,loglik,bic,aic,bic_minus_aic,converged\n";
  if (!fits.empty()) {
    for (std::size_t i : rank_models(fits).by_bic) {
      const FittedModel& f = fits[i];
      csv << family_name(f.model.family()) << ',' << f.parameter_count << ',' << f.record_count << ','
          << num(f.loglik) << ',' << num(f.bic) << ',' << num(f.aic) << ',' << num(f.bic - f.aic) << ','
          << (f.converged ? 1 : 0) << '\n';
    }
  }
  write_file(dir / "fit_summary.csv", csv.str());
  out << summary_table(fits);
  return failed ? 1 : 0;
}

int cmd_rank(const RunConfig& base, const CommandOptions& options, std::ostream& out, std::ostream&) {
  const RunConfig config = apply_overrides(base, options);
  const std::vector<FittedModel> fits = load_fit_artifacts(config.output_dir, config.families);
  const Ranking ranking = rank_models(fits);
  std::ostringstream csv;
  csv << "criterion,rank,model,value\n";
  const auto emit = [&](const char* name, const std::vector<std::size_t>& order, double FittedModel::*field) {
    out << "by " << name << ":\n";
    for (std::size_t r = 0; r < order.size(); ++r) {
      const FittedModel& f = fits[order[r]];
      out << "  " << r + 1 << ". " << family_name(f.model.family()) << "  " << num(f.*field) << '\n';
      csv << name << ',' << r + 1 << ',' << family_name(f.model.family()) << ',' << num(f.*field) << '\n';
    }
  };
  emit("AIC", ranking.by_aic, &FittedModel::aic);
  emit("BIC", ranking.by_bic, &FittedModel::bic);
  write_file(prepare_output(config) / "ranking.csv", csv.str());
  return 0;
}

int cmd_route(const RunConfig& base, const CommandOptions& options, std::ostream& out, std::ostream& err) {
  const RunConfig config = apply_overrides(base, options);
  const PeakDataset dataset = load_dataset(config);
  const std::vector<Hydrograph> shapes = load_hydrographs(config);
  const ReservoirSpec reservoir = load_reservoir(config);
  const fs::path dir = prepare_output(config);
  const double reference = reference_peak(config, dataset);
  OvertoppingSearch search = config.overtopping;
  search.reference_peak = reference;

  std::ostringstream summary;
  summary << "hydrograph,reference_peak_m3s,peak_stage_m,mass_balance_error,overtopping_peak_m3s\n";
  out << "reference peak " << num(reference) << " m3/s\n";
  for (const Hydrograph& shape : shapes) {
    const RoutingTrace trace = route_level_pool(scale_hydrograph(shape, reference), reservoir);
    const Hydrograph scaled = scale_hydrograph(shape, reference);
    std::ostringstream csv;
    csv << "time_s,inflow_m3s,outflow_m3s,stage_m\n";
    for (std::size_t i = 0; i < scaled.ordinates.size(); ++i) {
      csv << num(scaled.step * static_cast<double>(i)) << ',' << num(scaled.ordinates[i]) << ','
          << num(trace.outflows[i]) << ',' << num(trace.stages[i]) << '\n';
    }
    write_file(dir / ("route_" + file_label(shape.label) + ".csv"), csv.str());
    if (trace.extrapolated) err << "warning: " << shape.label << " stage exceeds the rating tables\n";

    const OvertoppingResult ot = find_overtopping_peak(shape, reservoir, search);
    summary << shape.label << ',' << num(reference) << ',' << num(trace.peak_stage) << ','
            << num(trace.mass_balance_error()) << ',' << (ot.peak ? num(*ot.peak) : std::string()) << '\n';
    out << "  " << shape.label << ": peak stage " << num(trace.peak_stage) << " m, overtopping peak "
        << (ot.peak ? num(*ot.peak) + " m3/s" : "none below " + num(ot.ceiling) + " m3/s") << '\n';
  }
  write_file(dir / "overtopping.csv", summary.str());
  write_file(dir / "cumulative_volume.csv", cumulative_volume_csv(shapes, reference));
  return 0;
}

int cmd_assess(const RunConfig& base, const CommandOptions& options, std::ostream& out, std::ostream&) {
  const RunConfig config = apply_overrides(base, options);
  const std::vector<FittedModel> fits = load_fit_artifacts(config.output_dir, config.families);
  const PeakDataset dataset = load_dataset(config);
  const std::vector<Hydrograph> shapes = load_hydrographs(config);
  const ReservoirSpec reservoir = load_reservoir(config);
  const fs::path dir = prepare_output(config);
  const double reference = reference_peak(config, dataset);

  const Assessment a = assess(fits, shapes, reservoir, config, reference);
  json report = to_json(a);
  report["schema_version"] = kConfigSchemaVersion;
  report["reference_peak_m3s"] = reference;
  report["thresholds"] = {{"lower_years", config.thresholds.lower}, {"upper_years", config.thresholds.upper}};
  write_file(dir / "assessment.json", report.dump(2) + "\n");

  std::ostringstream rows;
  rows << "model,hydrograph,overtopping_peak_m3s,return_period_years,class\n";
  char line[200];
  std::snprintf(line, sizeof line, "%-10s %-16s %16s %16s %s\n", "model", "hydrograph", "overtop_m3s", "T_years",
                "class");
  out << line;
  for (const AssessmentRow& r : a.rows) {
    const std::string peak = r.overtopping_peak ? num(*r.overtopping_peak) : "";
    const std::string_view cls = safety_class_name(r.safety_class);
    rows << family_name(r.model) << ',' << r.hydrograph << ',' << peak << ',' << num(r.return_period) << ',' << cls
         << '\n';
    std::snprintf(line, sizeof line, "%-10s %-16s %16s %16s %s\n", std::string(family_name(r.model)).c_str(),
                  r.hydrograph.c_str(), peak.empty() ? "-" : peak.c_str(), num(r.return_period).c_str(),
                  std::string(cls).c_str());
    out << line;
  }
  for (const SafetyVerdict& v : a.verdicts) {
    out << family_name(v.model) << " headline: " << safety_class_name(v.headline) << '\n';
  }
  write_file(dir / "safety.csv", rows.str());
  write_file(dir / "hazard_band.csv", hazard_band_csv(a.hazard));
  write_file(dir / "frequency_curve.csv", frequency_curve_csv(fits, config.curve_return_periods));
  write_file(dir / "empirical.csv", empirical_csv(dataset));
  write_file(dir / "quantile_comparison.csv", comparison_csv(a));
  return 0;
}

int cmd_plot_data(const RunConfig& base, const CommandOptions& options, std::ostream& out, std::ostream& err) {
  const RunConfig config = apply_overrides(base, options);
  const PeakDataset dataset = load_dataset(config);
  const fs::path dir = prepare_output(config);
  write_file(dir / "empirical.csv", empirical_csv(dataset));
  out << "wrote empirical.csv\n";

  std::optional<std::vector<Hydrograph>> shapes;
  if (!config.hydrographs.empty()) {
    shapes = load_hydrographs(config);
    write_file(dir / "cumulative_volume.csv", cumulative_volume_csv(*shapes, reference_peak(config, dataset)));
    out << "wrote cumulative_volume.csv\n";
  }

  const auto fits = try_load_fits(config);
  if (!fits) {
    err << "note: fit artifacts missing in " << config.output_dir.string()
        << "; run `floodrisk fit` to add frequency_curve.csv and hazard_band.csv\n";
    return 0;
  }
  write_file(dir / "frequency_curve.csv", frequency_curve_csv(*fits, config.curve_return_periods));
  out << "wrote frequency_curve.csv\n";
  if (shapes && config.reservoir) {
    const auto curves = hazard_band(*fits, *shapes, load_reservoir(config), config.hazard_return_periods);
    write_file(dir / "hazard_band.csv", hazard_band_csv(curves));
    out << "wrote hazard_band.csv\n";
  }
  return 0;
}

}  // namespace floodrisk
