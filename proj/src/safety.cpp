#include "floodrisk/safety.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "floodrisk/errors.hpp"

namespace floodrisk {

void SafetyThresholds::validate() const {
  if (!(lower > 0 && lower < upper)) throw ConfigError("safety thresholds need 0 < lower < upper");
}

std::string_view safety_class_name(SafetyClass c) {
  switch (c) {
    case SafetyClass::DoesNotMeet: return "does_not_meet";
    case SafetyClass::Uncertain: return "uncertain";
    case SafetyClass::Meets: return "meets";
  }
  return "?";
}

double overtopping_return_period(const DistributionModel& model, double overtopping_peak) {
  const double exceedance = model.sf(overtopping_peak);
  if (!(exceedance > 0)) return std::numeric_limits<double>::infinity();
  return 1.0 / exceedance;
}

SafetyVerdict classify(const std::vector<double>& return_periods, const SafetyThresholds& thresholds,
                       Family model) {
  thresholds.validate();
  if (return_periods.empty()) throw DomainError("classify needs at least one return period");
  SafetyVerdict v;
  v.model = model;
  v.return_periods = return_periods;
  v.headline = SafetyClass::Meets;
  for (double t : return_periods) {
    if (!(t > 0)) throw DomainError("return periods must be positive");
    SafetyClass c = SafetyClass::Uncertain;
    if (t < thresholds.lower) c = SafetyClass::DoesNotMeet;
    if (t > thresholds.upper) c = SafetyClass::Meets;
    v.classes.push_back(c);
    v.headline = std::min(v.headline, c);
  }
  return v;
}

std::vector<HazardCurve> hazard_band(const std::vector<FittedModel>& fits,
                                     const std::vector<Hydrograph>& shapes,
                                     const ReservoirSpec& reservoir,
                                     const std::vector<double>& return_periods) {
  if (shapes.empty()) throw DomainError("hazard_band needs at least one hydrograph shape");
  std::vector<double> sorted = return_periods;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (double t : sorted) {
    if (!(t > 1)) throw DomainError("hazard_band return periods must exceed 1 year");
  }

  std::vector<HazardCurve> curves;
  for (const FittedModel& fit : fits) {
    HazardCurve curve;
    curve.model = fit.model.family();
    for (double t : sorted) {
      HazardPoint point;
      point.return_period = t;
      point.peak_flow = fit.model.quantile(1.0 - 1.0 / t);
      point.stage_min = std::numeric_limits<double>::infinity();
      point.stage_max = -std::numeric_limits<double>::infinity();
      for (const Hydrograph& shape : shapes) {
        RoutingTrace trace;
        try {
          trace = route_level_pool(scale_hydrograph(shape, point.peak_flow), reservoir);
        } catch (const std::exception& e) {
          std::ostringstream msg;
          msg << "routing failed for model " << family_name(curve.model) << ", hydrograph '"
              << shape.label << "', T=" << t << " years: " << e.what();
          throw RoutingError(msg.str());
        }
        point.stage_min = std::min(point.stage_min, trace.peak_stage);
        point.stage_max = std::max(point.stage_max, trace.peak_stage);
        point.overtopped = point.overtopped || trace.overtopped;
      }
      curve.points.push_back(point);
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

std::vector<QuantileComparisonRow> quantile_comparison(const DistributionModel& a,
                                                       const DistributionModel& b,
                                                       const std::vector<double>& return_periods) {
  std::vector<QuantileComparisonRow> rows;
  for (double t : return_periods) {
    if (!(t > 1)) throw DomainError("quantile_comparison return periods must exceed 1 year");
    QuantileComparisonRow r;
    r.return_period = t;
    r.quantile_a = a.quantile(1.0 - 1.0 / t);
    r.quantile_b = b.quantile(1.0 - 1.0 / t);
    r.return_period_of_a_under_b = overtopping_return_period(b, r.quantile_a);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace floodrisk
