#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "floodrisk/fitting.hpp"
#include "floodrisk/hydraulics.hpp"

namespace floodrisk {

struct SafetyThresholds {
  double lower = 131000.0;  // years
  double upper = 376000.0;

  void validate() const;
};

enum class SafetyClass { DoesNotMeet, Uncertain, Meets };

std::string_view safety_class_name(SafetyClass c);

struct SafetyVerdict {
  SafetyClass headline = SafetyClass::DoesNotMeet;  // worst class across hydrographs
  std::vector<double> return_periods;
  std::vector<SafetyClass> classes;
  Family model = Family::LP3;
};

// T = 1 / (1 - F(peak)); +infinity when the peak lies beyond the model's
// support.
double overtopping_return_period(const DistributionModel& model, double overtopping_peak);
inline double overtopping_return_period(const FittedModel& fit, double overtopping_peak) {
  return overtopping_return_period(fit.model, overtopping_peak);
}

// Per-return-period classes: T < lower does not meet, lower <= T <= upper is
// uncertain, T > upper meets. Throws DomainError for an empty list or T <= 0.
SafetyVerdict classify(const std::vector<double>& return_periods, const SafetyThresholds& thresholds,
                       Family model = Family::LP3);

struct HazardPoint {
  double return_period = 0.0;
  double peak_flow = 0.0;
  double stage_min = 0.0;
  double stage_max = 0.0;
  bool overtopped = false;  // any hydrograph shape overtops
};

struct HazardCurve {
  Family model = Family::LP3;
  std::vector<HazardPoint> points;
};

// For each T: peak = quantile(1 - 1/T), route every scaled shape and record
// the min/max peak stage. Routing errors are rethrown naming the scenario.
std::vector<HazardCurve> hazard_band(const std::vector<FittedModel>& fits,
                                     const std::vector<Hydrograph>& shapes,
                                     const ReservoirSpec& reservoir,
                                     const std::vector<double>& return_periods);

struct QuantileComparisonRow {
  double return_period = 0.0;
  double quantile_a = 0.0;
  double quantile_b = 0.0;
  double return_period_of_a_under_b = 0.0;
};

std::vector<QuantileComparisonRow> quantile_comparison(const DistributionModel& a,
                                                       const DistributionModel& b,
                                                       const std::vector<double>& return_periods);

}  // namespace floodrisk
