#pragma once

#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace floodrisk {

// Discharge series at a fixed step.
struct Hydrograph {
  double step = 1800.0;            // seconds
  std::vector<double> ordinates;   // m^3/s
  std::string label;

  double peak() const;
  // Throws DataError unless step > 0, >= 2 ordinates, all ordinates >= 0.
  void validate() const;
};

// Piecewise-linear stage -> value table (storage in m^3 or discharge in m^3/s).
class RatingCurve {
 public:
  RatingCurve() = default;
  // Throws DataError unless stages are strictly increasing, values are
  // non-decreasing and there are at least two points.
  RatingCurve(std::vector<double> stages, std::vector<double> values);

  // Linear interpolation; linear extrapolation on the end segments.
  double at(double stage) const;
  double min_stage() const { return stages_.front(); }
  double max_stage() const { return stages_.back(); }
  const std::vector<double>& stages() const { return stages_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> stages_;
  std::vector<double> values_;
};

struct ReservoirSpec {
  RatingCurve stage_storage;
  RatingCurve stage_discharge;
  double initial_stage = 0.0;    // m
  double flood_pool_top = 0.0;   // m, emergency spillway crest
  double crest = 0.0;            // m, dam crest

  // Throws DataError unless initial <= flood_pool_top < crest and both
  // curves cover [initial_stage, crest].
  void validate() const;
};

struct RoutingTrace {
  std::vector<double> stages;    // end-of-step stage, one per inflow ordinate
  std::vector<double> outflows;  // m^3/s
  double peak_stage = 0.0;
  bool overtopped = false;
  // True when the stage went above the top tabulated rating point.
  bool extrapolated = false;
  double inflow_volume = 0.0;   // m^3, trapezoidal over the trace
  double outflow_volume = 0.0;
  double storage_change = 0.0;

  double mass_balance_error() const;  // |Vin - Vout - dS| / Vin
};

// Multiplies every ordinate by target_peak / peak. Throws DataError for an
// all-zero hydrograph or a non-positive target.
Hydrograph scale_hydrograph(const Hydrograph& h, double target_peak);

// Running sum of ordinate * step (rectangle rule), m^3.
std::vector<double> cumulative_volume(const Hydrograph& h);

// Linear resampling to a new step over the same duration.
Hydrograph resample_hydrograph(const Hydrograph& h, double new_step);

// Storage-indication (modified Puls) level-pool routing. Each step solves
//   S(h1) + dt/2 O(h1) = S(h0) - dt/2 O(h0) + dt (I0 + I1)/2
// for the end-of-step stage by bisection. Throws RoutingError when the stage
// would leave the tabulated range below the crest.
RoutingTrace route_level_pool(const Hydrograph& inflow, const ReservoirSpec& reservoir);

struct OvertoppingSearch {
  // Flood-of-record peak that anchors the search range; 0 uses the shape's
  // own peak.
  double reference_peak = 0.0;
  double floor_factor = 1e-6;   // lower bracket = floor_factor * reference
  double ceiling_factor = 1000.0;
  double rel_tol = 1e-4;
};

struct OvertoppingResult {
  // Minimal overtopping peak, m^3/s; empty when the dam does not overtop
  // even at the ceiling.
  std::optional<double> peak;
  double ceiling = 0.0;
  int iterations = 0;
};

// Smallest target peak whose scaled hydrograph overtops the crest (bisection
// on the peak). Throws RoutingError if peak stage is found to decrease with
// scale during the search.
OvertoppingResult find_overtopping_peak(const Hydrograph& shape, const ReservoirSpec& reservoir,
                                        const OvertoppingSearch& search = {});

// ---------------------------------------------------------------- CSV I/O

// Columns time_s, discharge_m3s. A non-uniform or different step is
// resampled to `step` when given, otherwise a constant step is required.
Hydrograph parse_hydrograph_csv(std::istream& in, std::string label,
                                std::optional<double> step = std::nullopt);

// Two columns: stage_m and storage_m3 or discharge_m3s.
RatingCurve parse_rating_csv(std::istream& in);

// Synthetic three-day gamma-pulse shape with unit peak at peak_hours:
// q(t) = (t/tp)^m exp(m (1 - t/tp)). Smaller m gives a larger volume to peak
// ratio.
Hydrograph gamma_pulse(std::string label, double peak_hours, double exponent,
                       double duration_hours = 72.0, double step = 1800.0);

}  // namespace floodrisk
