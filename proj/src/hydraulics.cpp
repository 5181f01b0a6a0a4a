#include "floodrisk/hydraulics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "floodrisk/errors.hpp"
#include "floodrisk/numeric.hpp"

namespace floodrisk {

namespace {

std::vector<std::pair<double, double>> read_two_columns(std::istream& in, const char* what) {
  std::vector<std::pair<double, double>> rows;
  std::string line;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line.front() == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double a = 0.0, b = 0.0;
    if (!(ss >> a >> b)) {
      if (!header_seen && rows.empty()) {
        header_seen = true;
        continue;
      }
      throw ParseError(std::string(what) + " CSV line " + std::to_string(line_no) +
                       ": expected two numeric columns");
    }
    rows.emplace_back(a, b);
  }
  if (rows.empty()) throw ParseError(std::string(what) + " CSV has no data rows");
  return rows;
}

double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  std::size_t i = 0;
  if (x >= xs.back()) {
    i = xs.size() - 2;
  } else if (x > xs.front()) {
    i = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin()) - 1;
  }
  const double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
  return ys[i] + t * (ys[i + 1] - ys[i]);
}

}  // namespace

// ---------------------------------------------------------------- Hydrograph

double Hydrograph::peak() const {
  return ordinates.empty() ? 0.0 : *std::max_element(ordinates.begin(), ordinates.end());
}

void Hydrograph::validate() const {
  if (!(step > 0)) throw DataError("hydrograph '" + label + "' needs a positive step");
  if (ordinates.size() < 2) throw DataError("hydrograph '" + label + "' needs at least two ordinates");
  for (double q : ordinates) {
    if (!(q >= 0) || !std::isfinite(q)) {
      throw DataError("hydrograph '" + label + "' has a negative or non-finite ordinate");
    }
  }
}

Hydrograph scale_hydrograph(const Hydrograph& h, double target_peak) {
  const double peak = h.peak();
  if (!(peak > 0)) throw DataError("cannot scale all-zero hydrograph '" + h.label + "'");
  if (!(target_peak > 0)) throw DataError("target peak must be positive");
  Hydrograph out = h;
  const double factor = target_peak / peak;
  for (double& q : out.ordinates) q *= factor;
  return out;
}

std::vector<double> cumulative_volume(const Hydrograph& h) {
  std::vector<double> out;
  out.reserve(h.ordinates.size());
  double total = 0.0;
  for (double q : h.ordinates) {
    total += q * h.step;
    out.push_back(total);
  }
  return out;
}

Hydrograph resample_hydrograph(const Hydrograph& h, double new_step) {
  if (!(new_step > 0)) throw DataError("resample step must be positive");
  std::vector<double> times(h.ordinates.size());
  for (std::size_t i = 0; i < times.size(); ++i) times[i] = static_cast<double>(i) * h.step;
  Hydrograph out;
  out.step = new_step;
  out.label = h.label;
  const double end = times.back();
  for (std::size_t i = 0;; ++i) {
    const double t = static_cast<double>(i) * new_step;
    if (t > end * (1 + 1e-12)) break;
    out.ordinates.push_back(interpolate(times, h.ordinates, std::min(t, end)));
  }
  return out;
}

Hydrograph gamma_pulse(std::string label, double peak_hours, double exponent, double duration_hours,
                       double step) {
  Hydrograph h;
  h.step = step;
  h.label = std::move(label);
  const auto n = static_cast<std::size_t>(std::llround(duration_hours * 3600.0 / step));
  for (std::size_t i = 0; i <= n; ++i) {
    const double u = static_cast<double>(i) * step / (peak_hours * 3600.0);
    h.ordinates.push_back(u > 0 ? std::exp(exponent * (std::log(u) + 1.0 - u)) : 0.0);
  }
  return h;
}

// ---------------------------------------------------------------- rating curves

RatingCurve::RatingCurve(std::vector<double> stages, std::vector<double> values)
    : stages_(std::move(stages)), values_(std::move(values)) {
  if (stages_.size() < 2 || stages_.size() != values_.size()) {
    throw DataError("rating curve needs at least two (stage, value) points");
  }
  for (std::size_t i = 1; i < stages_.size(); ++i) {
    if (!(stages_[i] > stages_[i - 1])) throw DataError("rating curve stages must be strictly increasing");
    if (values_[i] < values_[i - 1]) throw DataError("rating curve values must be non-decreasing");
  }
}

double RatingCurve::at(double stage) const { return interpolate(stages_, values_, stage); }

void ReservoirSpec::validate() const {
  if (!(initial_stage <= flood_pool_top && flood_pool_top < crest)) {
    throw DataError("reservoir needs initial_stage <= flood_pool_top < crest");
  }
  for (const RatingCurve* c : {&stage_storage, &stage_discharge}) {
    if (c->stages().empty() || c->min_stage() > initial_stage || c->max_stage() < crest) {
      throw DataError("rating curves must cover [initial_stage, crest]");
    }
  }
}

double RoutingTrace::mass_balance_error() const {
  if (!(inflow_volume > 0)) return std::abs(outflow_volume + storage_change);
  return std::abs(inflow_volume - outflow_volume - storage_change) / inflow_volume;
}

// ---------------------------------------------------------------- routing

RoutingTrace route_level_pool(const Hydrograph& inflow, const ReservoirSpec& reservoir) {
  inflow.validate();
  reservoir.validate();
  const double dt = inflow.step;
  const RatingCurve& storage = reservoir.stage_storage;
  const RatingCurve& outflow = reservoir.stage_discharge;
  const double low = std::max(storage.min_stage(), outflow.min_stage());
  const double top = std::min(storage.max_stage(), outflow.max_stage());
  const double span = top - low;
  const auto indication = [&](double h) { return storage.at(h) + 0.5 * dt * outflow.at(h); };

  RoutingTrace trace;
  const std::size_t n = inflow.ordinates.size();
  trace.stages.reserve(n);
  trace.outflows.reserve(n);
  double h = reservoir.initial_stage;
  double o = outflow.at(h);
  trace.stages.push_back(h);
  trace.outflows.push_back(o);

  for (std::size_t t = 1; t < n; ++t) {
    const double i_mean = 0.5 * (inflow.ordinates[t - 1] + inflow.ordinates[t]);
    const double target = storage.at(h) - 0.5 * dt * o + dt * i_mean;
    double next = h;
    if (indication(h) != target) {
      if (target < indication(low)) {
        std::ostringstream msg;
        msg << "stage fell below the lowest rating point (" << low << " m) at step " << t
            << " of '" << inflow.label << "'";
        throw RoutingError(msg.str());
      }
      double hi = std::max(h, top);
      double grow = std::max(span, 1.0);
      for (int k = 0; indication(hi) < target; ++k) {
        if (k > 60) throw RoutingError("rating curves cannot store the inflow volume");
        hi += grow;
        grow *= 2;
      }
      const double lo = target < indication(h) ? low : h;
      next = bisect_root([&](double s) { return indication(s) - target; }, lo, hi);
    }
    h = next;
    o = outflow.at(h);
    trace.stages.push_back(h);
    trace.outflows.push_back(o);
    trace.inflow_volume += dt * i_mean;
    trace.outflow_volume += 0.5 * dt * (trace.outflows[t - 1] + o);
  }

  trace.peak_stage = *std::max_element(trace.stages.begin(), trace.stages.end());
  trace.overtopped = trace.peak_stage > reservoir.crest;
  trace.extrapolated = trace.peak_stage > top;
  trace.storage_change = storage.at(trace.stages.back()) - storage.at(trace.stages.front());
  return trace;
}

OvertoppingResult find_overtopping_peak(const Hydrograph& shape, const ReservoirSpec& reservoir,
                                        const OvertoppingSearch& search) {
  const double reference = search.reference_peak > 0 ? search.reference_peak : shape.peak();
  if (!(reference > 0)) throw DataError("overtopping search needs a positive reference peak");
  const auto peak_stage = [&](double p) {
    return route_level_pool(scale_hydrograph(shape, p), reservoir).peak_stage;
  };

  OvertoppingResult result;
  double lo = search.floor_factor * reference;
  double hi = search.ceiling_factor * reference;
  result.ceiling = hi;
  double stage_lo = peak_stage(lo);
  if (stage_lo > reservoir.crest) {
    result.peak = lo;
    return result;
  }
  double stage_hi = peak_stage(hi);
  if (!(stage_hi > reservoir.crest)) return result;

  const double slack = 1e-9 * std::max(1.0, std::abs(reservoir.crest));
  while (hi - lo > search.rel_tol * hi) {
    const double mid = lo + 0.5 * (hi - lo);
    const double stage_mid = peak_stage(mid);
    ++result.iterations;
    if (stage_mid < stage_lo - slack || stage_mid > stage_hi + slack) {
      std::ostringstream msg;
      msg << "peak stage is not monotone in the scaled peak for '" << shape.label << "' near "
          << mid << " m^3/s";
      throw RoutingError(msg.str());
    }
    if (stage_mid > reservoir.crest) {
      hi = mid;
      stage_hi = stage_mid;
    } else {
      lo = mid;
      stage_lo = stage_mid;
    }
  }
  result.peak = hi;
  return result;
}

// ---------------------------------------------------------------- CSV

Hydrograph parse_hydrograph_csv(std::istream& in, std::string label, std::optional<double> step) {
  const auto rows = read_two_columns(in, "hydrograph");
  if (rows.size() < 2) throw ParseError("hydrograph CSV needs at least two rows");
  const double t0 = rows.front().first;
  const double native = rows[1].first - rows[0].first;
  bool uniform = native > 0;
  for (std::size_t i = 1; i < rows.size() && uniform; ++i) {
    const double dt = rows[i].first - rows[i - 1].first;
    uniform = std::abs(dt - native) <= 1e-6 * native;
  }
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!(rows[i].first > rows[i - 1].first)) throw ParseError("hydrograph times must increase");
  }
  if (uniform && (!step || std::abs(*step - native) <= 1e-9 * native)) {
    Hydrograph h;
    h.step = native;
    h.label = std::move(label);
    for (const auto& r : rows) h.ordinates.push_back(r.second);
    h.validate();
    return h;
  }
  if (!step) throw ParseError("hydrograph '" + label + "' has a non-constant step; set a resample step");
  std::vector<double> times, values;
  for (const auto& r : rows) {
    times.push_back(r.first - t0);
    values.push_back(r.second);
  }
  Hydrograph h;
  h.step = *step;
  h.label = std::move(label);
  for (std::size_t i = 0;; ++i) {
    const double t = static_cast<double>(i) * *step;
    if (t > times.back() * (1 + 1e-12)) break;
    h.ordinates.push_back(interpolate(times, values, std::min(t, times.back())));
  }
  h.validate();
  return h;
}

RatingCurve parse_rating_csv(std::istream& in) {
  const auto rows = read_two_columns(in, "rating curve");
  std::vector<double> stages, values;
  for (const auto& r : rows) {
    stages.push_back(r.first);
    values.push_back(r.second);
  }
  return RatingCurve(std::move(stages), std::move(values));
}

}  // namespace floodrisk
