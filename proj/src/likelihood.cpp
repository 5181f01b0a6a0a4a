#include "floodrisk/likelihood.hpp"

#include <cmath>
#include <numeric>

#include "floodrisk/errors.hpp"
#include "floodrisk/numeric.hpp"

namespace floodrisk {

namespace {

void check_node_count(int node_count) {
  if (node_count < 1 || node_count % 2 == 0) {
    throw ConfigError("node count must be odd and >= 1, got " + std::to_string(node_count));
  }
}

void normalize(DiscretizedError& d) {
  const double total = std::accumulate(d.weights.begin(), d.weights.end(), 0.0);
  for (double& w : d.weights) w /= total;
}

// Cell midpoints of [lower, upper] weighted by the triangular density.
DiscretizedError triangular_nodes(double lower, double upper, double mode, int node_count) {
  DiscretizedError d;
  const double width = (upper - lower) / node_count;
  for (int i = 0; i < node_count; ++i) {
    const double x = lower + (i + 0.5) * width;
    double density = 0.0;
    if (x <= mode) {
      density = mode > lower ? (x - lower) / (mode - lower) : 1.0;
    } else {
      density = upper > mode ? (upper - x) / (upper - mode) : 1.0;
    }
    if (density <= 0) continue;
    d.nodes.push_back(x);
    d.weights.push_back(density);
  }
  normalize(d);
  return d;
}

// Log of sum_j w_j f(x_j) for one observation.
double log_mixture_density(const DistributionModel& model, const DiscretizedError& d) {
  if (d.nodes.size() == 1) return model.log_pdf(d.nodes[0]);
  double m = kInfeasibleLogLik;
  double terms[64];
  const std::size_t n = d.nodes.size();
  std::vector<double> heap;
  double* t = terms;
  if (n > 64) {
    heap.resize(n);
    t = heap.data();
  }
  for (std::size_t j = 0; j < n; ++j) {
    t[j] = std::log(d.weights[j]) + model.log_pdf(d.nodes[j]);
    m = std::max(m, t[j]);
  }
  if (!std::isfinite(m)) return kInfeasibleLogLik;
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) s += std::exp(t[j] - m);
  return m + std::log(s);
}

// F(upper) - F(lower) without cancellation in either tail.
double cdf_difference(const DistributionModel& model, double lower, double upper) {
  const double f_lower = model.cdf(lower);
  if (f_lower > 0.5) return model.sf(lower) - model.sf(upper);
  return model.cdf(upper) - f_lower;
}

double expected_value(const DiscretizedError& d) {
  double e = 0.0;
  for (std::size_t j = 0; j < d.nodes.size(); ++j) e += d.weights[j] * d.nodes[j];
  return e;
}

double censored_term(const DistributionModel& model, const std::vector<DiscretizedError>& floods,
                     const CensoringSpec& c) {
  const double h = c.record_length;
  const double k = c.exceedance_count;
  double ll = std::lgamma(h + 1.0) - std::lgamma(k + 1.0) - std::lgamma(h - k + 1.0);
  if (h - k > 0) {
    const double f0 = model.cdf(c.threshold);
    if (!(f0 > 0)) return kInfeasibleLogLik;
    ll += (h - k) * std::log(f0);
  }
  if (k > 0) {
    const double s0 = model.sf(c.threshold);
    if (!(s0 > 0)) return kInfeasibleLogLik;
    const double log_s0 = std::log(s0);
    ll += k * log_s0;
    for (const DiscretizedError& d : floods) {
      const double inner = log_mixture_density(model, d);
      if (is_infeasible(inner)) return kInfeasibleLogLik;
      ll += inner - log_s0;
    }
  }
  return ll;
}

// E[age] * log( sum_k w_k (F(t_k) - F(y_min)) ).
double paleo_term(const DistributionModel& model, double expected_age,
                  const DiscretizedError& upper_limits, double min_observable) {
  double inner = 0.0;
  for (std::size_t k = 0; k < upper_limits.nodes.size(); ++k) {
    inner += upper_limits.weights[k] * cdf_difference(model, min_observable, upper_limits.nodes[k]);
  }
  if (!(inner > 0)) return kInfeasibleLogLik;
  return expected_age * std::log(inner);
}

}  // namespace

DiscretizedError discretize_error(double center, const ErrorModel& error, int node_count) {
  check_node_count(node_count);
  DiscretizedError d;
  switch (error.kind) {
    case ErrorModel::Kind::None:
      d.nodes = {center};
      d.weights = {1.0};
      return d;
    case ErrorModel::Kind::NormalCv: {
      if (node_count == 1) return {{center}, {1.0}};
      const double sd = error.cv * center;
      const int half = node_count / 2;
      for (int i = -half; i <= half; ++i) {
        const double z = 3.0 * static_cast<double>(i) / half;
        const double x = center + z * sd;
        if (x <= 0) continue;
        d.nodes.push_back(x);
        d.weights.push_back(std::exp(-0.5 * z * z));
      }
      normalize(d);
      return d;
    }
    case ErrorModel::Kind::Triangular:
      return triangular_nodes(error.lower, error.upper, error.mode, node_count);
  }
  return d;
}

DiscretizedError discretize_age(const PaleoBound& bound, int node_count) {
  check_node_count(node_count);
  const double lo = bound.age_lower;
  const double hi = bound.age_upper;
  switch (bound.age_model.kind) {
    case AgeModel::Kind::Fixed:
      return {{0.5 * (lo + hi)}, {1.0}};
    case AgeModel::Kind::Uniform: {
      DiscretizedError d;
      if (node_count == 1) return {{0.5 * (lo + hi)}, {1.0}};
      for (int i = 0; i < node_count; ++i) {
        d.nodes.push_back(lo + (hi - lo) * i / (node_count - 1));
        d.weights.push_back(1.0 / node_count);
      }
      return d;
    }
    case AgeModel::Kind::Triangular:
      return triangular_nodes(lo, hi, 0.5 * (lo + hi), node_count);
  }
  return {};
}

double loglik_gage(const DistributionModel& model, const std::vector<AnnualPeak>& peaks,
                   int node_count) {
  double ll = 0.0;
  for (const AnnualPeak& p : peaks) {
    const double term = log_mixture_density(model, discretize_error(p.discharge, p.error, node_count));
    if (is_infeasible(term)) return kInfeasibleLogLik;
    ll += term;
  }
  return ll;
}

double loglik_censored(const DistributionModel& model, const std::vector<HistoricalFlood>& historical,
                       const CensoringSpec& censoring, int node_count) {
  std::vector<DiscretizedError> floods;
  floods.reserve(historical.size());
  for (const HistoricalFlood& h : historical) {
    floods.push_back(discretize_error(h.discharge, h.error, node_count));
  }
  return censored_term(model, floods, censoring);
}

double paleo_bound_loglik(const DistributionModel& model, const DiscretizedError& ages,
                          const DiscretizedError& upper_limits, double min_observable) {
  return paleo_term(model, expected_value(ages), upper_limits, min_observable);
}

double loglik_paleo(const DistributionModel& model, const std::vector<PaleoBound>& paleo,
                    PaleoNodeCounts counts) {
  double ll = 0.0;
  for (const PaleoBound& b : paleo) {
    const ErrorModel tri = b.discharge_error.kind == ErrorModel::Kind::Triangular
                               ? b.discharge_error
                               : ErrorModel::triangular(b.discharge_lower, b.discharge_upper);
    const double term = paleo_bound_loglik(model, discretize_age(b, counts.age),
                                           discretize_error(b.discharge_upper, tri, counts.discharge),
                                           b.min_observable);
    if (is_infeasible(term)) return kInfeasibleLogLik;
    ll += term;
  }
  return ll;
}

double total_loglik(const DistributionModel& model, const PeakDataset& dataset,
                    const LikelihoodConfig& config) {
  return LikelihoodEvaluator(dataset, config)(model);
}

// ---------------------------------------------------------------- evaluator

LikelihoodEvaluator::LikelihoodEvaluator(const PeakDataset& dataset, const LikelihoodConfig& config)
    : censoring_(dataset.censoring()), record_count_(dataset.record_count()) {
  for (const AnnualPeak& p : dataset.peaks()) {
    gage_.push_back(discretize_error(p.discharge, p.error, config.gage_nodes));
  }
  for (const HistoricalFlood& h : dataset.historical()) {
    historical_.push_back(discretize_error(h.discharge, h.error, config.historical_nodes));
  }
  for (const PaleoBound& b : dataset.paleo()) {
    const ErrorModel tri = b.discharge_error.kind == ErrorModel::Kind::Triangular
                               ? b.discharge_error
                               : ErrorModel::triangular(b.discharge_lower, b.discharge_upper);
    paleo_.push_back({expected_value(discretize_age(b, config.age_nodes)),
                      discretize_error(b.discharge_upper, tri, config.paleo_nodes),
                      b.min_observable});
  }
}

double LikelihoodEvaluator::gage(const DistributionModel& model) const {
  double ll = 0.0;
  for (const DiscretizedError& d : gage_) {
    const double term = log_mixture_density(model, d);
    if (is_infeasible(term)) return kInfeasibleLogLik;
    ll += term;
  }
  return ll;
}

double LikelihoodEvaluator::censored(const DistributionModel& model) const {
  return censored_term(model, historical_, censoring_);
}

double LikelihoodEvaluator::paleo(const DistributionModel& model) const {
  double ll = 0.0;
  for (const PaleoTerm& t : paleo_) {
    const double term = paleo_term(model, t.expected_age, t.upper_limits, t.min_observable);
    if (is_infeasible(term)) return kInfeasibleLogLik;
    ll += term;
  }
  return ll;
}

double LikelihoodEvaluator::operator()(const DistributionModel& model) const {
  const double g = gage(model);
  if (is_infeasible(g)) return kInfeasibleLogLik;
  const double c = censored(model);
  if (is_infeasible(c)) return kInfeasibleLogLik;
  const double p = paleo(model);
  if (is_infeasible(p)) return kInfeasibleLogLik;
  return g + c + p;
}

}  // namespace floodrisk
