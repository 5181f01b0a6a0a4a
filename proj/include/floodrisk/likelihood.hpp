#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "floodrisk/distributions.hpp"
#include "floodrisk/hydrodata.hpp"

namespace floodrisk {

// Returned by every log-likelihood function when the data are impossible
// under the model. The optimizer treats it as infeasible.
inline constexpr double kInfeasibleLogLik = -std::numeric_limits<double>::infinity();

inline bool is_infeasible(double loglik) { return !(loglik > kInfeasibleLogLik); }

// Discrete approximation of an error distribution: weights sum to one and
// nodes are strictly increasing and positive.
struct DiscretizedError {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Node grids for the discharge errors of point observations and for the age
// and upper-limit uncertainty of paleo bounds. All counts must be odd.
struct LikelihoodConfig {
  int gage_nodes = 11;
  int historical_nodes = 11;
  int age_nodes = 11;
  int paleo_nodes = 11;
};

// normal_cv: node_count nodes evenly spaced on center +/- 3 sd (sd = cv *
// center), nodes <= 0 dropped, weights proportional to the normal density.
// triangular: node_count cell midpoints of [lower, upper] weighted by the
// triangular density. none: the single node (center, 1). Throws ConfigError
// for an even or non-positive node_count.
DiscretizedError discretize_error(double center, const ErrorModel& error, int node_count);

// Age nodes of a paleo bound under its AgeModel.
DiscretizedError discretize_age(const PaleoBound& bound, int node_count);

// sum_i log( sum_j w_ij f(x_ij) ).
double loglik_gage(const DistributionModel& model, const std::vector<AnnualPeak>& peaks,
                   int node_count);

// Binomial threshold-censoring term plus the exceedance densities normalised
// by the exceedance probability, with measurement error on each exceedance.
double loglik_censored(const DistributionModel& model, const std::vector<HistoricalFlood>& historical,
                       const CensoringSpec& censoring, int node_count);

struct PaleoNodeCounts {
  int age = 11;
  int discharge = 11;
};

// For each bound: E[age] * log( sum_k w_k (F(t_k) - F(y_min)) ), where t_k are
// the bound's upper-limit nodes and y_min its minimum observable discharge.
double loglik_paleo(const DistributionModel& model, const std::vector<PaleoBound>& paleo,
                    PaleoNodeCounts counts);

// Single-bound term from explicit node sets.
double paleo_bound_loglik(const DistributionModel& model, const DiscretizedError& ages,
                          const DiscretizedError& upper_limits, double min_observable);

double total_loglik(const DistributionModel& model, const PeakDataset& dataset,
                    const LikelihoodConfig& config = {});

// Precomputes every node grid of a dataset once so that repeated objective
// evaluations only touch the model. Immutable after construction; safe to
// share between threads.
class LikelihoodEvaluator {
 public:
  LikelihoodEvaluator(const PeakDataset& dataset, const LikelihoodConfig& config = {});

  double operator()(const DistributionModel& model) const;
  double gage(const DistributionModel& model) const;
  double censored(const DistributionModel& model) const;
  double paleo(const DistributionModel& model) const;

  std::size_t record_count() const { return record_count_; }

 private:
  struct PaleoTerm {
    double expected_age;
    DiscretizedError upper_limits;
    double min_observable;
  };

  std::vector<DiscretizedError> gage_;
  std::vector<DiscretizedError> historical_;
  CensoringSpec censoring_;
  std::vector<PaleoTerm> paleo_;
  std::size_t record_count_ = 0;
};

}  // namespace floodrisk
