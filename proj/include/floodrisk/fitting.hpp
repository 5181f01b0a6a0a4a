#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "floodrisk/distributions.hpp"
#include "floodrisk/hydrodata.hpp"
#include "floodrisk/likelihood.hpp"

namespace floodrisk {

struct Bound {
  double lower = 0.0;
  double upper = 0.0;
};

// Differential-evolution settings. Empty bounds are filled from the data by
// default_bounds(); population_size 0 means 10 x dimension.
struct FitConfig {
  std::vector<Bound> bounds;
  std::size_t population_size = 0;
  std::size_t max_generations = 2000;
  double mutation_factor = 0.8;
  double crossover_rate = 0.9;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4};
  // Relative spread of per-seed log-likelihoods accepted as consensus.
  double convergence_tol = 0.01;
  // Stop a seed early when the best log-likelihood improved by less than
  // stall_tol (absolute) over stall_generations generations. 0 disables.
  std::size_t stall_generations = 300;
  double stall_tol = 1e-9;
  // Parameters held fixed at a value (index, value).
  std::vector<std::pair<std::size_t, double>> fixed;
  Lp3Space lp3_space = Lp3Space::Log10;
  // Smallest admissible spread of a fitted component as a fraction of the
  // data standard deviation (raw for GEV/LN2/TCEV scales, transformed for the
  // LP3 standard deviation sqrt(alpha)|beta|). Keeps mixtures from collapsing
  // a component onto a single observation, where the likelihood is unbounded.
  double min_spread_fraction = 0.02;
  LikelihoodConfig likelihood;

  // Throws ConfigError when the settings are unusable for `dimension`.
  void validate(std::size_t dimension) const;
};

struct SeedResult {
  std::uint64_t seed = 0;
  double loglik = kInfeasibleLogLik;
  std::vector<double> params;
  std::size_t generations = 0;
};

struct FittedModel {
  DistributionModel model;
  double loglik = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  std::size_t parameter_count = 0;
  std::size_t record_count = 0;
  std::vector<SeedResult> per_seed;
  bool converged = false;
};

struct InformationCriteria {
  double aic = 0.0;
  double bic = 0.0;
};

// aic = 2k - 2 loglik, bic = k ln(n) - 2 loglik.
InformationCriteria information_criteria(double loglik, std::size_t k, double n);

// Data-driven search box for a family (see README for the rules).
std::vector<Bound> default_bounds(Family family, const PeakDataset& dataset,
                                  Lp3Space lp3_space = Lp3Space::Log10,
                                  double min_spread_fraction = 0.02);

// Result of maximizing an arbitrary objective with rand/1/bin DE.
struct DeResult {
  std::vector<double> best;
  double best_value = kInfeasibleLogLik;
  std::size_t generations = 0;
};

// Maximizes objective over the box. Out-of-box proposals are reflected back;
// non-finite objective values always lose selection against finite ones.
DeResult differential_evolution(const std::function<double(std::span<const double>)>& objective,
                                std::span<const Bound> bounds, const FitConfig& config,
                                std::uint64_t seed);

// Maximum-likelihood fit of one family, one DE run per seed. Throws FitError
// when every seed ends infeasible.
FittedModel fit_mle(Family family, const PeakDataset& dataset, const FitConfig& config);

struct Ranking {
  std::vector<std::size_t> by_aic;  // indices into the input, best first
  std::vector<std::size_t> by_bic;
};

// Ascending AIC and BIC orderings; ties go to fewer parameters, then to
// family declaration order.
Ranking rank_models(std::span<const FittedModel> fits);

}  // namespace floodrisk
