#include "floodrisk/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "floodrisk/errors.hpp"

namespace floodrisk {

namespace {

struct Moments {
  double mean = 0.0;
  double sd = 0.0;
  double min = 0.0;
  double max = 0.0;
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  if (v.empty()) return m;
  m.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m.mean) * (x - m.mean);
  m.sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : std::abs(m.mean);
  if (!(m.sd > 0)) m.sd = std::max(1e-3, std::abs(m.mean) * 0.1);
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  m.min = *lo;
  m.max = *hi;
  return m;
}

std::vector<double> transformed(const std::vector<double>& v, double (*f)(double)) {
  std::vector<double> out;
  out.reserve(v.size());
  for (double x : v) out.push_back(f(x));
  return out;
}

double log10_of(double x) { return std::log10(x); }
double ln_of(double x) { return std::log(x); }

std::vector<Bound> gev_box(const Moments& m, double spread) {
  return {{0.0, 3.0 * m.max}, {spread * m.sd, 20.0 * m.sd}, {-0.5, 0.7}};
}

std::vector<Bound> lp3_box(const Moments& m) {
  return {{m.mean - 35.0 * m.sd, m.mean + 35.0 * m.sd}, {1.0, 1000.0}, {-5.0 * m.sd, 5.0 * m.sd}};
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

 private:
  std::mt19937_64 engine_;
};

double reflect(double v, const Bound& b, Rng& rng) {
  if (v < b.lower) v = b.lower + (b.lower - v);
  if (v > b.upper) v = b.upper - (v - b.upper);
  if (v < b.lower || v > b.upper) v = b.lower + rng.uniform() * (b.upper - b.lower);
  return v;
}

// sqrt(alpha)|beta| of every LP3 component must reach the floor.
bool lp3_spread_ok(Family family, std::span<const double> p, double floor) {
  const auto ok = [&](std::size_t i) { return std::sqrt(p[i + 1]) * std::abs(p[i + 2]) >= floor; };
  if (family == Family::LP3) return ok(0);
  if (family == Family::MixedLP3) return ok(0) && ok(3);
  return true;
}

double sanitize(double value) { return std::isnan(value) ? kInfeasibleLogLik : value; }

}  // namespace

void FitConfig::validate(std::size_t dimension) const {
  if (!bounds.empty() && bounds.size() != dimension) {
    throw ConfigError("fit bounds have " + std::to_string(bounds.size()) + " entries, expected " +
                      std::to_string(dimension));
  }
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    const bool is_fixed = std::any_of(fixed.begin(), fixed.end(),
                                      [&](const auto& f) { return f.first == i; });
    const Bound& b = bounds[i];
    if (!std::isfinite(b.lower) || !std::isfinite(b.upper) ||
        (is_fixed ? b.lower > b.upper : b.lower >= b.upper)) {
      throw ConfigError("fit bound " + std::to_string(i) + " must be finite with lower < upper");
    }
  }
  for (const auto& [index, value] : fixed) {
    if (index >= dimension || !std::isfinite(value)) throw ConfigError("invalid fixed parameter");
  }
  if (population_size != 0 && population_size < 4) throw ConfigError("population_size must be >= 4");
  if (!(crossover_rate > 0 && crossover_rate <= 1)) throw ConfigError("crossover_rate must be in (0, 1]");
  if (!(mutation_factor > 0 && mutation_factor < 2)) throw ConfigError("mutation_factor must be in (0, 2)");
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (max_generations == 0) throw ConfigError("max_generations must be >= 1");
  if (!(convergence_tol >= 0)) throw ConfigError("convergence_tol must be >= 0");
}

InformationCriteria information_criteria(double loglik, std::size_t k, double n) {
  const double kk = static_cast<double>(k);
  return {2.0 * kk - 2.0 * loglik, kk * std::log(n) - 2.0 * loglik};
}

std::vector<Bound> default_bounds(Family family, const PeakDataset& dataset, Lp3Space lp3_space,
                                  double min_spread_fraction) {
  const std::vector<double> data = dataset.point_discharges();
  if (data.empty()) throw DataError("cannot derive search bounds without point observations");
  const Moments raw = moments(data);
  const Moments logs =
      moments(lp3_space == Lp3Space::Log10 ? transformed(data, log10_of) : data);
  const double spread = min_spread_fraction > 0 ? min_spread_fraction : 1e-3;

  std::vector<Bound> box;
  const auto append = [&box](const std::vector<Bound>& part) {
    box.insert(box.end(), part.begin(), part.end());
  };
  switch (family) {
    case Family::LN2: {
      const Moments ln = moments(transformed(data, ln_of));
      box = {{std::min(0.0, ln.min - 1.0), std::log(3.0 * raw.max)}, {spread * ln.sd, 20.0 * ln.sd}};
      break;
    }
    case Family::LP3: append(lp3_box(logs)); break;
    case Family::GEV: append(gev_box(raw, spread)); break;
    case Family::TCEV: {
      const double theta = raw.sd * std::sqrt(6.0) / M_PI;
      const double lambda_max = std::min(1e6, 10.0 * std::exp(std::min(raw.mean / theta, 13.0)));
      box = {{0.0, lambda_max}, {spread * raw.sd, 20.0 * raw.sd},
             {0.0, lambda_max}, {spread * raw.sd, 20.0 * raw.sd}};
      break;
    }
    case Family::MixedLP3:
      append(lp3_box(logs));
      append(lp3_box(logs));
      box.push_back({0.0, 1.0});
      break;
    case Family::MixedGEV:
      append(gev_box(raw, spread));
      append(gev_box(raw, spread));
      box.push_back({0.0, 1.0});
      break;
  }
  return box;
}

DeResult differential_evolution(const std::function<double(std::span<const double>)>& objective,
                                std::span<const Bound> bounds, const FitConfig& config,
                                std::uint64_t seed) {
  const std::size_t dim = bounds.size();
  const std::size_t np = config.population_size ? config.population_size : std::max<std::size_t>(4, 10 * dim);
  Rng rng(seed);

  const auto apply_fixed = [&](std::vector<double>& x) {
    for (const auto& [index, value] : config.fixed) x[index] = value;
  };

  std::vector<std::vector<double>> pop(np, std::vector<double>(dim));
  std::vector<double> fitness(np, kInfeasibleLogLik);
  for (std::size_t i = 0; i < np; ++i) {
    for (int attempt = 0; attempt < 100; ++attempt) {
      for (std::size_t j = 0; j < dim; ++j) {
        pop[i][j] = bounds[j].lower + rng.uniform() * (bounds[j].upper - bounds[j].lower);
      }
      apply_fixed(pop[i]);
      fitness[i] = sanitize(objective(pop[i]));
      if (!is_infeasible(fitness[i])) break;
    }
  }

  const auto best_index = [&] {
    std::size_t b = 0;
    for (std::size_t i = 1; i < np; ++i) {
      if (fitness[i] > fitness[b]) b = i;
    }
    return b;
  };

  std::vector<std::vector<double>> trials(np, std::vector<double>(dim));
  std::vector<double> trial_fitness(np);
  double best = fitness[best_index()];
  double stall_reference = best;
  std::size_t stall_count = 0;
  std::size_t generation = 0;

  for (; generation < config.max_generations; ++generation) {
    // Build every trial from the current population, then evaluate and
    // select; the outcome does not depend on evaluation order.
    for (std::size_t i = 0; i < np; ++i) {
      std::size_t r1, r2, r3;
      do r1 = rng.index(np); while (r1 == i);
      do r2 = rng.index(np); while (r2 == i || r2 == r1);
      do r3 = rng.index(np); while (r3 == i || r3 == r1 || r3 == r2);
      const std::size_t forced = rng.index(dim);
      std::vector<double>& u = trials[i];
      for (std::size_t j = 0; j < dim; ++j) {
        if (j == forced || rng.uniform() < config.crossover_rate) {
          const double v = pop[r1][j] + config.mutation_factor * (pop[r2][j] - pop[r3][j]);
          u[j] = reflect(v, bounds[j], rng);
        } else {
          u[j] = pop[i][j];
        }
      }
      apply_fixed(u);
    }
    for (std::size_t i = 0; i < np; ++i) trial_fitness[i] = sanitize(objective(trials[i]));
    for (std::size_t i = 0; i < np; ++i) {
      const bool trial_ok = !is_infeasible(trial_fitness[i]);
      if ((trial_ok && trial_fitness[i] >= fitness[i]) || (is_infeasible(fitness[i]) && !trial_ok)) {
        pop[i].swap(trials[i]);
        fitness[i] = trial_fitness[i];
      }
    }
    best = fitness[best_index()];

    if (config.stall_generations > 0) {
      if (best - stall_reference > config.stall_tol || is_infeasible(stall_reference)) {
        stall_reference = best;
        stall_count = 0;
      } else if (++stall_count >= config.stall_generations) {
        ++generation;
        break;
      }
    }
  }

  const std::size_t b = best_index();
  return {pop[b], fitness[b], generation};
}

FittedModel fit_mle(Family family, const PeakDataset& dataset, const FitConfig& config) {
  const std::size_t dim = parameter_count(family);
  config.validate(dim);
  if (dataset.record_count() == 0) throw DataError("cannot fit an empty dataset");

  std::vector<Bound> bounds =
      config.bounds.empty() ? default_bounds(family, dataset, config.lp3_space, config.min_spread_fraction)
                            : config.bounds;
  for (const auto& [index, value] : config.fixed) {
    bounds[index].lower = std::min(bounds[index].lower, value);
    bounds[index].upper = std::max(bounds[index].upper, value);
  }

  double lp3_floor = 0.0;
  if (config.min_spread_fraction > 0 && (family == Family::LP3 || family == Family::MixedLP3)) {
    const std::vector<double> data = dataset.point_discharges();
    lp3_floor = config.min_spread_fraction *
                moments(config.lp3_space == Lp3Space::Log10 ? transformed(data, log10_of) : data).sd;
  }

  const LikelihoodEvaluator evaluator(dataset, config.likelihood);
  const auto objective = [&](std::span<const double> params) {
    if (!DistributionModel::valid(family, params)) return kInfeasibleLogLik;
    if (!lp3_spread_ok(family, params, lp3_floor)) return kInfeasibleLogLik;
    return evaluator(DistributionModel(family, params, config.lp3_space));
  };

  std::vector<SeedResult> per_seed;
  for (std::uint64_t seed : config.seeds) {
    DeResult r = differential_evolution(objective, bounds, config, seed);
    SeedResult s;
    s.seed = seed;
    s.loglik = r.best_value;
    s.generations = r.generations;
    if (!is_infeasible(r.best_value)) {
      const DistributionModel m(family, r.best, config.lp3_space);
      s.params.assign(m.params().begin(), m.params().end());
    } else {
      s.params = r.best;
    }
    per_seed.push_back(std::move(s));
  }

  std::size_t best = per_seed.size();
  for (std::size_t i = 0; i < per_seed.size(); ++i) {
    if (is_infeasible(per_seed[i].loglik)) continue;
    if (best == per_seed.size() || per_seed[i].loglik > per_seed[best].loglik) best = i;
  }
  if (best == per_seed.size()) {
    std::ostringstream msg;
    msg << "fit of " << family_name(family) << " failed: all " << per_seed.size()
        << " seeds ended with an infeasible parameter vector";
    throw FitError(msg.str());
  }

  const double max_ll = per_seed[best].loglik;
  double min_ll = max_ll;
  bool all_feasible = true;
  for (const SeedResult& s : per_seed) {
    if (is_infeasible(s.loglik)) {
      all_feasible = false;
    } else {
      min_ll = std::min(min_ll, s.loglik);
    }
  }
  const double spread = max_ll != 0 ? (max_ll - min_ll) / std::abs(max_ll) : max_ll - min_ll;

  const std::size_t n = dataset.record_count();
  const InformationCriteria ic = information_criteria(max_ll, dim, static_cast<double>(n));
  return FittedModel{DistributionModel(family, per_seed[best].params, config.lp3_space),
                     max_ll,
                     ic.aic,
                     ic.bic,
                     dim,
                     n,
                     std::move(per_seed),
                     all_feasible && spread <= config.convergence_tol};
}

Ranking rank_models(std::span<const FittedModel> fits) {
  const auto order_by = [&](auto criterion) {
    std::vector<std::size_t> idx(fits.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      const double ca = criterion(fits[a]);
      const double cb = criterion(fits[b]);
      if (ca != cb) return ca < cb;
      if (fits[a].parameter_count != fits[b].parameter_count) {
        return fits[a].parameter_count < fits[b].parameter_count;
      }
      return static_cast<int>(fits[a].model.family()) < static_cast<int>(fits[b].model.family());
    });
    return idx;
  };
  return {order_by([](const FittedModel& f) { return f.aic; }),
          order_by([](const FittedModel& f) { return f.bic; })};
}

}  // namespace floodrisk
