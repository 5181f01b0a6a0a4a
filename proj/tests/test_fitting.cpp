#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numeric>

#include "floodrisk/errors.hpp"
#include "floodrisk/fitting.hpp"

using namespace floodrisk;

namespace {

PeakDataset exact_dataset(const std::vector<double>& xs) {
  std::vector<AnnualPeak> peaks;
  int year = 1000;
  for (double x : xs) peaks.push_back({year++, x, ErrorModel::none()});
  return PeakDataset(peaks, {}, {}, {});
}

FitConfig quick_config(std::vector<std::uint64_t> seeds = {1, 2}) {
  FitConfig c;
  c.seeds = std::move(seeds);
  return c;
}

const DistributionModel kMixture(Family::MixedGEV,
                                 std::vector<double>{100.0, 30.0, 0.0, 400.0, 120.0, 0.1, 0.85});

struct TableRow {
  Family family;
  std::size_t k;
  double bic;
  double aic;
};

constexpr std::array<TableRow, 6> kTable1{{
    {Family::LN2, 2, 1086.763, 1081.878},
    {Family::LP3, 3, 1077.45, 1070.122},
    {Family::GEV, 3, 1075.738, 1068.41},
    {Family::TCEV, 4, 1075.557, 1065.786},
    {Family::MixedLP3, 7, 1081.016, 1063.918},
    {Family::MixedGEV, 7, 1044.062, 1026.963},
}};

DistributionModel placeholder(Family f) {
  switch (f) {
    case Family::LN2: return DistributionModel(f, std::vector<double>{1, 1});
    case Family::LP3: return DistributionModel(f, std::vector<double>{1, 2, 0.1});
    case Family::GEV: return DistributionModel(f, std::vector<double>{1, 1, 0});
    case Family::TCEV: return DistributionModel(f, std::vector<double>{1, 1, 1, 2});
    case Family::MixedLP3: return DistributionModel(f, std::vector<double>{1, 2, 0.1, 1, 2, 0.1, 0.5});
    case Family::MixedGEV: return DistributionModel(f, std::vector<double>{1, 1, 0, 2, 1, 0, 0.5});
  }
  throw std::logic_error("family");
}

FittedModel scored(Family f, std::size_t k, double aic, double bic) {
  return FittedModel{placeholder(f), 0.0, aic, bic, k, 85, {}, true};
}

}  // namespace

// ------------------------------------------------------------------ information criteria

TEST(InformationCriteria, ZeroLoglikAtESquared) {
  const auto ic = information_criteria(0.0, 2, std::exp(2.0));
  EXPECT_NEAR(ic.aic, 4.0, 1e-15);
  EXPECT_NEAR(ic.bic, 4.0, 1e-14);
}

TEST(InformationCriteria, PublishedMixedGevRow) {
  const double loglik = (2.0 * 7 - 1026.963) / 2.0;
  EXPECT_NEAR(loglik, -506.4815, 1e-12);
  const auto ic = information_criteria(loglik, 7, 85);
  EXPECT_NEAR(ic.aic, 1026.963, 1e-9);
  EXPECT_NEAR(ic.bic, 1044.062, 5e-4);
}

TEST(InformationCriteria, PublishedTableSatisfiesIdentityWithN85) {
  for (const TableRow& r : kTable1) {
    const double k = static_cast<double>(r.k);
    EXPECT_NEAR(r.bic - r.aic, k * (std::log(85.0) - 2.0), 0.01) << family_name(r.family);
    const double loglik = (2.0 * k - r.aic) / 2.0;
    const auto ic = information_criteria(loglik, r.k, 85);
    EXPECT_NEAR(ic.bic, r.bic, 0.01) << family_name(r.family);
  }
}

// ------------------------------------------------------------------ ranking

TEST(Ranking, LowerAicFirst) {
  const std::vector<FittedModel> fits{scored(Family::GEV, 3, 10, 10), scored(Family::LN2, 2, 5, 5)};
  const auto r = rank_models(fits);
  EXPECT_EQ(r.by_aic.front(), 1u);
}

TEST(Ranking, TiesGoToFewerParameters) {
  const std::vector<FittedModel> fits{scored(Family::MixedGEV, 7, 100, 100), scored(Family::GEV, 3, 100, 100)};
  const auto r = rank_models(fits);
  EXPECT_EQ(r.by_aic.front(), 1u);
  EXPECT_EQ(r.by_bic.front(), 1u);
}

TEST(Ranking, TiesWithEqualParameterCountFollowFamilyOrder) {
  const std::vector<FittedModel> fits{scored(Family::GEV, 3, 100, 100), scored(Family::LP3, 3, 100, 100)};
  EXPECT_EQ(rank_models(fits).by_aic.front(), 1u);
}

TEST(Ranking, PublishedTableOrder) {
  std::vector<FittedModel> fits;
  for (const TableRow& r : kTable1) fits.push_back(scored(r.family, r.k, r.aic, r.bic));
  const auto rank = rank_models(fits);
  EXPECT_EQ(fits[rank.by_aic.front()].model.family(), Family::MixedGEV);
  EXPECT_EQ(fits[rank.by_bic.front()].model.family(), Family::MixedGEV);
  const auto position = [&](const std::vector<std::size_t>& order, Family f) {
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (fits[order[i]].model.family() == f) return i + 1;
    }
    return std::size_t{0};
  };
  EXPECT_EQ(position(rank.by_bic, Family::LP3), 4u);
  EXPECT_EQ(position(rank.by_aic, Family::LP3), 5u);
}

// ------------------------------------------------------------------ differential evolution

TEST(DifferentialEvolution, FindsQuadraticMaximum) {
  FitConfig c;
  c.max_generations = 400;
  const std::vector<Bound> box{{-5, 5}, {-5, 5}, {-5, 5}};
  const auto r = differential_evolution(
      [](std::span<const double> x) {
        return -((x[0] - 1) * (x[0] - 1) + (x[1] + 2) * (x[1] + 2) + (x[2] - 0.5) * (x[2] - 0.5));
      },
      box, c, 3);
  EXPECT_NEAR(r.best[0], 1.0, 1e-4);
  EXPECT_NEAR(r.best[1], -2.0, 1e-4);
  EXPECT_NEAR(r.best[2], 0.5, 1e-4);
}

TEST(DifferentialEvolution, InfeasibleRegionNeverWins) {
  FitConfig c;
  c.max_generations = 300;
  const std::vector<Bound> box{{-5, 5}, {-5, 5}};
  // Unconstrained peak at the origin is infeasible; the best feasible point is on x0 = 1.
  const auto r = differential_evolution(
      [](std::span<const double> x) {
        if (x[0] < 1) return kInfeasibleLogLik;
        return -(x[0] * x[0] + x[1] * x[1]);
      },
      box, c, 9);
  EXPECT_GE(r.best[0], 1.0);
  EXPECT_NEAR(r.best[0], 1.0, 1e-3);
  EXPECT_NEAR(r.best[1], 0.0, 1e-3);
}

TEST(DifferentialEvolution, StaysInsideTheBox) {
  FitConfig c;
  c.max_generations = 100;
  const std::vector<Bound> box{{0, 1}, {10, 11}};
  bool outside = false;
  differential_evolution(
      [&](std::span<const double> x) {
        if (x[0] < 0 || x[0] > 1 || x[1] < 10 || x[1] > 11) outside = true;
        return x[0] + x[1];  // maximum on the upper corner
      },
      box, c, 4);
  EXPECT_FALSE(outside);
}

// ------------------------------------------------------------------ fit_mle

TEST(FitMle, LogNormalMatchesClosedFormEstimator) {
  const auto xs = DistributionModel(Family::LN2, std::vector<double>{4.0, 0.8}).sample(500, 77);
  double mean = 0.0;
  for (double x : xs) mean += std::log(x);
  mean /= xs.size();
  double ss = 0.0;
  for (double x : xs) ss += (std::log(x) - mean) * (std::log(x) - mean);
  const double sd = std::sqrt(ss / xs.size());

  const auto fit = fit_mle(Family::LN2, exact_dataset(xs), quick_config());
  EXPECT_NEAR(fit.model.param(0), mean, 0.05);
  EXPECT_NEAR(fit.model.param(1), sd, 0.05);
  EXPECT_NEAR(fit.model.param(0), 4.0, 0.1);
  EXPECT_NEAR(fit.model.param(1), 0.8, 0.1);
  EXPECT_TRUE(fit.converged);
}

TEST(FitMle, ReportedCriteriaFollowDefinitions) {
  const auto xs = DistributionModel(Family::GEV, std::vector<double>{200.0, 60.0, 0.1}).sample(120, 3);
  const auto fit = fit_mle(Family::GEV, exact_dataset(xs), quick_config());
  EXPECT_EQ(fit.parameter_count, 3u);
  EXPECT_EQ(fit.record_count, 120u);
  EXPECT_DOUBLE_EQ(fit.aic, 6.0 - 2.0 * fit.loglik);
  EXPECT_DOUBLE_EQ(fit.bic, 3.0 * std::log(120.0) - 2.0 * fit.loglik);
  double best = kInfeasibleLogLik;
  for (const auto& s : fit.per_seed) best = std::max(best, s.loglik);
  EXPECT_EQ(fit.loglik, best);
  EXPECT_TRUE(DistributionModel::valid(Family::GEV, fit.model.params()));
}

TEST(FitMle, MixtureWithUnitWeightReducesToSingleGev) {
  const auto xs = DistributionModel(Family::GEV, std::vector<double>{200.0, 60.0, 0.1}).sample(150, 11);
  const auto data = exact_dataset(xs);
  const auto gev = fit_mle(Family::GEV, data, quick_config());
  FitConfig c = quick_config();
  c.fixed = {{6, 1.0}};
  const auto mix = fit_mle(Family::MixedGEV, data, c);
  EXPECT_NEAR(mix.loglik, gev.loglik, 1e-6);
}

TEST(FitMle, MixtureBeatsSingleGevOnTwoPopulationData) {
  const auto data = exact_dataset(kMixture.sample(500, 2024));
  const auto gev = fit_mle(Family::GEV, data, quick_config());
  const auto mix = fit_mle(Family::MixedGEV, data, quick_config());
  EXPECT_LT(mix.aic, gev.aic);
  EXPECT_GE(mix.loglik, gev.loglik - 0.01 * std::abs(gev.loglik));
  EXPECT_LE(mix.model.param(0), mix.model.param(3));
}

TEST(FitMle, DeterministicForFixedSeeds) {
  const auto data = exact_dataset(kMixture.sample(200, 5));
  FitConfig c = quick_config({7});
  c.max_generations = 300;
  const auto a = fit_mle(Family::MixedGEV, data, c);
  const auto b = fit_mle(Family::MixedGEV, data, c);
  EXPECT_EQ(a.loglik, b.loglik);
  EXPECT_TRUE(a.model == b.model);
  ASSERT_EQ(a.per_seed.size(), b.per_seed.size());
  EXPECT_EQ(a.per_seed[0].params, b.per_seed[0].params);
  EXPECT_EQ(a.per_seed[0].generations, b.per_seed[0].generations);
}

TEST(FitMle, ConvergenceFlagUsesRelativeSpread) {
  const auto data = exact_dataset(kMixture.sample(200, 5));
  FitConfig c = quick_config({1, 2, 3});
  c.max_generations = 3;  // far from converged; seeds disagree
  c.convergence_tol = 0.0;
  const auto fit = fit_mle(Family::MixedGEV, data, c);
  double lo = fit.loglik;
  for (const auto& s : fit.per_seed) lo = std::min(lo, s.loglik);
  EXPECT_EQ(fit.converged, lo == fit.loglik);
  c.convergence_tol = 1e9;
  EXPECT_TRUE(fit_mle(Family::MixedGEV, data, c).converged);
}

TEST(FitMle, AllSeedsInfeasibleIsAFitError) {
  const auto data = exact_dataset({100, 200, 300});
  FitConfig c = quick_config();
  c.max_generations = 5;
  c.bounds = {{0, 10}, {-2, -1}, {0, 0.1}};  // negative scales only
  EXPECT_THROW(fit_mle(Family::GEV, data, c), FitError);
}

TEST(FitMle, InvalidConfigIsRejected) {
  const auto data = exact_dataset({100, 200, 300});
  FitConfig c = quick_config();
  c.crossover_rate = 0.0;
  EXPECT_THROW(fit_mle(Family::GEV, data, c), ConfigError);
  c = quick_config();
  c.population_size = 3;
  EXPECT_THROW(fit_mle(Family::GEV, data, c), ConfigError);
  c = quick_config();
  c.bounds = {{0, 10}, {1, 1}, {0, 0.1}};
  EXPECT_THROW(fit_mle(Family::GEV, data, c), ConfigError);
  c = quick_config();
  c.seeds.clear();
  EXPECT_THROW(fit_mle(Family::GEV, data, c), ConfigError);
}

TEST(FitMle, DefaultBoundsAreFiniteAndOrdered) {
  const auto data = exact_dataset(kMixture.sample(100, 1));
  for (Family f : kAllFamilies) {
    const auto box = default_bounds(f, data);
    EXPECT_EQ(box.size(), parameter_count(f));
    for (const Bound& b : box) {
      EXPECT_TRUE(std::isfinite(b.lower) && std::isfinite(b.upper));
      EXPECT_LT(b.lower, b.upper);
    }
  }
}
