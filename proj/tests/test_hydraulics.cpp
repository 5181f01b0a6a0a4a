#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "floodrisk/errors.hpp"
#include "floodrisk/hydraulics.hpp"

using namespace floodrisk;

namespace {

std::ifstream fixture(const std::string& name) {
  std::ifstream in(std::string(FLOODRISK_FIXTURES) + "/" + name);
  if (!in) throw std::runtime_error("missing fixture " + name);
  return in;
}

Hydrograph make(std::vector<double> q, double step = 1800.0) {
  Hydrograph h;
  h.step = step;
  h.ordinates = std::move(q);
  h.label = "test";
  return h;
}

// Storage rises quadratically with stage; no outflow below the spillway at 20 m.
ReservoirSpec synthetic_reservoir(double crest = 25.0) {
  std::vector<double> stages, storage, discharge;
  for (double s = 0; s <= 60.0; s += 1.0) {
    stages.push_back(s);
    storage.push_back(2.0e5 * s * s);
    discharge.push_back(s <= 20 ? 0.0 : 40.0 * std::pow(s - 20.0, 1.5));
  }
  ReservoirSpec r;
  r.stage_storage = RatingCurve(stages, storage);
  r.stage_discharge = RatingCurve(stages, discharge);
  r.initial_stage = 18.0;
  r.flood_pool_top = 20.0;
  r.crest = crest;
  return r;
}

ReservoirSpec puls_reservoir() {
  auto s = fixture("puls_storage.csv");
  auto q = fixture("puls_discharge.csv");
  ReservoirSpec r;
  r.stage_storage = parse_rating_csv(s);
  r.stage_discharge = parse_rating_csv(q);
  r.initial_stage = 0.0;
  r.flood_pool_top = 4.0;
  r.crest = 5.0;
  return r;
}

double round_sig(double x, int digits) {
  if (x == 0) return 0;
  const double scale = std::pow(10.0, digits - 1 - static_cast<int>(std::floor(std::log10(std::abs(x)))));
  return std::round(x * scale) / scale;
}

}  // namespace

// ------------------------------------------------------------------ scaling and volume

TEST(Scaling, SamePeakIsIdentity) {
  const auto h = make({0, 10, 5});
  EXPECT_EQ(scale_hydrograph(h, 10.0).ordinates, h.ordinates);
}

TEST(Scaling, FactorTwo) {
  const auto s = scale_hydrograph(make({0, 10, 5}), 20.0);
  EXPECT_EQ(s.ordinates, (std::vector<double>{0, 20, 10}));
  EXPECT_EQ(s.step, 1800.0);
}

TEST(Scaling, VolumeScalesByTheSameFactor) {
  const auto h = gamma_pulse("g", 12.0, 4.0);
  const auto s = scale_hydrograph(h, 7.5);
  EXPECT_NEAR(cumulative_volume(s).back(), 7.5 * cumulative_volume(h).back(), 1e-9 * cumulative_volume(s).back());
  EXPECT_EQ(s.ordinates.size(), h.ordinates.size());
}

TEST(Scaling, AllZeroIsAnError) {
  EXPECT_THROW(scale_hydrograph(make({0, 0, 0}), 5.0), DataError);
  EXPECT_THROW(scale_hydrograph(make({0, 1, 0}), 0.0), DataError);
}

TEST(Volume, RectangleRule) {
  EXPECT_EQ(cumulative_volume(make({10, 10})), (std::vector<double>{18000, 36000}));
  EXPECT_EQ(cumulative_volume(make({0, 0, 0})), (std::vector<double>{0, 0, 0}));
}

TEST(Volume, GammaPulseMatchesRectangleOracle) {
  const auto h = gamma_pulse("g", 10.0, 3.0, 72.0, 1800.0);
  ASSERT_EQ(h.ordinates.size(), 145u);
  double total = 0.0;
  for (int i = 0; i <= 144; ++i) {
    const double u = i * 0.5 / 10.0;
    total += (i == 0 ? 0.0 : std::pow(u, 3.0) * std::exp(3.0 * (1.0 - u))) * 1800.0;
  }
  EXPECT_NEAR(cumulative_volume(h).back(), total, 1e-9 * total);
  EXPECT_NEAR(h.peak(), 1.0, 1e-12);
}

TEST(Volume, SmallerExponentDominatesPointwise) {
  const auto wide = gamma_pulse("wide", 12.0, 2.0);
  const auto narrow = gamma_pulse("narrow", 12.0, 6.0);
  const auto vw = cumulative_volume(wide), vn = cumulative_volume(narrow);
  for (std::size_t i = 0; i < vw.size(); ++i) EXPECT_GE(vw[i], vn[i]);
}

TEST(Resample, FourHourToHalfHour) {
  auto in = fixture("hydrograph_irregular.csv");
  const auto h = parse_hydrograph_csv(in, "irregular", 1800.0);
  EXPECT_EQ(h.step, 1800.0);
  ASSERT_EQ(h.ordinates.size(), 21u);
  EXPECT_DOUBLE_EQ(h.ordinates[4], 50.0);   // 2 h into the 0 -> 100 ramp
  EXPECT_DOUBLE_EQ(h.ordinates[8], 100.0);
  EXPECT_DOUBLE_EQ(h.ordinates[20], 0.0);
}

TEST(Resample, NonUniformWithoutStepIsAnError) {
  auto in = fixture("hydrograph_irregular.csv");
  EXPECT_THROW(parse_hydrograph_csv(in, "irregular"), ParseError);
}

// ------------------------------------------------------------------ rating curves

TEST(Rating, InterpolatesAndExtrapolatesLinearly) {
  const RatingCurve c({0, 2, 5}, {0, 100, 400});
  EXPECT_DOUBLE_EQ(c.at(1.0), 50.0);
  EXPECT_DOUBLE_EQ(c.at(3.5), 250.0);
  EXPECT_DOUBLE_EQ(c.at(6.0), 500.0);
}

TEST(Rating, RejectsBadTables) {
  EXPECT_THROW(RatingCurve({0}, {0}), DataError);
  EXPECT_THROW(RatingCurve({0, 0}, {0, 1}), DataError);
  EXPECT_THROW(RatingCurve({0, 1}, {1, 0}), DataError);
}

TEST(Rating, ReservoirCoverageIsChecked) {
  auto r = synthetic_reservoir();
  r.crest = 70.0;
  EXPECT_THROW(route_level_pool(make({1, 1}), r), DataError);
  r = synthetic_reservoir();
  r.initial_stage = 21.0;
  EXPECT_THROW(route_level_pool(make({1, 1}), r), DataError);
}

// ------------------------------------------------------------------ routing

TEST(Routing, SteadyStateHoldsStage) {
  auto r = synthetic_reservoir();
  r.flood_pool_top = 22.0;
  r.initial_stage = 21.5;
  const double q = r.stage_discharge.at(21.5);
  const auto trace = route_level_pool(make(std::vector<double>(50, q)), r);
  for (double s : trace.stages) EXPECT_NEAR(s, 21.5, 1e-12 * 21.5);
  for (double o : trace.outflows) EXPECT_NEAR(o, q, 1e-9 * q);
}

TEST(Routing, PureStorageKeepsAllInflow) {
  const auto trace = route_level_pool(make({0, 50, 120, 80, 30, 10, 0}), synthetic_reservoir());
  EXPECT_EQ(trace.outflow_volume, 0.0);
  EXPECT_NEAR(trace.storage_change, trace.inflow_volume, 1e-12 * trace.inflow_volume);
  EXPECT_FALSE(trace.overtopped);
}

TEST(Routing, HandSteppedPulsFixture) {
  auto in = fixture("puls_5step.csv");
  std::string line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 's') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    std::vector<double> row(4);
    ss >> row[0] >> row[1] >> row[2] >> row[3];
    rows.push_back(row);
  }
  ASSERT_EQ(rows.size(), 6u);
  std::vector<double> inflow;
  for (const auto& r : rows) inflow.push_back(r[1]);
  const auto trace = route_level_pool(make(inflow), puls_reservoir());
  ASSERT_EQ(trace.stages.size(), 6u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(round_sig(trace.stages[i], 4), rows[i][2]) << "step " << i;
    EXPECT_EQ(round_sig(trace.outflows[i], 4), rows[i][3]) << "step " << i;
  }
  EXPECT_LT(trace.mass_balance_error(), 1e-3);
}

TEST(Routing, TraceInvariants) {
  const auto r = synthetic_reservoir();
  for (double peak : {100.0, 800.0, 3000.0, 9000.0}) {
    for (double m : {1.5, 3.0, 8.0}) {
      const auto in = scale_hydrograph(gamma_pulse("g", 18.0, m), peak);
      const auto t = route_level_pool(in, r);
      ASSERT_EQ(t.stages.size(), in.ordinates.size());
      EXPECT_EQ(t.peak_stage, *std::max_element(t.stages.begin(), t.stages.end()));
      EXPECT_EQ(t.overtopped, t.peak_stage > r.crest);
      EXPECT_LT(t.mass_balance_error(), 1e-3);
      EXPECT_LE(*std::max_element(t.outflows.begin(), t.outflows.end()), in.peak());
    }
  }
}

TEST(Routing, PeakStageNonDecreasingInScale) {
  const auto r = synthetic_reservoir();
  const auto shape = gamma_pulse("g", 18.0, 3.0);
  double prev = -1.0;
  for (double peak = 100.0; peak < 20000.0; peak *= 1.2) {
    const double s = route_level_pool(scale_hydrograph(shape, peak), r).peak_stage;
    EXPECT_GE(s, prev);
    prev = s;
  }
}

TEST(Routing, LargerCumulativeVolumeGivesHigherStage) {
  const auto r = synthetic_reservoir();
  const auto wide = gamma_pulse("wide", 18.0, 2.0);
  const auto narrow = gamma_pulse("narrow", 18.0, 6.0);
  for (double peak : {500.0, 2000.0, 6000.0}) {
    EXPECT_GE(route_level_pool(scale_hydrograph(wide, peak), r).peak_stage,
              route_level_pool(scale_hydrograph(narrow, peak), r).peak_stage);
  }
}

TEST(Routing, StageBelowLowestPointIsARoutingError) {
  auto r = synthetic_reservoir();
  r.flood_pool_top = 22.0;
  r.initial_stage = 22.0;
  // Outflow at 22 m exceeds any inflow; with the curves starting at 21 m the
  // pool drains below the table.
  std::vector<double> stages, storage, discharge;
  for (double s = 21.0; s <= 60.0; s += 1.0) {
    stages.push_back(s);
    storage.push_back(1000.0 * (s - 21.0));
    discharge.push_back(1000.0 * (s - 20.0));
  }
  r.stage_storage = RatingCurve(stages, storage);
  r.stage_discharge = RatingCurve(stages, discharge);
  EXPECT_THROW(route_level_pool(make(std::vector<double>(20, 0.0)), r), RoutingError);
}

// ------------------------------------------------------------------ overtopping search

TEST(Overtopping, MatchesGridScan) {
  const auto r = synthetic_reservoir();
  const auto shape = gamma_pulse("g", 18.0, 3.0);
  OvertoppingSearch search;
  search.reference_peak = 1000.0;
  const auto found = find_overtopping_peak(shape, r, search);
  ASSERT_TRUE(found.peak.has_value());

  double p = 100.0;
  while (!route_level_pool(scale_hydrograph(shape, p), r).overtopped) p *= 1.001;
  EXPECT_LE(std::abs(*found.peak - p) / p, 1.1e-3) << *found.peak << " vs grid " << p;
  EXPECT_TRUE(route_level_pool(scale_hydrograph(shape, *found.peak), r).overtopped);
  EXPECT_FALSE(route_level_pool(scale_hydrograph(shape, *found.peak * (1 - 2e-4)), r).overtopped);
}

TEST(Overtopping, HigherCrestNeedsLargerPeak) {
  const auto shape = gamma_pulse("g", 18.0, 3.0);
  OvertoppingSearch search;
  search.reference_peak = 1000.0;
  const auto low = find_overtopping_peak(shape, synthetic_reservoir(25.0), search);
  const auto high = find_overtopping_peak(shape, synthetic_reservoir(50.0), search);
  ASSERT_TRUE(low.peak && high.peak);
  EXPECT_GT(*high.peak, *low.peak);
}

TEST(Overtopping, NoStorageBelowCrestOvertopsAtTheFloor) {
  ReservoirSpec r;
  r.stage_storage = RatingCurve({0, 10, 20}, {0, 0, 1e6});
  r.stage_discharge = RatingCurve({0, 10, 20}, {0, 0, 100});
  r.initial_stage = 0.0;
  r.flood_pool_top = 5.0;
  r.crest = 10.0;
  OvertoppingSearch search;
  search.reference_peak = 100.0;
  const auto found = find_overtopping_peak(gamma_pulse("g", 12.0, 3.0), r, search);
  ASSERT_TRUE(found.peak.has_value());
  EXPECT_DOUBLE_EQ(*found.peak, search.floor_factor * search.reference_peak);
  EXPECT_EQ(found.iterations, 0);
}

TEST(Overtopping, UnreachableCrestReportsNoPeak) {
  const auto r = synthetic_reservoir(59.0);
  OvertoppingSearch search;
  search.reference_peak = 1.0;
  search.ceiling_factor = 10.0;
  const auto found = find_overtopping_peak(gamma_pulse("g", 18.0, 3.0), r, search);
  EXPECT_FALSE(found.peak.has_value());
  EXPECT_EQ(found.ceiling, 10.0);
}
