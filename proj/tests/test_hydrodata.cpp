#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "floodrisk/errors.hpp"
#include "floodrisk/hydrodata.hpp"

using namespace floodrisk;

namespace {

std::ifstream fixture(const std::string& name) {
  std::ifstream in(std::string(FLOODRISK_FIXTURES) + "/" + name);
  if (!in) throw std::runtime_error("missing fixture " + name);
  return in;
}

std::vector<AnnualPeak> peaks_from(std::vector<std::pair<int, double>> rows) {
  std::vector<AnnualPeak> out;
  for (auto [y, q] : rows) out.push_back({y, q, ErrorModel::none()});
  return out;
}

PeakDataset small_dataset() {
  std::vector<HistoricalFlood> hist{{1864, 1100.0, {}}, {1893, 700.0, {}}};
  PaleoBound b;
  b.discharge_lower = 1500;
  b.discharge_upper = 2500;
  b.age_lower = 700;
  b.age_upper = 870;
  return PeakDataset(peaks_from({{1895, 120}, {1896, 80}, {1897, 300}}), hist,
                     {700.0, 31.0, 2}, {b});
}

}  // namespace

// ------------------------------------------------------------------ RDB

TEST(Rdb, ParsesDataRowsAfterCommentsHeaderAndFormat) {
  auto in = fixture("peaks_small.rdb");
  const auto r = parse_usgs_rdb(in);
  ASSERT_EQ(r.peaks.size(), 3u);
  EXPECT_EQ(r.skipped, 0u);
  EXPECT_EQ(r.site_no, "07099500");
}

TEST(Rdb, ReadsYearAndDischarge) {
  auto in = fixture("peaks_small.rdb");
  const auto r = parse_usgs_rdb(in);
  EXPECT_EQ(r.peaks[1].water_year, 1921);
  EXPECT_EQ(r.peaks[1].discharge, 283.0);
  EXPECT_EQ(r.peaks[1].error.kind, ErrorModel::Kind::None);
}

TEST(Rdb, OctoberPeakBelongsToNextWaterYear) {
  auto in = fixture("peaks_small.rdb");
  EXPECT_EQ(parse_usgs_rdb(in).peaks[2].water_year, 1923);
}

TEST(Rdb, UnknownMonthKeepsCalendarYear) {
  std::istringstream in("site_no\tpeak_dt\tpeak_va\n15s\t10d\t8s\n1\t1899-00-00\t50\n");
  EXPECT_EQ(parse_usgs_rdb(in).peaks.at(0).water_year, 1899);
}

TEST(Rdb, MissingValueIsSkippedAndCounted) {
  auto in = fixture("peaks_missing_value.rdb");
  const auto r = parse_usgs_rdb(in);
  EXPECT_EQ(r.peaks.size(), 2u);
  EXPECT_EQ(r.skipped, 1u);
}

TEST(Rdb, NonNumericValueIsSkipped) {
  std::istringstream in("site_no\tpeak_dt\tpeak_va\n15s\t10d\t8s\n1\t1900-05-01\tabc\n1\t1901-05-01\t10\n");
  const auto r = parse_usgs_rdb(in);
  EXPECT_EQ(r.peaks.size(), 1u);
  EXPECT_EQ(r.skipped, 1u);
}

TEST(Rdb, MissingColumnNamesTheColumn) {
  auto in = fixture("peaks_bad_header.rdb");
  try {
    parse_usgs_rdb(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("peak_va"), std::string::npos);
  }
}

TEST(Rdb, EmptyFileIsAnError) {
  auto in = fixture("empty.rdb");
  EXPECT_THROW(parse_usgs_rdb(in), ParseError);
  std::istringstream comments_only("# only a comment\n");
  EXPECT_THROW(parse_usgs_rdb(comments_only), ParseError);
}

TEST(Rdb, CfsFactorConverts) {
  auto in = fixture("peaks_small.rdb");
  const auto r = parse_usgs_rdb(in, {kCfsToCms});
  EXPECT_DOUBLE_EQ(r.peaks[0].discharge, 150.0 * 0.028316846592);
}

TEST(Rdb, RoundTripIsLossless) {
  std::mt19937_64 rng(99);
  std::lognormal_distribution<double> q(5.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<AnnualPeak> peaks;
    for (int y = 1900; y < 1900 + 50; ++y) peaks.push_back({y, q(rng), {}});
    std::ostringstream out;
    write_usgs_rdb(out, peaks, "07099500");
    std::istringstream in(out.str());
    const auto back = parse_usgs_rdb(in);
    ASSERT_EQ(back.peaks.size(), peaks.size());
    for (std::size_t i = 0; i < peaks.size(); ++i) {
      EXPECT_EQ(back.peaks[i].water_year, peaks[i].water_year);
      EXPECT_EQ(back.peaks[i].discharge, peaks[i].discharge);
    }
  }
}

// ------------------------------------------------------------------ historical / paleo CSV

TEST(HistoricalCsv, ParsesBothKinds) {
  auto in = fixture("historical_paleo.csv");
  const auto r = parse_historical_paleo_csv(in);
  ASSERT_EQ(r.historical.size(), 2u);
  ASSERT_EQ(r.paleo.size(), 1u);
  EXPECT_EQ(r.historical[0].year, 1864);
  EXPECT_EQ(r.historical[1].discharge, 700.0);
  EXPECT_EQ(r.paleo[0].age_lower, 700.0);
  EXPECT_EQ(r.paleo[0].age_upper, 870.0);
  EXPECT_EQ(r.paleo[0].discharge_lower, 1500.0);
  EXPECT_EQ(r.paleo[0].discharge_upper, 2500.0);
  EXPECT_EQ(r.paleo[0].min_observable, 0.0);
}

TEST(HistoricalCsv, RejectsUnknownKindAndMissingColumns) {
  std::istringstream bad_kind("kind,year_or_age_lower,age_upper,discharge_or_lower,discharge_upper\nflood,1,,2,\n");
  EXPECT_THROW(parse_historical_paleo_csv(bad_kind), ParseError);
  std::istringstream bad_header("kind,year\nhistorical,1900\n");
  EXPECT_THROW(parse_historical_paleo_csv(bad_header), ParseError);
  std::istringstream empty("");
  EXPECT_THROW(parse_historical_paleo_csv(empty), ParseError);
}

// ------------------------------------------------------------------ dataset invariants

TEST(Dataset, RecordCountSumsAllClasses) { EXPECT_EQ(small_dataset().record_count(), 6u); }

TEST(Dataset, RejectsViolations) {
  EXPECT_THROW(PeakDataset(peaks_from({{1900, 10}, {1900, 20}}), {}, {}, {}), DataError);
  EXPECT_THROW(PeakDataset(peaks_from({{1900, 0}}), {}, {}, {}), DataError);
  std::vector<HistoricalFlood> hist{{1864, 500.0, {}}};
  EXPECT_THROW(PeakDataset({}, hist, {600.0, 30.0, 1}, {}), DataError);  // below X0
  EXPECT_THROW(PeakDataset({}, hist, {400.0, 30.0, 2}, {}), DataError);  // k mismatch
  EXPECT_THROW(PeakDataset({}, hist, {400.0, 0.5, 1}, {}), DataError);   // k > h
  PaleoBound b;
  b.discharge_lower = 2500;
  b.discharge_upper = 1500;
  b.age_lower = 700;
  b.age_upper = 870;
  EXPECT_THROW(PeakDataset({}, {}, {}, {b}), DataError);
  b.discharge_lower = 1000;
  b.age_lower = 900;
  EXPECT_THROW(PeakDataset({}, {}, {}, {b}), DataError);
}

TEST(Dataset, DefaultCensoringFromRecords) {
  const auto peaks = peaks_from({{1896, 10}, {1895, 20}});
  std::vector<HistoricalFlood> hist{{1893, 900.0, {}}, {1864, 1100.0, {}}};
  const auto c = default_censoring(peaks, hist);
  EXPECT_EQ(c.threshold, 900.0);
  EXPECT_EQ(c.record_length, 31.0);
  EXPECT_EQ(c.exceedance_count, 2);
  const auto o = default_censoring(peaks, hist, 800.0, 60.0);
  EXPECT_EQ(o.threshold, 800.0);
  EXPECT_EQ(o.record_length, 60.0);
}

// ------------------------------------------------------------------ error models

TEST(ErrorModels, ZeroCvMeansNoError) {
  ErrorConfig cfg;
  cfg.cv_gage = 0.0;
  const auto d = attach_error_models(small_dataset(), cfg);
  for (const auto& p : d.peaks()) EXPECT_EQ(p.error.kind, ErrorModel::Kind::None);
  for (const auto& h : d.historical()) EXPECT_EQ(h.error.kind, ErrorModel::Kind::NormalCv);
}

TEST(ErrorModels, CvGivesStandardDeviationProportionalToDischarge) {
  const auto d = attach_error_models(
      PeakDataset(peaks_from({{1900, 100}}), {}, {}, {}), ErrorConfig{});
  const auto& e = d.peaks()[0].error;
  EXPECT_EQ(e.kind, ErrorModel::Kind::NormalCv);
  EXPECT_DOUBLE_EQ(e.cv * d.peaks()[0].discharge, 10.0);
}

TEST(ErrorModels, PaleoDefaultsToSymmetricTriangle) {
  const auto d = attach_error_models(small_dataset(), ErrorConfig{});
  const auto& e = d.paleo()[0].discharge_error;
  EXPECT_EQ(e.kind, ErrorModel::Kind::Triangular);
  EXPECT_EQ(e.lower, 1500.0);
  EXPECT_EQ(e.upper, 2500.0);
  EXPECT_EQ(e.mode, 2000.0);
  EXPECT_EQ(d.paleo()[0].age_model.kind, AgeModel::Kind::Uniform);
}

TEST(ErrorModels, NegativeCvIsAConfigError) {
  ErrorConfig cfg;
  cfg.cv_gage = -0.1;
  EXPECT_THROW(attach_error_models(small_dataset(), cfg), ConfigError);
  cfg.cv_gage = 0.1;
  cfg.cv_historical = -1;
  EXPECT_THROW(attach_error_models(small_dataset(), cfg), ConfigError);
}

// ------------------------------------------------------------------ plotting positions

TEST(PlottingPositions, LargestOf81IsEightyTwoYears) {
  std::vector<AnnualPeak> peaks;
  for (int i = 0; i < 81; ++i) peaks.push_back({1895 + i, 10.0 + i, {}});
  const auto pts = empirical_return_periods(PeakDataset(peaks, {}, {}, {}));
  EXPECT_EQ(pts.front().discharge, 90.0);
  EXPECT_EQ(pts.front().return_period, 82.0);
}

TEST(PlottingPositions, SinglePeakIsTwoYears) {
  const auto pts = empirical_return_periods(PeakDataset(peaks_from({{1900, 5}}), {}, {}, {}));
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_EQ(pts[0].return_period, 2.0);
}

TEST(PlottingPositions, EmptyDatasetIsAnError) {
  EXPECT_THROW(empirical_return_periods(PeakDataset()), DataError);
}

TEST(PlottingPositions, HistoricalAndPaleoUseTheirRecordLength) {
  const auto pts = empirical_return_periods(small_dataset());
  ASSERT_EQ(pts.size(), 6u);
  EXPECT_EQ(pts[3].source, PlottingPoint::Source::Historical);
  EXPECT_EQ(pts[3].discharge, 1100.0);
  EXPECT_EQ(pts[3].return_period, 32.0);
  EXPECT_EQ(pts[4].return_period, 16.0);
  EXPECT_EQ(pts[5].source, PlottingPoint::Source::Paleo);
  EXPECT_EQ(pts[5].return_period, 786.0);
}

TEST(PlottingPositions, StrictlyDecreasingInRankAndAboveOne) {
  std::mt19937_64 rng(4);
  std::gamma_distribution<double> q(2.0, 100.0);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<AnnualPeak> peaks;
    for (int i = 0; i < 60; ++i) peaks.push_back({1900 + i, q(rng), {}});
    const auto pts = empirical_return_periods(PeakDataset(peaks, {}, {}, {}));
    for (std::size_t i = 0; i < pts.size(); ++i) {
      EXPECT_GT(pts[i].return_period, 1.0);
      if (i > 0) {
        EXPECT_LT(pts[i].return_period, pts[i - 1].return_period);
        EXPECT_LE(pts[i].discharge, pts[i - 1].discharge);
      }
    }
  }
}
