#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace floodrisk {

// Measurement-error model attached to a single discharge observation.
struct ErrorModel {
  enum class Kind { None, NormalCv, Triangular };

  Kind kind = Kind::None;
  double cv = 0.0;     // NormalCv: standard deviation = cv * discharge
  double lower = 0.0;  // Triangular support, m^3/s
  double upper = 0.0;
  double mode = 0.0;   // Triangular mode, m^3/s

  static ErrorModel none() { return {}; }
  static ErrorModel normal_cv(double cv);
  static ErrorModel triangular(double lower, double upper, std::optional<double> mode = {});
};

// Distribution of a paleoflood bound's age. Uniform on [age_lower,
// age_upper] unless configured otherwise.
struct AgeModel {
  enum class Kind { Fixed, Uniform, Triangular };
  Kind kind = Kind::Uniform;
};

struct AnnualPeak {
  int water_year = 0;
  double discharge = 0.0;  // m^3/s
  ErrorModel error;
};

struct HistoricalFlood {
  int year = 0;
  double discharge = 0.0;  // m^3/s
  ErrorModel error;
};

// Non-exceedance evidence: no flood above the bound over the bound's age.
struct PaleoBound {
  double discharge_lower = 0.0;  // m^3/s
  double discharge_upper = 0.0;  // m^3/s
  double age_lower = 0.0;        // years before present
  double age_upper = 0.0;
  ErrorModel discharge_error;  // triangular over [discharge_lower, discharge_upper]
  AgeModel age_model;
  // Minimum observable discharge; the bound's per-year probability is the
  // model mass between this value and the bound's upper limit.
  double min_observable = 0.0;
};

// Threshold censoring of the historical period: over record_length years,
// exactly exceedance_count floods exceeded threshold.
struct CensoringSpec {
  double threshold = 0.0;  // X0, m^3/s
  double record_length = 0.0;  // h, years
  int exceedance_count = 0;    // k
};

class PeakDataset {
 public:
  PeakDataset() = default;
  // Validates all invariants; throws DataError on violation.
  PeakDataset(std::vector<AnnualPeak> peaks, std::vector<HistoricalFlood> historical,
              CensoringSpec censoring, std::vector<PaleoBound> paleo);

  const std::vector<AnnualPeak>& peaks() const { return peaks_; }
  const std::vector<HistoricalFlood>& historical() const { return historical_; }
  const CensoringSpec& censoring() const { return censoring_; }
  const std::vector<PaleoBound>& paleo() const { return paleo_; }

  // Effective record count n = peaks + historical + paleo (used for BIC).
  std::size_t record_count() const { return peaks_.size() + historical_.size() + paleo_.size(); }

  // Every point observation (gaged and historical discharges).
  std::vector<double> point_discharges() const;

 private:
  std::vector<AnnualPeak> peaks_;
  std::vector<HistoricalFlood> historical_;
  CensoringSpec censoring_;
  std::vector<PaleoBound> paleo_;
};

// ---------------------------------------------------------------- USGS RDB

struct RdbOptions {
  // Multiplier applied to peak_va (1 for m^3/s files, kCfsToCms for NWIS
  // exports in ft^3/s).
  double discharge_factor = 1.0;
};

inline constexpr double kCfsToCms = 0.028316846592;

struct RdbParseResult {
  std::vector<AnnualPeak> peaks;
  std::string site_no;
  std::size_t skipped = 0;  // rows with missing or non-numeric peak_va
};

// Parses the NWIS peak-flow RDB export. Throws ParseError on an empty file
// or a header missing site_no, peak_dt or peak_va.
RdbParseResult parse_usgs_rdb(std::istream& in, const RdbOptions& options = {});

// Writes peaks in the same tab-delimited layout (site_no, peak_dt, peak_va).
// Discharges are written in shortest round-trip form.
void write_usgs_rdb(std::ostream& out, const std::vector<AnnualPeak>& peaks,
                    const std::string& site_no);

// ---------------------------------------------------------------- historical / paleo CSV

struct HistoricalPaleoRecords {
  std::vector<HistoricalFlood> historical;
  std::vector<PaleoBound> paleo;
};

// CSV with header kind,year_or_age_lower,age_upper,discharge_or_lower,discharge_upper.
// kind is "historical" or "paleo". Throws ParseError.
HistoricalPaleoRecords parse_historical_paleo_csv(std::istream& in);

// Default censoring derived from the records: threshold = smallest historical
// discharge, record length = gage start year - earliest historical year,
// count = number of historical floods. Optional overrides replace the
// defaults.
CensoringSpec default_censoring(const std::vector<AnnualPeak>& peaks,
                                const std::vector<HistoricalFlood>& historical,
                                std::optional<double> threshold = {},
                                std::optional<double> record_length = {});

// ---------------------------------------------------------------- error models

struct ErrorConfig {
  double cv_gage = 0.10;
  double cv_historical = 0.25;
  // Triangular mode as a fraction of the paleo bound range (0.5 = midpoint).
  double paleo_mode_fraction = 0.5;
  AgeModel::Kind age_kind = AgeModel::Kind::Uniform;
};

// Returns a copy of the dataset with every record carrying an error model.
// Throws ConfigError for negative coefficients of variation.
PeakDataset attach_error_models(const PeakDataset& dataset, const ErrorConfig& config);

// ---------------------------------------------------------------- plotting positions

struct PlottingPoint {
  enum class Source { Gage, Historical, Paleo };
  Source source = Source::Gage;
  int year = 0;  // water year / historical year; 0 for paleo
  double discharge = 0.0;
  double return_period = 0.0;
};

// Weibull plotting positions: gaged peaks T = (n + 1) / rank; historical
// floods T = (h + 1) / rank over the censoring record length; a paleo bound
// is placed at T = (mean age + 1) for its upper discharge. Throws DataError
// when there are no gaged peaks.
std::vector<PlottingPoint> empirical_return_periods(const PeakDataset& dataset);

}  // namespace floodrisk
