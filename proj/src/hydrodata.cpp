#include "floodrisk/hydrodata.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "floodrisk/errors.hpp"

namespace floodrisk {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::optional<double> to_double(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
  return value;
}

std::optional<int> to_int(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) return std::nullopt;
  int value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
  return value;
}

// Water year (October through September) of an NWIS date "YYYY-MM-DD".
// Unknown months ("00") keep the calendar year.
std::optional<int> water_year_of(const std::string& date) {
  const std::string t = trim(date);
  if (t.size() < 4) return std::nullopt;
  const auto year = to_int(t.substr(0, 4));
  if (!year) return std::nullopt;
  if (t.size() >= 7 && t[4] == '-') {
    const auto month = to_int(t.substr(5, 2));
    if (month && *month >= 10) return *year + 1;
  }
  return year;
}

double expected_age(const PaleoBound& b) { return 0.5 * (b.age_lower + b.age_upper); }

}  // namespace

// ---------------------------------------------------------------- ErrorModel

ErrorModel ErrorModel::normal_cv(double cv) {
  if (!(cv >= 0) || !std::isfinite(cv)) throw ConfigError("coefficient of variation must be >= 0");
  if (cv == 0) return none();
  ErrorModel m;
  m.kind = Kind::NormalCv;
  m.cv = cv;
  return m;
}

ErrorModel ErrorModel::triangular(double lower, double upper, std::optional<double> mode) {
  if (!(lower < upper)) throw ConfigError("triangular error model needs lower < upper");
  ErrorModel m;
  m.kind = Kind::Triangular;
  m.lower = lower;
  m.upper = upper;
  m.mode = mode.value_or(0.5 * (lower + upper));
  if (!(m.mode >= lower && m.mode <= upper)) {
    throw ConfigError("triangular mode must lie within [lower, upper]");
  }
  return m;
}

// ---------------------------------------------------------------- PeakDataset

PeakDataset::PeakDataset(std::vector<AnnualPeak> peaks, std::vector<HistoricalFlood> historical,
                         CensoringSpec censoring, std::vector<PaleoBound> paleo)
    : peaks_(std::move(peaks)),
      historical_(std::move(historical)),
      censoring_(censoring),
      paleo_(std::move(paleo)) {
  std::set<int> years;
  for (const AnnualPeak& p : peaks_) {
    if (!(p.discharge > 0) || !std::isfinite(p.discharge)) {
      throw DataError("annual peak in water year " + std::to_string(p.water_year) +
                      " has non-positive discharge");
    }
    if (!years.insert(p.water_year).second) {
      throw DataError("duplicate annual peak for water year " + std::to_string(p.water_year));
    }
  }
  const CensoringSpec& c = censoring_;
  if (c.exceedance_count < 0 || !(c.record_length >= 0)) {
    throw DataError("censoring record length and exceedance count must be non-negative");
  }
  if (c.exceedance_count != static_cast<int>(historical_.size())) {
    throw DataError("censoring exceedance count k=" + std::to_string(c.exceedance_count) +
                    " does not match " + std::to_string(historical_.size()) +
                    " historical floods");
  }
  if (c.exceedance_count > c.record_length) {
    throw DataError("censoring exceedance count exceeds the historical record length");
  }
  for (const HistoricalFlood& h : historical_) {
    if (!(h.discharge > 0)) throw DataError("historical flood with non-positive discharge");
    if (h.discharge < c.threshold) {
      throw DataError("historical flood of " + std::to_string(h.year) +
                      " is below the censoring threshold");
    }
  }
  for (const PaleoBound& b : paleo_) {
    if (!(b.discharge_lower > 0 && b.discharge_lower < b.discharge_upper)) {
      throw DataError("paleo bound needs 0 < discharge_lower < discharge_upper");
    }
    if (!(b.age_lower > 0 && b.age_lower < b.age_upper)) {
      throw DataError("paleo bound needs 0 < age_lower < age_upper");
    }
  }
}

std::vector<double> PeakDataset::point_discharges() const {
  std::vector<double> out;
  out.reserve(peaks_.size() + historical_.size());
  for (const AnnualPeak& p : peaks_) out.push_back(p.discharge);
  for (const HistoricalFlood& h : historical_) out.push_back(h.discharge);
  return out;
}

// ---------------------------------------------------------------- RDB

RdbParseResult parse_usgs_rdb(std::istream& in, const RdbOptions& options) {
  std::string line;
  std::vector<std::string> header;
  bool have_format_row = false;
  bool saw_any = false;
  RdbParseResult result;
  std::size_t site_col = 0, date_col = 0, value_col = 0;

  while (std::getline(in, line)) {
    strip_cr(line);
    saw_any = saw_any || !line.empty();
    if (line.empty() || line.front() == '#') continue;
    if (header.empty()) {
      header = split(line, '\t');
      const auto find = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw ParseError("RDB header is missing required column '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
      };
      site_col = find("site_no");
      date_col = find("peak_dt");
      value_col = find("peak_va");
      continue;
    }
    if (!have_format_row) {
      have_format_row = true;
      continue;
    }
    const std::vector<std::string> fields = split(line, '\t');
    const auto field = [&](std::size_t i) { return i < fields.size() ? fields[i] : std::string(); };
    const auto value = to_double(field(value_col));
    const auto year = water_year_of(field(date_col));
    if (!value || !(*value > 0) || !year) {
      ++result.skipped;
      continue;
    }
    if (result.site_no.empty()) result.site_no = trim(field(site_col));
    result.peaks.push_back({*year, *value * options.discharge_factor, ErrorModel::none()});
  }
  if (!saw_any) throw ParseError("RDB input is empty");
  if (header.empty()) throw ParseError("RDB input has no header row");
  return result;
}

void write_usgs_rdb(std::ostream& out, const std::vector<AnnualPeak>& peaks,
                    const std::string& site_no) {
  out << "# floodrisk annual peak export\n";
  out << "agency_cd\tsite_no\tpeak_dt\tpeak_va\n";
  out << "5s\t15s\t10d\t8s\n";
  char buf[64];
  for (const AnnualPeak& p : peaks) {
    const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), p.discharge);
    out << "USGS\t" << site_no << '\t' << p.water_year << "-00-00\t"
        << std::string_view(buf, static_cast<std::size_t>(end - buf)) << '\n';
  }
}

// ---------------------------------------------------------------- CSV

HistoricalPaleoRecords parse_historical_paleo_csv(std::istream& in) {
  std::string line;
  std::map<std::string, std::size_t> columns;
  HistoricalPaleoRecords out;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (trim(line).empty() || line.front() == '#') continue;
    const std::vector<std::string> fields = split(line, ',');
    if (columns.empty()) {
      for (std::size_t i = 0; i < fields.size(); ++i) columns[trim(fields[i])] = i;
      for (const char* required :
           {"kind", "year_or_age_lower", "age_upper", "discharge_or_lower", "discharge_upper"}) {
        if (!columns.count(required)) {
          throw ParseError(std::string("historical/paleo CSV is missing column '") + required + "'");
        }
      }
      continue;
    }
    const auto field = [&](const char* name) {
      const auto it = columns.find(name);
      if (it == columns.end() || it->second >= fields.size()) return std::string();
      return trim(fields[it->second]);
    };
    const auto fail = [&](const std::string& what) {
      return ParseError("historical/paleo CSV line " + std::to_string(line_no) + ": " + what);
    };
    const std::string kind = field("kind");
    if (kind == "historical") {
      const auto year = to_int(field("year_or_age_lower"));
      const auto q = to_double(field("discharge_or_lower"));
      if (!year || !q) throw fail("historical rows need a year and a discharge");
      out.historical.push_back({*year, *q, ErrorModel::none()});
    } else if (kind == "paleo") {
      const auto age_lo = to_double(field("year_or_age_lower"));
      const auto age_hi = to_double(field("age_upper"));
      const auto q_lo = to_double(field("discharge_or_lower"));
      const auto q_hi = to_double(field("discharge_upper"));
      if (!age_lo || !age_hi || !q_lo || !q_hi) {
        throw fail("paleo rows need age and discharge bounds");
      }
      PaleoBound b;
      b.age_lower = *age_lo;
      b.age_upper = *age_hi;
      b.discharge_lower = *q_lo;
      b.discharge_upper = *q_hi;
      if (const auto y_min = to_double(field("min_observable"))) b.min_observable = *y_min;
      out.paleo.push_back(b);
    } else {
      throw fail("unknown kind '" + kind + "'");
    }
  }
  if (columns.empty()) throw ParseError("historical/paleo CSV is empty");
  return out;
}

CensoringSpec default_censoring(const std::vector<AnnualPeak>& peaks,
                                const std::vector<HistoricalFlood>& historical,
                                std::optional<double> threshold,
                                std::optional<double> record_length) {
  CensoringSpec c;
  c.exceedance_count = static_cast<int>(historical.size());
  if (historical.empty()) {
    c.threshold = threshold.value_or(0.0);
    c.record_length = record_length.value_or(0.0);
    return c;
  }
  double min_q = historical.front().discharge;
  int first_hist = historical.front().year;
  for (const HistoricalFlood& h : historical) {
    min_q = std::min(min_q, h.discharge);
    first_hist = std::min(first_hist, h.year);
  }
  int first_gage = first_hist;
  if (!peaks.empty()) {
    first_gage = peaks.front().water_year;
    for (const AnnualPeak& p : peaks) first_gage = std::min(first_gage, p.water_year);
  }
  c.threshold = threshold.value_or(min_q);
  c.record_length = record_length.value_or(static_cast<double>(first_gage - first_hist));
  return c;
}

// ---------------------------------------------------------------- error models

PeakDataset attach_error_models(const PeakDataset& dataset, const ErrorConfig& config) {
  if (config.cv_gage < 0 || config.cv_historical < 0) {
    throw ConfigError("error coefficients of variation must be non-negative");
  }
  if (!(config.paleo_mode_fraction >= 0 && config.paleo_mode_fraction <= 1)) {
    throw ConfigError("paleo_mode_fraction must lie in [0, 1]");
  }
  std::vector<AnnualPeak> peaks = dataset.peaks();
  for (AnnualPeak& p : peaks) p.error = ErrorModel::normal_cv(config.cv_gage);
  std::vector<HistoricalFlood> historical = dataset.historical();
  for (HistoricalFlood& h : historical) h.error = ErrorModel::normal_cv(config.cv_historical);
  std::vector<PaleoBound> paleo = dataset.paleo();
  for (PaleoBound& b : paleo) {
    const double mode =
        b.discharge_lower + config.paleo_mode_fraction * (b.discharge_upper - b.discharge_lower);
    b.discharge_error = ErrorModel::triangular(b.discharge_lower, b.discharge_upper, mode);
    b.age_model.kind = config.age_kind;
  }
  return PeakDataset(std::move(peaks), std::move(historical), dataset.censoring(),
                     std::move(paleo));
}

// ---------------------------------------------------------------- plotting positions

std::vector<PlottingPoint> empirical_return_periods(const PeakDataset& dataset) {
  if (dataset.peaks().empty()) throw DataError("plotting positions need at least one annual peak");
  std::vector<PlottingPoint> out;

  std::vector<AnnualPeak> peaks = dataset.peaks();
  std::stable_sort(peaks.begin(), peaks.end(),
                   [](const AnnualPeak& a, const AnnualPeak& b) { return a.discharge > b.discharge; });
  const double n = static_cast<double>(peaks.size());
  for (std::size_t i = 0; i < peaks.size(); ++i) {
    out.push_back({PlottingPoint::Source::Gage, peaks[i].water_year, peaks[i].discharge,
                   (n + 1.0) / static_cast<double>(i + 1)});
  }

  std::vector<HistoricalFlood> hist = dataset.historical();
  std::stable_sort(hist.begin(), hist.end(), [](const HistoricalFlood& a, const HistoricalFlood& b) {
    return a.discharge > b.discharge;
  });
  const double h = std::max(dataset.censoring().record_length, static_cast<double>(hist.size()));
  for (std::size_t i = 0; i < hist.size(); ++i) {
    out.push_back({PlottingPoint::Source::Historical, hist[i].year, hist[i].discharge,
                   (h + 1.0) / static_cast<double>(i + 1)});
  }

  for (const PaleoBound& b : dataset.paleo()) {
    out.push_back({PlottingPoint::Source::Paleo, 0, b.discharge_upper, expected_age(b) + 1.0});
  }
  return out;
}

}  // namespace floodrisk
