#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "floodrisk/fitting.hpp"
#include "floodrisk/hydraulics.hpp"
#include "floodrisk/hydrodata.hpp"
#include "floodrisk/safety.hpp"

namespace floodrisk {

inline constexpr int kConfigSchemaVersion = 1;

struct HydrographSource {
  std::string label;
  std::filesystem::path path;
  std::optional<double> resample_step;  // seconds
};

struct ReservoirSource {
  std::filesystem::path stage_storage;
  std::filesystem::path stage_discharge;
  double initial_stage = 0.0;
  double flood_pool_top = 0.0;
  double crest = 0.0;
};

// Everything a CLI run needs. Paths are resolved against the directory of the
// config file when loaded.
struct RunConfig {
  std::filesystem::path rdb;
  double rdb_factor = 1.0;  // 1 for m^3/s, kCfsToCms for ft^3/s
  std::filesystem::path historical_paleo;  // optional
  std::optional<double> censoring_threshold;
  std::optional<double> censoring_record_length;

  ErrorConfig errors;
  FitConfig fit;
  std::vector<Family> families;

  std::vector<HydrographSource> hydrographs;
  double routing_step = 1800.0;
  std::optional<ReservoirSource> reservoir;
  OvertoppingSearch overtopping;  // reference_peak 0 means largest gaged peak
  SafetyThresholds thresholds;

  std::vector<double> hazard_return_periods;
  std::vector<double> curve_return_periods;
  Family comparison_a = Family::LP3;
  Family comparison_b = Family::MixedGEV;
  std::vector<double> comparison_return_periods;

  std::filesystem::path output_dir;
};

// Reads and validates a schema-versioned JSON config. Throws ConfigError or
// ParseError with the offending key.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir);

// Loads the dataset named by the config and attaches the error models.
PeakDataset load_dataset(const RunConfig& config);

std::vector<Hydrograph> load_hydrographs(const RunConfig& config);
ReservoirSpec load_reservoir(const RunConfig& config);

}  // namespace floodrisk
