#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "floodrisk/config.hpp"

namespace floodrisk {

// Command-line overrides layered over the config file.
struct CommandOptions {
  std::optional<std::string> family;  // family name or "all"
  std::optional<std::vector<std::uint64_t>> seeds;
  std::optional<std::filesystem::path> out_dir;
};

RunConfig apply_overrides(RunConfig config, const CommandOptions& options);

// "all" (or no name) selects the config's family list.
std::vector<Family> select_families(const RunConfig& config, const std::optional<std::string>& name);

std::string fit_artifact_name(Family family);  // fit_<FAMILY>.json

// Reads fit artifacts for the given families from dir. Throws ConfigError
// naming the fit subcommand when any is missing.
std::vector<FittedModel> load_fit_artifacts(const std::filesystem::path& dir,
                                            std::span<const Family> families);

// Family, k, BIC, AIC rows sorted by ascending BIC.
std::string summary_table(std::span<const FittedModel> fits);

// Peak used to scale hydrographs for the flood-of-record trace and to anchor
// the overtopping search: the configured value or the largest gaged peak.
double reference_peak(const RunConfig& config, const PeakDataset& dataset);

struct AssessmentRow {
  Family model = Family::LP3;
  std::string hydrograph;
  std::optional<double> overtopping_peak;  // empty when the dam never overtops
  double return_period = 0.0;
  SafetyClass safety_class = SafetyClass::DoesNotMeet;
};

struct Assessment {
  std::vector<AssessmentRow> rows;  // models x hydrographs, in input order
  std::vector<SafetyVerdict> verdicts;
  std::vector<HazardCurve> hazard;
  std::vector<QuantileComparisonRow> comparison;  // empty unless both models are present
  Family comparison_a = Family::LP3;
  Family comparison_b = Family::MixedGEV;
};

Assessment assess(std::span<const FittedModel> fits, const std::vector<Hydrograph>& shapes,
                  const ReservoirSpec& reservoir, const RunConfig& config, double reference);

nlohmann::json to_json(const Assessment& assessment);

// Subcommands. Each returns the process exit code and reports failures on err.
int cmd_fit(const RunConfig& config, const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_rank(const RunConfig& config, const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_route(const RunConfig& config, const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_assess(const RunConfig& config, const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_plot_data(const RunConfig& config, const CommandOptions& options, std::ostream& out,
                  std::ostream& err);

}  // namespace floodrisk
