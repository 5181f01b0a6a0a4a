#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "floodrisk/commands.hpp"

namespace {

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    const auto value = std::stoull(item, &used);
    if (used != item.size()) throw std::invalid_argument(item);
    seeds.push_back(value);
  }
  return seeds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flood frequency fitting, reservoir routing and overtopping safety assessment"};
  app.require_subcommand(1);

  std::string config_path;
  std::string family;
  std::string seed_list;
  std::string out_dir;
  app.add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
  app.add_option("--family", family, "Single family to process, or 'all'");
  app.add_option("--seed-list", seed_list, "Comma-separated optimizer seeds, e.g. 1,2,3,4");
  app.add_option("--out", out_dir, "Output directory (overrides output_dir)");

  auto* fit = app.add_subcommand("fit", "Fit distributions and write fit_<FAMILY>.json artifacts");
  auto* rank = app.add_subcommand("rank", "Rank fitted models by AIC and BIC");
  auto* route = app.add_subcommand("route", "Route the configured hydrographs and find overtopping peaks");
  auto* assess = app.add_subcommand("assess", "Overtopping return periods, safety classes and hazard band");
  auto* plot = app.add_subcommand("plot-data", "Write plotting CSVs");
  for (auto* sub : {fit, rank, route, assess, plot}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    floodrisk::CommandOptions options;
    if (!family.empty()) options.family = family;
    if (!out_dir.empty()) options.out_dir = out_dir;
    if (!seed_list.empty()) {
      try {
        options.seeds = parse_seeds(seed_list);
      } catch (const std::exception&) {
        std::cerr << "error: --seed-list must be comma-separated non-negative integers\n";
        return 2;
      }
    }
    const floodrisk::RunConfig config = floodrisk::load_config(config_path);
    if (fit->parsed()) return floodrisk::cmd_fit(config, options, std::cout, std::cerr);
    if (rank->parsed()) return floodrisk::cmd_rank(config, options, std::cout, std::cerr);
    if (route->parsed()) return floodrisk::cmd_route(config, options, std::cout, std::cerr);
    if (assess->parsed()) return floodrisk::cmd_assess(config, options, std::cout, std::cerr);
    return floodrisk::cmd_plot_data(config, options, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
