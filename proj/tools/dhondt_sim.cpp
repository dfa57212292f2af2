// Command-line driver: loads a dataset, trains the base recommenders and
// replays the evaluation slice with the configured vote-weight variant.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/cfg/helpers.h>
#include <spdlog/spdlog.h>

#include "dhondt/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Fuzzy d'Hondt ensemble aggregation with online vote learning"};

  std::string config_path;
  dhondt::ConfigOverrides overrides;
  std::string dataset, variant, behaviour, output_dir;
  std::uint64_t seed = 0;

  app.add_option("--config", config_path, "JSON experiment config");
  auto* dataset_opt = app.add_option("--dataset", dataset, "Interaction log path");
  auto* variant_opt = app.add_option("--variant", variant, "global-only | full-personal | hybrid")
                          ->check(CLI::IsMember({"global-only", "full-personal", "hybrid"}));
  auto* behaviour_opt = app.add_option("--behaviour", behaviour, "stat08 | stat06 | lin0901")
                            ->check(CLI::IsMember({"stat08", "stat06", "lin0901"}));
  auto* seed_opt = app.add_option("--seed", seed, "Run seed");
  auto* out_opt = app.add_option("--output-dir", output_dir, "Directory for result files");
  app.add_flag("--matrix", overrides.matrix, "Run every variant x behaviour combination");

  CLI11_PARSE(app, argc, argv);

  if (const char* level = std::getenv("DHONDT_LOG_LEVEL"))
    spdlog::cfg::helpers::load_levels(level);

  if (*dataset_opt) overrides.dataset_path = dataset;
  if (*variant_opt) overrides.variant = variant;
  if (*behaviour_opt) overrides.behaviour = behaviour;
  if (*seed_opt) overrides.seed = seed;
  if (*out_opt) overrides.output_dir = output_dir;

  dhondt::ExperimentConfig cfg;
  try {
    cfg = config_path.empty() ? dhondt::parse_config(nlohmann::json::object(), overrides)
                              : dhondt::parse_config_file(config_path, overrides);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  spdlog::info("dataset={} source={} recommenders={} output={}", cfg.dataset.path,
               dhondt::to_string(cfg.dataset.source), cfg.recommenders.size(),
               cfg.output_dir);
  const int status = dhondt::run_experiment(cfg, std::cout, std::cerr);
  if (status == 0) spdlog::debug("results written to {}", cfg.output_dir);
  return status;
}
