#include <CLI11.hpp>
#include <cstdio>
#include <string>
#include <vector>

#include "freightcast/pipeline.hpp"

namespace {

int category_exit_code(freightcast::ErrorCategory category) {
  switch (category) {
    case freightcast::ErrorCategory::Config: return 2;
    case freightcast::ErrorCategory::Data: return 3;
    case freightcast::ErrorCategory::Numerical: return 4;
  }
  return 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "freightcast: seasonal ARIMA/ARIMAX baselines, counterfactual scenarios and\n"
      "recovery-pace analysis for monthly freight-like series"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_override;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int jobs = 0;
  bool allow_network = false;

  app.add_option("--config", config_path, "path to the run configuration (JSON)");
  app.add_option("--out", out_override, "output directory (overrides the config)");
  app.add_option("--seed", seed, "random seed recorded for the run")->each([&seed_set](const std::string&) {
    seed_set = true;
  });
  app.add_option("--jobs", jobs, "worker threads for independent fits");
  app.add_flag("--allow-network", allow_network, "permit fetching URL-backed datasets");

  auto* cmd_fit = app.add_subcommand("fit", "fit the configured models and write model reports");
  auto* cmd_select = app.add_subcommand("select", "run the configured candidate grids");
  auto* cmd_scenario = app.add_subcommand("scenario", "build counterfactual baselines and impact series");
  auto* cmd_pace = app.add_subcommand("recovery-pace", "compute recovery-pace points and the best-fit line");
  auto* cmd_diagnose = app.add_subcommand("diagnose", "emit ACF/PACF, unit-root and decomposition reports");
  auto* cmd_fetch = app.add_subcommand("fetch", "download URL-backed datasets into the cache");
  auto* cmd_run = app.add_subcommand("run", "run the full pipeline (all stages)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  using freightcast::PipelineStage;
  try {
    if (config_path.empty()) {
      throw freightcast::ConfigError("--config is required");
    }
    freightcast::RunConfig config = freightcast::RunConfig::from_json_file(config_path);
    if (!out_override.empty()) config.output_dir = out_override;
    if (seed_set) config.seed = seed;
    if (jobs > 0) config.jobs = jobs;
    if (allow_network) config.allow_network = true;

    if (cmd_fetch->parsed()) {
      freightcast::fetch_datasets(config);
    } else if (cmd_fit->parsed()) {
      freightcast::run_stages(config, {PipelineStage::Fit});
    } else if (cmd_select->parsed()) {
      freightcast::run_stages(config, {PipelineStage::Select});
    } else if (cmd_scenario->parsed()) {
      freightcast::run_stages(config, {PipelineStage::Scenario});
    } else if (cmd_pace->parsed()) {
      freightcast::run_stages(config, {PipelineStage::RecoveryPace});
    } else if (cmd_diagnose->parsed()) {
      freightcast::run_stages(config, {PipelineStage::Diagnose});
    } else if (cmd_run->parsed()) {
      freightcast::run_pipeline(config);
    }
    return 0;
  } catch (const freightcast::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return category_exit_code(e.category());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 4;
  }
}
