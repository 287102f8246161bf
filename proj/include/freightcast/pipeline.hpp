#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "freightcast/csv_io.hpp"
#include "freightcast/scenario.hpp"
#include "freightcast/selection.hpp"

namespace freightcast {

struct ModelTask {
  std::string name;
  std::string series;
  ModelOrder order;
  std::vector<std::string> exog;          ///< dataset names
  std::optional<WindowSpec> window;       ///< fit window; whole series when unset
};

struct GridTask {
  std::string name;
  std::string series;
  CandidateGrid grid;
  std::vector<std::string> exog;
  std::optional<WindowSpec> window;
};

struct ScenarioTask {
  std::string name;
  std::string series;
  ModelOrder order;
  ScenarioSpec spec;
};

struct RecoveryPaceConfig {
  WindowSpec disruption;
  WindowSpec recovery;
  std::vector<std::string> scenarios;  ///< scenario task names feeding the plot
  std::vector<std::string> exclude_from_best_fit;
};

struct RunConfig {
  std::vector<DatasetConfig> datasets;
  std::vector<ModelTask> models;
  std::vector<GridTask> grids;
  std::vector<ScenarioTask> scenarios;
  std::optional<RecoveryPaceConfig> recovery_pace;
  HoldoutPolicy backtest;
  std::filesystem::path output_dir = "out";
  std::filesystem::path cache_dir = ".freightcast-cache";
  std::uint64_t seed = 0;
  int jobs = 1;
  bool allow_network = false;

  /// Resolves every cross-reference (series, covariates, recovery-pace
  /// scenario names); throws ConfigError on the first dangling one.
  void validate() const;

  static RunConfig from_json_file(const std::filesystem::path& path);
  static RunConfig from_json_text(const std::string& text,
                                  const std::filesystem::path& base_dir);
};

enum class PipelineStage { Fit, Select, Scenario, RecoveryPace, Diagnose };

/// Runs the requested stages and writes their artifacts under
/// config.output_dir. All inputs are loaded and validated before the first
/// byte of output is written.
void run_stages(const RunConfig& config, const std::vector<PipelineStage>& stages);

/// Full pipeline: fit, select, scenario, recovery-pace, diagnose.
void run_pipeline(const RunConfig& config);

/// Fetches every URL-backed dataset into the cache (used by the CLI).
void fetch_datasets(const RunConfig& config);

/// Model file round-trip support.
struct StoredModel {
  ModelOrder order;
  ParamVector params;
  double loglik = 0.0;
  double aic = 0.0;
  int k_params = 0;
  std::vector<double> std_errors;
  std::vector<double> exog_p_values;
  bool converged = true;
};

StoredModel read_model_json(const std::filesystem::path& path);

}  // namespace freightcast
