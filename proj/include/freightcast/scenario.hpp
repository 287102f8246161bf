#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "freightcast/sarimax.hpp"

namespace freightcast {

enum class ScenarioKind {
  TrendContinuation,       ///< SARIMA projection from pre-disruption data only
  CovariateAdaptedTrend,   ///< SARIMAX fed a projected covariate path
  ActualCovariateForecast  ///< the same SARIMAX fed the realized covariate path
};

std::string to_string(ScenarioKind k);
ScenarioKind scenario_kind_from_string(std::string_view s);

struct WindowSpec {
  Period from;
  Period to;

  int length() const { return static_cast<int>(from.steps_until(to)) + 1; }
  bool contains(const Period& p) const { return from <= p && p <= to; }
};

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::TrendContinuation;
  WindowSpec train;
  WindowSpec eval;
  std::optional<std::string> covariate_name;       ///< required for kinds 2 and 3
  std::optional<ModelOrder> covariate_order;       ///< projection model, kind 2
  double level = 0.95;

  void validate() const;
};

struct ImpactPoint {
  Period period;
  double actual = 0.0;
  double baseline = 0.0;   ///< counterfactual median
  double ratio = 0.0;      ///< actual / baseline
  double deviation = 0.0;  ///< ratio - 1
};

struct ImpactSeries {
  std::vector<ImpactPoint> points;

  /// Mean deviation over an inclusive window; every window period must be present.
  double mean_deviation(const WindowSpec& window) const;
};

struct ScenarioResult {
  Forecast baseline;  ///< medians and interval cone over the eval window
  ImpactSeries impact;
  std::shared_ptr<const FittedModel> model;
  std::shared_ptr<const FittedModel> covariate_model;  ///< kind 2 only
  std::optional<Forecast> covariate_projection;        ///< kind 2 only
};

/// Plain ARIMA projection of a covariate fitted on the train window.
Forecast project_covariate(const TimeSeries& covariate, const ModelOrder& order,
                           const WindowSpec& train, int horizon);

ScenarioResult run_scenario(const ScenarioSpec& spec, const TimeSeries& freight,
                            const TimeSeries* covariate, const ModelOrder& freight_order);

/// Runs kinds 2 and 3 off one shared SARIMAX fit; the two results reference
/// the same FittedModel object.
std::pair<ScenarioResult, ScenarioResult> run_scenario_pair(const ScenarioSpec& spec2,
                                                            const ScenarioSpec& spec3,
                                                            const TimeSeries& freight,
                                                            const TimeSeries& covariate,
                                                            const ModelOrder& freight_order);

struct RecoveryPacePoint {
  std::string name;
  double x = 0.0;  ///< mean deviation over the disruption window
  double y = 0.0;  ///< mean deviation over the recovery window
  char region = 'A';
};

/// Region rule: A when x >= 0; B when x < 0 and y >= 0; C when x <= y < 0
/// (the diagonal y = x belongs to C); D when y < x < 0.
char classify_recovery_region(double x, double y);

std::vector<RecoveryPacePoint> recovery_pace_points(
    const std::vector<std::pair<std::string, ImpactSeries>>& impacts_by_component,
    const WindowSpec& disruption, const WindowSpec& recovery);

struct BestFitLine {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::vector<std::string> excluded;
};

/// Ordinary least squares of y on x over the non-excluded points.
BestFitLine best_fit_line(const std::vector<RecoveryPacePoint>& points,
                          const std::vector<std::string>& excluded = {});

}  // namespace freightcast
