#pragma once

#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "freightcast/sarimax.hpp"

namespace freightcast {

/// Inclusive integer ranges for the order search plus data-prep choices.
struct CandidateGrid {
  std::pair<int, int> p{0, 1}, q{0, 1}, P{0, 0}, Q{0, 0};
  std::vector<int> d{0};
  std::vector<int> D{0};
  int S = 12;
  std::vector<Transform> transforms{Transform{}};
  std::optional<bool> with_intercept;  ///< unset: drop the constant when d + D > 0
  std::size_t max_candidates = 512;

  std::vector<ModelOrder> enumerate() const;
};

struct HoldoutPolicy {
  double train_fraction = 0.7;  ///< origins start after this share of the sample
  int long_horizon = 12;
};

struct ErrorMetrics {
  double mape = 0.0;  ///< percent
  double mad = 0.0;
};

/// MAPE/MAD of predictions against actuals, on whatever scale they share.
ErrorMetrics error_metrics(std::span<const double> actual, std::span<const double> predicted);

struct BacktestMetrics {
  double mape_1 = 0.0, mad_1 = 0.0;
  double mape_h = 0.0, mad_h = 0.0;  ///< long-horizon (default 12-step) pooled across origins
  int origins_1 = 0, origins_h = 0;
};

/// Rolling-origin backtest with parameters fitted once on the full window:
/// one-step forecasts at every origin, plus horizon-h forecasts pooled across
/// origins, both scored on the original (back-transformed) scale.
BacktestMetrics backtest_metrics(const ModelOrder& order, const TimeSeries& series,
                                 const std::vector<TimeSeries>& exog = {},
                                 const HoldoutPolicy& policy = {});
BacktestMetrics backtest_with_model(const FittedModel& model, const HoldoutPolicy& policy = {});

struct CandidateResult {
  ModelOrder order;
  double aic = std::numeric_limits<double>::infinity();
  /// AIC with the transform's log-Jacobian folded in, so candidates with
  /// different transforms are ranked on a common (original-data) scale.
  double aic_comparable = std::numeric_limits<double>::infinity();
  double ljung_box_p = std::numeric_limits<double>::quiet_NaN();
  BacktestMetrics metrics;
  int k_params = 0;
  bool converged = false;
  bool gate_passed = false;
  std::string failure;       ///< non-empty when the fit itself threw
  std::string metrics_note;  ///< non-empty when backtesting was infeasible
};

/// Advisory order hints from acf/pacf cut-off heuristics; they annotate the
/// report but never prune the grid.
struct OrderHints {
  int p = 0, q = 0, P = 0, Q = 0;
};

struct SelectionReport {
  std::vector<CandidateResult> ranked;  ///< winner first; failed candidates last
  AdfResult adf;
  int recommended_d = 0;
  OrderHints hints;

  const CandidateResult& winner() const { return ranked.front(); }
};

CandidateResult evaluate_candidate(const ModelOrder& order, const TimeSeries& series,
                                   const std::vector<TimeSeries>& exog = {},
                                   const HoldoutPolicy& policy = {});

/// Runs the whole grid (concurrently up to `jobs`), gates on residual
/// whiteness and convergence, and ranks by comparable AIC with
/// fewer-parameters and lexicographic-order tie-breaks.
SelectionReport select_model(const CandidateGrid& grid, const TimeSeries& series,
                             const std::vector<TimeSeries>& exog = {},
                             const HoldoutPolicy& policy = {}, int jobs = 1);

}  // namespace freightcast
