#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "freightcast/diagnostics.hpp"
#include "freightcast/timeseries.hpp"

namespace freightcast {

/// (p,d,q)(P,D,Q,S) specification plus the data transform.
struct ModelOrder {
  int p = 0, d = 0, q = 0;
  int P = 0, D = 0, Q = 0;
  int S = 1;
  Transform transform{};
  bool with_intercept = false;

  /// Differenced models drop the constant by default; undifferenced models keep it.
  static bool default_intercept(int d, int D) { return d + D == 0; }

  DifferenceSpec diff_spec() const { return {d, D, S}; }
  int arma_param_count() const { return p + q + P + Q; }
  void validate() const;
  std::string to_string() const;
};

/// Estimated coefficients. The intercept is the mean of the transformed,
/// differenced series (the regression-constant convention), not the raw
/// recursion constant; the two parameterizations describe the same process.
struct ParamVector {
  std::optional<double> intercept;
  std::vector<double> ar;    // a_1..a_p
  std::vector<double> ma;    // m_1..m_q
  std::vector<double> sar;   // seasonal AR
  std::vector<double> sma;   // seasonal MA
  std::vector<double> beta;  // one coefficient per covariate
  double sigma2 = 1.0;

  /// Number of estimated parameters, sigma2 included.
  std::size_t count() const {
    return (intercept ? 1 : 0) + ar.size() + ma.size() + sar.size() + sma.size() + beta.size() + 1;
  }
};

struct Forecast {
  Period start;  ///< first forecast period
  std::vector<double> median;
  std::vector<double> lower;
  std::vector<double> upper;
  double level = 0.95;

  std::size_t horizon() const { return median.size(); }
};

struct FitOptions {
  bool enforce_stationarity = true;  ///< optimize over partial-autocorrelation space
  int max_iterations = 400;
  bool compute_std_errors = true;
};

struct FittedModel {
  ModelOrder order;
  ParamVector params;
  double loglik = 0.0;
  double aic = 0.0;
  int k_params = 0;
  /// Layout: intercept (if any), beta..., ar..., ma..., sar..., sma..., sigma2.
  /// Empty when the numerical Hessian is singular.
  std::vector<double> std_errors;
  std::vector<double> exog_p_values;
  TimeSeries residuals;  ///< one-step innovations, transformed/differenced scale
  std::vector<double> std_residuals;
  bool converged = true;
  std::vector<std::string> warnings;
  // Training data, kept so forecasting from the fitted model is self-contained.
  TimeSeries endog;
  std::vector<TimeSeries> exog;
};

struct ResidualSummary {
  LjungBoxResult ljung_box;
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
};

/// Exact Gaussian log-likelihood via the Kalman filter on the ARMA state
/// space of the transformed, differenced data, with covariate effects removed
/// as z - beta * n. Differencing discards the first d + D*S observations
/// ("simple differencing"), which defines the likelihood's sample size.
double kalman_loglik(const ModelOrder& order, const ParamVector& params, const TimeSeries& endog,
                     const std::vector<TimeSeries>& exog = {});

/// Maximum-likelihood fit. Non-convergence is non-fatal: the best point found
/// is returned with converged=false.
FittedModel fit(const ModelOrder& order, const TimeSeries& endog,
                const std::vector<TimeSeries>& exog = {}, const FitOptions& options = {});

/// Builds a FittedModel at fixed parameters (no optimization); used for
/// evaluating known-parameter models and for re-filtering stored fits.
FittedModel evaluate_at(const ModelOrder& order, const ParamVector& params,
                        const TimeSeries& endog, const std::vector<TimeSeries>& exog = {});

/// Median and central interval per horizon, back-transformed to the original
/// scale. future_exog must cover the forecast window when the model has
/// covariates.
Forecast forecast(const FittedModel& model, int horizon,
                  const std::vector<TimeSeries>& future_exog = {}, double level = 0.95);

/// Draws a series from the model. Deterministic for a fixed seed. Integration
/// initials are zero; the transform is inverted at the end.
TimeSeries simulate(const ModelOrder& order, const ParamVector& params, std::size_t n,
                    std::uint64_t seed, const std::vector<TimeSeries>& exog = {},
                    std::optional<Period> start = std::nullopt);

/// Ljung-Box on the standardized residuals plus moment summaries.
/// lb_lags == 0 picks min(10, n/5), which is a default of this library, not a
/// published convention.
ResidualSummary residual_diagnostics(const FittedModel& model, int lb_lags = 0);

}  // namespace freightcast
