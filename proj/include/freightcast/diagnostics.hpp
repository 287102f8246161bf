#pragma once

#include <span>
#include <vector>

#include "freightcast/errors.hpp"

namespace freightcast {

struct AcfResult {
  std::vector<int> lags;       ///< 0..max_lag
  std::vector<double> values;  ///< values[0] == 1
  std::size_t n = 0;
};

struct PacfResult {
  std::vector<int> lags;       ///< 1..max_lag
  std::vector<double> values;
  std::size_t n = 0;
};

enum class DeterministicTerms { Constant, ConstantTrend };

struct AdfLagPolicy {
  enum class Rule { Schwert, Fixed };
  Rule rule = Rule::Schwert;
  int fixed_lags = 0;

  static AdfLagPolicy schwert() { return {}; }
  static AdfLagPolicy fixed(int lags) { return {Rule::Fixed, lags}; }
};

struct AdfResult {
  double statistic = 0.0;
  double p_value = 1.0;
  int lags_used = 0;
  DeterministicTerms deterministic_terms = DeterministicTerms::Constant;
};

struct LjungBoxResult {
  double q_stat = 0.0;
  int df = 0;
  double p_value = 1.0;
};

struct DecompositionResult {
  std::vector<double> trend;     ///< NaN at the edges where the centered window does not fit
  std::vector<double> seasonal;  ///< sums to zero over one cycle
  std::vector<double> residual;  ///< NaN wherever trend is NaN
};

/// Sample autocorrelations with the biased (divide-by-n) covariance estimator.
AcfResult acf(std::span<const double> x, int max_lag);

/// Partial autocorrelations via the Durbin-Levinson recursion on acf values.
PacfResult pacf(std::span<const double> x, int max_lag);

/// Augmented Dickey-Fuller unit-root t-test. The Schwert policy uses the
/// fixed lag count floor(12 * (n/100)^(1/4)).
AdfResult adf_test(std::span<const double> x, AdfLagPolicy policy = {},
                   DeterministicTerms terms = DeterministicTerms::Constant);

/// Portmanteau whiteness test: Q = n(n+2) sum_k rho_k^2/(n-k), df = h - fitted_params.
LjungBoxResult ljung_box(std::span<const double> residuals, int h, int fitted_params);

/// Additive decomposition with a centered moving-average trend.
DecompositionResult classical_decompose(std::span<const double> x, int period);

double pearson_corr(std::span<const double> a, std::span<const double> b);

/// tau quantile of the Dickey-Fuller t-distribution at probability p for a
/// regression with nobs usable observations (exposed for table validation).
double adf_tau_quantile(DeterministicTerms terms, double p, int nobs);
double adf_p_value(DeterministicTerms terms, double tau, int nobs);

}  // namespace freightcast
