#include "freightcast/diagnostics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "freightcast/stats.hpp"

namespace freightcast {

namespace {

#include "adf_surface.inc"

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double sample_mean(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

}  // namespace

AcfResult acf(std::span<const double> x, int max_lag) {
  const std::size_t n = x.size();
  if (max_lag < 0 || static_cast<std::size_t>(max_lag) >= n) {
    throw RangeError("acf max_lag must satisfy 0 <= max_lag < n");
  }
  const double m = sample_mean(x);
  double c0 = 0.0;
  for (double v : x) c0 += (v - m) * (v - m);
  // relative guard: summing identical values leaves rounding dust in c0
  if (c0 <= static_cast<double>(n) * 1e-20 * (1.0 + m * m)) {
    throw DegenerateError("acf is undefined for a constant series");
  }
  AcfResult res;
  res.n = n;
  res.lags.resize(static_cast<std::size_t>(max_lag) + 1);
  res.values.resize(res.lags.size());
  for (int k = 0; k <= max_lag; ++k) {
    double ck = 0.0;
    for (std::size_t t = static_cast<std::size_t>(k); t < n; ++t) {
      ck += (x[t] - m) * (x[t - static_cast<std::size_t>(k)] - m);
    }
    res.lags[static_cast<std::size_t>(k)] = k;
    res.values[static_cast<std::size_t>(k)] = ck / c0;
  }
  return res;
}

PacfResult pacf(std::span<const double> x, int max_lag) {
  const std::size_t n = x.size();
  if (max_lag < 1 || static_cast<std::size_t>(2 * max_lag) >= n) {
    throw RangeError("pacf max_lag must satisfy 1 <= max_lag < n/2");
  }
  const AcfResult rho = acf(x, max_lag);

  PacfResult res;
  res.n = n;
  res.lags.resize(static_cast<std::size_t>(max_lag));
  res.values.resize(res.lags.size());

  // Durbin-Levinson recursion
  std::vector<double> phi_prev(static_cast<std::size_t>(max_lag) + 1, 0.0);
  std::vector<double> phi_cur(static_cast<std::size_t>(max_lag) + 1, 0.0);
  phi_prev[1] = rho.values[1];
  res.lags[0] = 1;
  res.values[0] = rho.values[1];
  for (int k = 2; k <= max_lag; ++k) {
    double num = rho.values[static_cast<std::size_t>(k)];
    double den = 1.0;
    for (int j = 1; j < k; ++j) {
      num -= phi_prev[static_cast<std::size_t>(j)] * rho.values[static_cast<std::size_t>(k - j)];
      den -= phi_prev[static_cast<std::size_t>(j)] * rho.values[static_cast<std::size_t>(j)];
    }
    if (den == 0.0) {
      throw DegenerateError("pacf recursion hit a singular step at lag " + std::to_string(k));
    }
    const double phikk = num / den;
    phi_cur[static_cast<std::size_t>(k)] = phikk;
    for (int j = 1; j < k; ++j) {
      phi_cur[static_cast<std::size_t>(j)] =
          phi_prev[static_cast<std::size_t>(j)] -
          phikk * phi_prev[static_cast<std::size_t>(k - j)];
    }
    std::swap(phi_prev, phi_cur);
    res.lags[static_cast<std::size_t>(k - 1)] = k;
    res.values[static_cast<std::size_t>(k - 1)] = phikk;
  }
  return res;
}

AdfResult adf_test(std::span<const double> x, AdfLagPolicy policy, DeterministicTerms terms) {
  const std::size_t n = x.size();
  if (n < 20) {
    throw InsufficientDataError("adf_test needs at least 20 observations, got " +
                                std::to_string(n));
  }
  int lags = 0;
  if (policy.rule == AdfLagPolicy::Rule::Schwert) {
    lags = static_cast<int>(std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
  } else {
    lags = policy.fixed_lags;
  }
  if (lags < 0) {
    throw RangeError("adf lag count must be non-negative");
  }
  const int ndet = terms == DeterministicTerms::Constant ? 1 : 2;
  // keep a healthy residual dof after the lag terms
  const int max_allowed = static_cast<int>(n) / 2 - ndet - 2;
  lags = std::min(lags, std::max(0, max_allowed));

  const std::size_t rows = n - 1 - static_cast<std::size_t>(lags);
  const std::size_t ncoef = 1 + static_cast<std::size_t>(lags) + static_cast<std::size_t>(ndet);
  if (rows <= ncoef + 1) {
    throw InsufficientDataError("adf_test regression has too few rows for the lag order");
  }

  std::vector<double> dx(n - 1);
  for (std::size_t t = 0; t + 1 < n; ++t) dx[t] = x[t + 1] - x[t];

  Eigen::MatrixXd design(rows, ncoef);
  Eigen::VectorXd target(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    // row r corresponds to dx index (lags + r), i.e. time t = lags + r + 1
    const std::size_t t = static_cast<std::size_t>(lags) + r;
    target(static_cast<Eigen::Index>(r)) = dx[t];
    design(static_cast<Eigen::Index>(r), 0) = x[t];  // level term x_{t-1}
    for (int j = 1; j <= lags; ++j) {
      design(static_cast<Eigen::Index>(r), j) = dx[t - static_cast<std::size_t>(j)];
    }
    design(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(lags) + 1) = 1.0;
    if (ndet == 2) {
      design(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(lags) + 2) =
          static_cast<double>(r + 1);
    }
  }

  const Eigen::MatrixXd xtx = design.transpose() * design;
  const Eigen::LDLT<Eigen::MatrixXd> solver(xtx);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("adf_test regression is singular");
  }
  const Eigen::VectorXd beta = solver.solve(design.transpose() * target);
  const Eigen::VectorXd resid = target - design * beta;
  const double s2 = resid.squaredNorm() / static_cast<double>(rows - ncoef);
  const Eigen::MatrixXd xtx_inv =
      solver.solve(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(ncoef),
                                             static_cast<Eigen::Index>(ncoef)));
  const double se = std::sqrt(s2 * xtx_inv(0, 0));
  if (!(se > 0.0) || !std::isfinite(se)) {
    throw NumericalError("adf_test produced a degenerate standard error");
  }

  AdfResult res;
  res.statistic = beta(0) / se;
  res.lags_used = lags;
  res.deterministic_terms = terms;
  res.p_value = adf_p_value(terms, res.statistic, static_cast<int>(rows));
  return res;
}

LjungBoxResult ljung_box(std::span<const double> residuals, int h, int fitted_params) {
  const std::size_t n = residuals.size();
  if (h <= fitted_params) {
    throw DegreeOfFreedomError("ljung_box needs h > fitted_params (h=" + std::to_string(h) +
                               ", fitted=" + std::to_string(fitted_params) + ")");
  }
  if (n <= static_cast<std::size_t>(h)) {
    throw InsufficientDataError("ljung_box needs more observations than lags");
  }
  const AcfResult rho = acf(residuals, h);
  double q = 0.0;
  for (int k = 1; k <= h; ++k) {
    const double r = rho.values[static_cast<std::size_t>(k)];
    q += r * r / static_cast<double>(n - static_cast<std::size_t>(k));
  }
  q *= static_cast<double>(n) * (static_cast<double>(n) + 2.0);

  LjungBoxResult res;
  res.q_stat = q;
  res.df = h - fitted_params;
  res.p_value = stats::chi2_sf(q, res.df);
  return res;
}

DecompositionResult classical_decompose(std::span<const double> x, int period) {
  const std::size_t n = x.size();
  if (period < 2) {
    throw RangeError("decomposition period must be at least 2");
  }
  const std::size_t s = static_cast<std::size_t>(period);
  if (n < 2 * s) {
    throw InsufficientDataError("classical_decompose needs at least two full cycles");
  }

  DecompositionResult res;
  res.trend.assign(n, kNaN);
  res.seasonal.assign(n, 0.0);
  res.residual.assign(n, kNaN);

  // centered moving average: window S+1 with half weights at the ends when S
  // is even, plain window S when odd
  const bool even = period % 2 == 0;
  const std::size_t half = even ? s / 2 : (s - 1) / 2;
  for (std::size_t t = half; t + half < n; ++t) {
    double acc = 0.0;
    if (even) {
      acc += 0.5 * x[t - half] + 0.5 * x[t + half];
      for (std::size_t j = t - half + 1; j < t + half; ++j) acc += x[j];
    } else {
      for (std::size_t j = t - half; j <= t + half; ++j) acc += x[j];
    }
    res.trend[t] = acc / static_cast<double>(period);
  }

  std::vector<double> pos_sum(s, 0.0);
  std::vector<int> pos_count(s, 0);
  for (std::size_t t = 0; t < n; ++t) {
    if (std::isnan(res.trend[t])) continue;
    pos_sum[t % s] += x[t] - res.trend[t];
    pos_count[t % s] += 1;
  }
  std::vector<double> idx(s, 0.0);
  double grand = 0.0;
  for (std::size_t j = 0; j < s; ++j) {
    if (pos_count[j] == 0) {
      throw InsufficientDataError("seasonal position " + std::to_string(j) +
                                  " has no detrended observations");
    }
    idx[j] = pos_sum[j] / pos_count[j];
    grand += idx[j];
  }
  grand /= static_cast<double>(s);
  for (std::size_t j = 0; j < s; ++j) idx[j] -= grand;  // re-center to sum 0 per cycle

  for (std::size_t t = 0; t < n; ++t) {
    res.seasonal[t] = idx[t % s];
    if (!std::isnan(res.trend[t])) {
      res.residual[t] = x[t] - res.trend[t] - res.seasonal[t];
    }
  }
  return res;
}

double pearson_corr(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw LengthError("pearson_corr needs equal-length inputs");
  }
  if (a.size() < 2) {
    throw InsufficientDataError("pearson_corr needs at least two observations");
  }
  const double ma = sample_mean(a);
  const double mb = sample_mean(b);
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    saa += da * da;
    sbb += db * db;
    sab += da * db;
  }
  const double n = static_cast<double>(a.size());
  if (saa <= n * 1e-20 * (1.0 + ma * ma) || sbb <= n * 1e-20 * (1.0 + mb * mb)) {
    throw DegenerateError("pearson_corr is undefined for a constant input");
  }
  return sab / std::sqrt(saa * sbb);
}

double adf_tau_quantile(DeterministicTerms terms, double p, int nobs) {
  const auto& surface =
      terms == DeterministicTerms::Constant ? kAdfSurfaceConstant : kAdfSurfaceConstantTrend;
  // nearest grid point lookup for a single requested probability
  std::size_t best = 0;
  for (std::size_t i = 1; i < kAdfGridSize; ++i) {
    if (std::abs(kAdfPGrid[i] - p) < std::abs(kAdfPGrid[best] - p)) best = i;
  }
  const double inv = 1.0 / static_cast<double>(nobs);
  return surface[best][0] + surface[best][1] * inv + surface[best][2] * inv * inv;
}

double adf_p_value(DeterministicTerms terms, double tau, int nobs) {
  const auto& surface =
      terms == DeterministicTerms::Constant ? kAdfSurfaceConstant : kAdfSurfaceConstantTrend;
  const double inv = 1.0 / static_cast<double>(nobs);
  double taus[kAdfGridSize];
  double prev = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < kAdfGridSize; ++i) {
    double t = surface[i][0] + surface[i][1] * inv + surface[i][2] * inv * inv;
    t = std::max(t, prev);  // the surface fits are independent per quantile; keep them ordered
    taus[i] = t;
    prev = t;
  }
  if (tau <= taus[0]) return kAdfPGrid[0];
  if (tau >= taus[kAdfGridSize - 1]) return kAdfPGrid[kAdfGridSize - 1];
  for (std::size_t i = 1; i < kAdfGridSize; ++i) {
    if (tau <= taus[i]) {
      const double w = (tau - taus[i - 1]) / (taus[i] - taus[i - 1]);
      return kAdfPGrid[i - 1] + w * (kAdfPGrid[i] - kAdfPGrid[i - 1]);
    }
  }
  return kAdfPGrid[kAdfGridSize - 1];
}

}  // namespace freightcast
