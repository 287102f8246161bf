#include "freightcast/selection.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>
#include <tuple>

namespace freightcast {

namespace {

double nan_to_inf(double v) {
  return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
}

auto order_tuple(const ModelOrder& o) {
  return std::make_tuple(o.p, o.d, o.q, o.P, o.D, o.Q, o.S, static_cast<int>(o.transform.kind),
                         o.with_intercept ? 1 : 0);
}

bool ranks_before(const CandidateResult& a, const CandidateResult& b) {
  if (a.gate_passed != b.gate_passed) return a.gate_passed;
  const double ka = nan_to_inf(a.aic_comparable);
  const double kb = nan_to_inf(b.aic_comparable);
  if (ka != kb) return ka < kb;
  if (a.k_params != b.k_params) return a.k_params < b.k_params;
  return order_tuple(a.order) < order_tuple(b.order);
}

}  // namespace

std::vector<ModelOrder> CandidateGrid::enumerate() const {
  auto check_range = [](std::pair<int, int> r, const char* what) {
    if (r.first < 0 || r.second < r.first) {
      throw ConfigError(std::string("bad grid range for ") + what);
    }
  };
  check_range(p, "p");
  check_range(q, "q");
  check_range(P, "P");
  check_range(Q, "Q");
  if (d.empty() || D.empty() || transforms.empty()) {
    throw ConfigError("grid needs at least one choice for d, D and transform");
  }

  std::vector<ModelOrder> orders;
  for (const Transform& tr : transforms) {
    for (const int dv : d) {
      for (const int Dv : D) {
        for (int pv = p.first; pv <= p.second; ++pv) {
          for (int qv = q.first; qv <= q.second; ++qv) {
            for (int Pv = P.first; Pv <= P.second; ++Pv) {
              for (int Qv = Q.first; Qv <= Q.second; ++Qv) {
                ModelOrder o{.p = pv, .d = dv, .q = qv, .P = Pv, .D = Dv, .Q = Qv,
                             .S = S, .transform = tr,
                             .with_intercept =
                                 with_intercept.value_or(ModelOrder::default_intercept(dv, Dv))};
                o.validate();
                orders.push_back(o);
                if (orders.size() > max_candidates) {
                  throw ConfigError("candidate grid exceeds the configured maximum of " +
                                    std::to_string(max_candidates));
                }
              }
            }
          }
        }
      }
    }
  }
  return orders;
}

ErrorMetrics error_metrics(std::span<const double> actual, std::span<const double> predicted) {
  if (actual.size() != predicted.size()) {
    throw LengthError("error_metrics needs equal-length vectors");
  }
  if (actual.empty()) {
    throw LengthError("error_metrics needs at least one observation");
  }
  double ape = 0.0, ad = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (actual[i] == 0.0) {
      throw DomainError("MAPE is undefined when an actual value is zero");
    }
    const double err = std::abs(actual[i] - predicted[i]);
    ape += err / std::abs(actual[i]);
    ad += err;
  }
  const double n = static_cast<double>(actual.size());
  return ErrorMetrics{100.0 * ape / n, ad / n};
}

BacktestMetrics backtest_with_model(const FittedModel& model, const HoldoutPolicy& policy) {
  const TimeSeries& series = model.endog;
  const std::size_t n = series.size();
  const int depth = model.order.diff_spec().depth();
  const std::size_t min_train =
      std::max<std::size_t>(static_cast<std::size_t>(depth) + 8,
                            static_cast<std::size_t>(std::ceil(policy.train_fraction *
                                                               static_cast<double>(n))));
  const int h = policy.long_horizon;
  if (h < 1) {
    throw ConfigError("backtest long horizon must be positive");
  }
  if (min_train + std::max<std::size_t>(12, static_cast<std::size_t>(h)) > n) {
    throw InsufficientDataError("backtest needs at least 12 rolling origins after the training span");
  }

  std::vector<double> actual_1, pred_1, actual_h, pred_h;
  for (std::size_t origin = min_train; origin < n; ++origin) {
    // forecasts from data up to (but excluding) index `origin`, at the frozen fit
    const TimeSeries window =
        slice_window(series, series.start(), series.period_at(origin - 1));
    const FittedModel at_origin = evaluate_at(model.order, model.params, window, model.exog);

    const std::int64_t remaining = static_cast<std::int64_t>(n - origin);
    const auto fc = forecast(at_origin, static_cast<int>(std::min<std::int64_t>(h, remaining)),
                             model.exog, 0.95);
    actual_1.push_back(series[origin]);
    pred_1.push_back(fc.median.front());
    if (remaining >= h) {
      actual_h.push_back(series[origin + static_cast<std::size_t>(h) - 1]);
      pred_h.push_back(fc.median[static_cast<std::size_t>(h) - 1]);
    }
  }

  const ErrorMetrics one = error_metrics(actual_1, pred_1);
  const ErrorMetrics
      longh = error_metrics(actual_h, pred_h);
  BacktestMetrics out;
  out.mape_1 = one.mape;
  out.mad_1 = one.mad;
  out.origins_1 = static_cast<int>(actual_1.size());
  out.mape_h = longh.mape;
  out.mad_h = longh.mad;
  out.origins_h = static_cast<int>(actual_h.size());
  return out;
}

BacktestMetrics backtest_metrics(const ModelOrder& order, const TimeSeries& series,
                                 const std::vector<TimeSeries>& exog,
                                 const HoldoutPolicy& policy) {
  FitOptions opts;
  opts.compute_std_errors = false;
  const FittedModel model = fit(order, series, exog, opts);
  return backtest_with_model(model, policy);
}

CandidateResult evaluate_candidate(const ModelOrder& order, const TimeSeries& series,
                                   const std::vector<TimeSeries>& exog,
                                   const HoldoutPolicy& policy) {
  CandidateResult res;
  res.order = order;
  try {
    FitOptions opts;
    const FittedModel model = fit(order, series, exog, opts);
    res.converged = model.converged;
    res.aic = model.aic;
    res.k_params = model.k_params;

    // Jacobian of the transform over the usable observations puts likelihoods
    // of transformed and raw fits on the same scale.
    double jacobian = 0.0;
    const int depth = order.diff_spec().depth();
    for (std::size_t t = static_cast<std::size_t>(depth); t < series.size(); ++t) {
      jacobian += order.transform.log_jacobian(series[t]);
    }
    res.aic_comparable = res.aic - 2.0 * jacobian;

    try {
      res.ljung_box_p = residual_diagnostics(model).ljung_box.p_value;
    } catch (const Error& e) {
      res.metrics_note = std::string("ljung-box unavailable: ") + e.what();
    }
    try {
      res.metrics = backtest_with_model(model, policy);
    } catch (const Error& e) {
      res.metrics_note = std::string("backtest unavailable: ") + e.what();
    }
    res.gate_passed =
        res.converged && !std::isnan(res.ljung_box_p) && res.ljung_box_p >= 0.05;
  } catch (const Error& e) {
    res.failure = e.what();
    res.converged = false;
    res.gate_passed = false;
  }
  return res;
}

SelectionReport select_model(const CandidateGrid& grid, const TimeSeries& series,
                             const std::vector<TimeSeries>& exog, const HoldoutPolicy& policy,
                             int jobs) {
  const std::vector<ModelOrder> orders = grid.enumerate();
  if (orders.empty()) {
    throw ConfigError("candidate grid is empty");
  }

  SelectionReport report;

  // unit-root check for the differencing recommendation, on the transformed data
  const TimeSeries transformed = apply_transform(series, grid.transforms.front());
  report.adf = adf_test(transformed.values(), AdfLagPolicy::schwert(), DeterministicTerms::Constant);
  report.recommended_d = report.adf.p_value >= 0.05 ? 1 : 0;

  // advisory cut-off hints on the recommended differencing
  {
    DifferenceSpec spec{report.recommended_d, grid.D.front() > 0 ? 1 : 0, grid.S};
    std::vector<double> reduced = difference_values(transformed.values(), spec);
    const std::size_t n = reduced.size();
    const int cap = static_cast<int>(std::min<std::size_t>(grid.S + 1, n / 2 - 1));
    if (cap >= 2) {
      const double band = 2.0 / std::sqrt(static_cast<double>(n));
      const auto a = acf(reduced, cap);
      const auto pc = pacf(reduced, cap);
      while (report.hints.q < 3 && std::abs(a.values[static_cast<std::size_t>(report.hints.q + 1)]) > band) {
        ++report.hints.q;
      }
      while (report.hints.p < 3 &&
             std::abs(pc.values[static_cast<std::size_t>(report.hints.p)]) > band) {
        ++report.hints.p;
      }
      if (cap >= grid.S && grid.S >= 2) {
        if (std::abs(a.values[static_cast<std::size_t>(grid.S)]) > band) report.hints.Q = 1;
        if (std::abs(pc.values[static_cast<std::size_t>(grid.S - 1)]) > band) report.hints.P = 1;
      }
    }
  }

  std::vector<CandidateResult> results(orders.size());
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(orders.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < orders.size(); ++i) {
      results[i] = evaluate_candidate(orders[i], series, exog, policy);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int wkr = 0; wkr < workers; ++wkr) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < orders.size(); i = next.fetch_add(1)) {
          results[i] = evaluate_candidate(orders[i], series, exog, policy);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  if (std::all_of(results.begin(), results.end(),
                  [](const CandidateResult& r) { return !r.failure.empty(); })) {
    throw AllCandidatesFailedError("every candidate in the grid failed to fit");
  }

  std::stable_sort(results.begin(), results.end(), ranks_before);
  report.ranked = std::move(results);
  return report;
}

}  // namespace freightcast
