#include "freightcast/scenario.hpp"

#include <algorithm>
#include <cmath>

namespace freightcast {

std::string to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::TrendContinuation: return "trend_continuation";
    case ScenarioKind::CovariateAdaptedTrend: return "covariate_adapted_trend";
    case ScenarioKind::ActualCovariateForecast: return "actual_covariate_forecast";
  }
  return "trend_continuation";
}

ScenarioKind scenario_kind_from_string(std::string_view s) {
  if (s == "trend_continuation" || s == "scenario1") return ScenarioKind::TrendContinuation;
  if (s == "covariate_adapted_trend" || s == "scenario2") return ScenarioKind::CovariateAdaptedTrend;
  if (s == "actual_covariate_forecast" || s == "scenario3") {
    return ScenarioKind::ActualCovariateForecast;
  }
  throw ParseError("unknown scenario kind '" + std::string(s) + "'");
}

void ScenarioSpec::validate() const {
  if (!(train.from <= train.to)) {
    throw WindowError("train window start is after its end");
  }
  if (!(eval.from <= eval.to)) {
    throw WindowError("eval window start is after its end");
  }
  if (!(train.to < eval.from)) {
    throw WindowError("train window must precede the eval window with no overlap");
  }
  if (kind != ScenarioKind::TrendContinuation && !covariate_name) {
    throw ConfigError("scenario kind '" + freightcast::to_string(kind) +
                      "' requires a covariate");
  }
}

double ImpactSeries::mean_deviation(const WindowSpec& window) const {
  double sum = 0.0;
  int count = 0;
  for (const auto& pt : points) {
    if (window.contains(pt.period)) {
      sum += pt.deviation;
      ++count;
    }
  }
  if (count != window.length()) {
    throw WindowError("window [" + window.from.to_string() + ", " + window.to.to_string() +
                      "] is not fully covered by the impact series");
  }
  return sum / count;
}

namespace {

// slice the full-horizon forecast down to the eval window
Forecast trim_forecast(const Forecast& full, int offset, int count, const Period& eval_start) {
  Forecast out{.start = eval_start, .median = {}, .lower = {}, .upper = {}, .level = full.level};
  out.median.assign(full.median.begin() + offset, full.median.begin() + offset + count);
  out.lower.assign(full.lower.begin() + offset, full.lower.begin() + offset + count);
  out.upper.assign(full.upper.begin() + offset, full.upper.begin() + offset + count);
  return out;
}

ImpactSeries measure_impact(const TimeSeries& actual_eval, const Forecast& baseline) {
  ImpactSeries impact;
  impact.points.resize(actual_eval.size());
  for (std::size_t i = 0; i < actual_eval.size(); ++i) {
    const double base = baseline.median[i];
    if (!(base > 0.0)) {
      throw NumericalError("counterfactual baseline is non-positive at " +
                           actual_eval.period_at(i).to_string() +
                           "; actual-to-baseline ratios are undefined");
    }
    const double ratio = actual_eval[i] / base;
    impact.points[i] = ImpactPoint{.period = actual_eval.period_at(i),
                                   .actual = actual_eval[i],
                                   .baseline = base,
                                   .ratio = ratio,
                                   .deviation = ratio - 1.0};
  }
  return impact;
}

struct ScenarioFrame {
  TimeSeries train_series;
  TimeSeries actual_eval;
  int horizon_total;  // steps from train.to to eval.to
  int eval_offset;    // steps from train.to to eval.from, minus one
};

ScenarioFrame make_frame(const ScenarioSpec& spec, const TimeSeries& freight) {
  spec.validate();
  if (!freight.index_of(spec.train.from) || !freight.index_of(spec.train.to) ||
      !freight.index_of(spec.eval.from) || !freight.index_of(spec.eval.to)) {
    throw WindowError("scenario windows fall outside the freight series range");
  }
  return ScenarioFrame{
      .train_series = slice_window(freight, spec.train.from, spec.train.to),
      .actual_eval = slice_window(freight, spec.eval.from, spec.eval.to),
      .horizon_total = static_cast<int>(spec.train.to.steps_until(spec.eval.to)),
      .eval_offset = static_cast<int>(spec.train.to.steps_until(spec.eval.from)) - 1,
  };
}

TimeSeries covariate_eval_path(const ScenarioSpec& spec, const TimeSeries& covariate) {
  const Period first_future = spec.train.to.next();
  if (!covariate.index_of(first_future) || !covariate.index_of(spec.eval.to)) {
    throw AlignmentError("covariate does not cover the forecast window through " +
                         spec.eval.to.to_string());
  }
  return slice_window(covariate, first_future, spec.eval.to);
}

ScenarioResult finish_covariate_scenario(const ScenarioSpec& spec, const ScenarioFrame& frame,
                                         std::shared_ptr<const FittedModel> model,
                                         const TimeSeries& future_path) {
  const Forecast full = forecast(*model, frame.horizon_total, {future_path}, spec.level);
  ScenarioResult out{.baseline = trim_forecast(full, frame.eval_offset,
                                               static_cast<int>(frame.actual_eval.size()),
                                               spec.eval.from),
                     .impact = {},
                     .model = std::move(model),
                     .covariate_model = nullptr,
                     .covariate_projection = std::nullopt};
  out.impact = measure_impact(frame.actual_eval, out.baseline);
  return out;
}

}  // namespace

Forecast project_covariate(const TimeSeries& covariate, const ModelOrder& order,
                           const WindowSpec& train, int horizon) {
  const TimeSeries window = slice_window(covariate, train.from, train.to);
  FitOptions opts;
  opts.compute_std_errors = false;
  const FittedModel model = fit(order, window, {}, opts);
  return forecast(model, horizon);
}

ScenarioResult run_scenario(const ScenarioSpec& spec, const TimeSeries& freight,
                            const TimeSeries* covariate, const ModelOrder& freight_order) {
  const ScenarioFrame frame = make_frame(spec, freight);

  if (spec.kind == ScenarioKind::TrendContinuation) {
    auto model = std::make_shared<const FittedModel>(fit(freight_order, frame.train_series));
    const Forecast full = forecast(*model, frame.horizon_total, {}, spec.level);
    ScenarioResult out{.baseline = trim_forecast(full, frame.eval_offset,
                                                 static_cast<int>(frame.actual_eval.size()),
                                                 spec.eval.from),
                       .impact = {},
                       .model = std::move(model),
                       .covariate_model = nullptr,
                       .covariate_projection = std::nullopt};
    out.impact = measure_impact(frame.actual_eval, out.baseline);
    return out;
  }

  if (covariate == nullptr) {
    throw ConfigError("covariate-adapted scenarios need a covariate series");
  }
  const TimeSeries exog_train = slice_window(*covariate, spec.train.from, spec.train.to);
  auto model =
      std::make_shared<const FittedModel>(fit(freight_order, frame.train_series, {exog_train}));

  if (spec.kind == ScenarioKind::CovariateAdaptedTrend) {
    if (!spec.covariate_order) {
      throw ConfigError("covariate_adapted_trend needs a covariate model order");
    }
    auto cov_model = std::make_shared<const FittedModel>(
        fit(*spec.covariate_order, slice_window(*covariate, spec.train.from, spec.train.to)));
    Forecast projection = forecast(*cov_model, frame.horizon_total);
    const TimeSeries future_path(spec.train.to.next(), projection.median);
    ScenarioResult out = finish_covariate_scenario(spec, frame, std::move(model), future_path);
    out.covariate_model = std::move(cov_model);
    out.covariate_projection = std::move(projection);
    return out;
  }

  // ActualCovariateForecast
  return finish_covariate_scenario(spec, frame, std::move(model),
                                   covariate_eval_path(spec, *covariate));
}

std::pair<ScenarioResult, ScenarioResult> run_scenario_pair(const ScenarioSpec& spec2,
                                                            const ScenarioSpec& spec3,
                                                            const TimeSeries& freight,
                                                            const TimeSeries& covariate,
                                                            const ModelOrder& freight_order) {
  if (spec2.kind != ScenarioKind::CovariateAdaptedTrend ||
      spec3.kind != ScenarioKind::ActualCovariateForecast) {
    throw ConfigError("run_scenario_pair expects a kind-2 and a kind-3 spec");
  }
  if (!(spec2.train.from == spec3.train.from) || !(spec2.train.to == spec3.train.to) ||
      !(spec2.eval.from == spec3.eval.from) || !(spec2.eval.to == spec3.eval.to)) {
    throw ConfigError("paired scenarios must share train and eval windows");
  }
  if (!spec2.covariate_order) {
    throw ConfigError("covariate_adapted_trend needs a covariate model order");
  }
  const ScenarioFrame frame = make_frame(spec2, freight);
  const TimeSeries exog_train = slice_window(covariate, spec2.train.from, spec2.train.to);
  auto shared_model =
      std::make_shared<const FittedModel>(fit(freight_order, frame.train_series, {exog_train}));

  auto cov_model = std::make_shared<const FittedModel>(
      fit(*spec2.covariate_order, slice_window(covariate, spec2.train.from, spec2.train.to)));
  Forecast projection = forecast(*cov_model, frame.horizon_total);
  const TimeSeries projected_path(spec2.train.to.next(), projection.median);

  ScenarioResult s2 = finish_covariate_scenario(spec2, frame, shared_model, projected_path);
  s2.covariate_model = std::move(cov_model);
  s2.covariate_projection = std::move(projection);

  ScenarioResult s3 =
      finish_covariate_scenario(spec3, frame, shared_model, covariate_eval_path(spec3, covariate));
  return {std::move(s2), std::move(s3)};
}

char classify_recovery_region(double x, double y) {
  if (x >= 0.0) return 'A';
  if (y >= 0.0) return 'B';
  if (y >= x) return 'C';
  return 'D';
}

std::vector<RecoveryPacePoint> recovery_pace_points(
    const std::vector<std::pair<std::string, ImpactSeries>>& impacts_by_component,
    const WindowSpec& disruption, const WindowSpec& recovery) {
  std::vector<RecoveryPacePoint> out;
  out.reserve(impacts_by_component.size());
  for (const auto& [name, impact] : impacts_by_component) {
    RecoveryPacePoint pt;
    pt.name = name;
    pt.x = impact.mean_deviation(disruption);
    pt.y = impact.mean_deviation(recovery);
    pt.region = classify_recovery_region(pt.x, pt.y);
    out.push_back(std::move(pt));
  }
  return out;
}

BestFitLine best_fit_line(const std::vector<RecoveryPacePoint>& points,
                          const std::vector<std::string>& excluded) {
  std::vector<const RecoveryPacePoint*> used;
  for (const auto& pt : points) {
    if (std::find(excluded.begin(), excluded.end(), pt.name) == excluded.end()) {
      used.push_back(&pt);
    }
  }
  if (used.size() < 2) {
    throw DegenerateError("best-fit line needs at least two non-excluded points");
  }
  double mx = 0.0, my = 0.0;
  for (const auto* p : used) {
    mx += p->x;
    my += p->y;
  }
  mx /= static_cast<double>(used.size());
  my /= static_cast<double>(used.size());
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto* p : used) {
    sxx += (p->x - mx) * (p->x - mx);
    sxy += (p->x - mx) * (p->y - my);
    syy += (p->y - my) * (p->y - my);
  }
  if (sxx <= 0.0) {
    throw DegenerateError("best-fit line is undefined when all x values coincide");
  }
  BestFitLine line;
  line.slope = sxy / sxx;
  line.intercept = my - line.slope * mx;
  line.excluded = excluded;
  if (syy <= 0.0) {
    line.r2 = 1.0;  // flat targets are fitted exactly by the constant line
  } else {
    double ssr = 0.0;
    for (const auto* p : used) {
      const double e = p->y - (line.intercept + line.slope * p->x);
      ssr += e * e;
    }
    line.r2 = 1.0 - ssr / syy;
    line.r2 = std::clamp(line.r2, 0.0, 1.0);
  }
  return line;
}

}  // namespace freightcast
