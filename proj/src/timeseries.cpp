#include "freightcast/timeseries.hpp"

#include <algorithm>
#include <cmath>

namespace freightcast {

std::string to_string(TransformKind k) {
  switch (k) {
    case TransformKind::None: return "none";
    case TransformKind::Log: return "log";
    case TransformKind::Sqrt: return "sqrt";
  }
  return "none";
}

TransformKind transform_from_string(std::string_view s) {
  if (s == "none" || s.empty()) return TransformKind::None;
  if (s == "log") return TransformKind::Log;
  if (s == "sqrt") return TransformKind::Sqrt;
  throw ParseError("unknown transform '" + std::string(s) + "' (expected none, log or sqrt)");
}

double Transform::apply(double v) const {
  switch (kind) {
    case TransformKind::None:
      return v;
    case TransformKind::Log:
      if (!(v > 0.0)) {
        throw DomainError("log transform requires strictly positive values, got " +
                          std::to_string(v));
      }
      return std::log(v);
    case TransformKind::Sqrt:
      if (v < 0.0) {
        throw DomainError("sqrt transform requires non-negative values, got " +
                          std::to_string(v));
      }
      return std::sqrt(v);
  }
  return v;
}

double Transform::invert(double v) const {
  switch (kind) {
    case TransformKind::None: return v;
    case TransformKind::Log: return std::exp(v);
    case TransformKind::Sqrt: return v * v;
  }
  return v;
}

double Transform::log_jacobian(double v) const {
  switch (kind) {
    case TransformKind::None: return 0.0;
    case TransformKind::Log: return -std::log(v);
    case TransformKind::Sqrt: return -std::log(2.0 * std::sqrt(v));
  }
  return 0.0;
}

TimeSeries::TimeSeries(Period start, std::vector<double> values)
    : start_(start), values_(std::move(values)) {
  if (values_.empty()) {
    throw LengthError("a time series must hold at least one observation");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw DomainError("non-finite value at " + period_at(i).to_string());
    }
  }
}

std::optional<std::size_t> TimeSeries::index_of(const Period& p) const {
  const std::int64_t steps = start_.steps_until(p);
  if (steps < 0 || steps >= static_cast<std::int64_t>(size())) return std::nullopt;
  return static_cast<std::size_t>(steps);
}

namespace {

std::vector<double> lag_difference(std::span<const double> values, std::size_t lag) {
  if (values.size() < lag) return {};
  std::vector<double> out(values.size() - lag);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = values[i + lag] - values[i];
  }
  return out;
}

std::vector<double> lag_integrate(std::span<const double> diffed, std::size_t lag,
                                  std::span<const double> initials) {
  std::vector<double> out(diffed.size() + lag);
  std::copy(initials.begin(), initials.end(), out.begin());
  for (std::size_t i = 0; i < diffed.size(); ++i) {
    out[i + lag] = out[i] + diffed[i];
  }
  return out;
}

}  // namespace

std::vector<double> difference_values(std::span<const double> values, const DifferenceSpec& spec) {
  if (spec.d < 0 || spec.D < 0 || spec.S < 1) {
    throw RangeError("difference spec orders must be non-negative and S positive");
  }
  if (spec.depth() > 0 && static_cast<std::size_t>(spec.depth()) >= values.size()) {
    throw LengthError("series of length " + std::to_string(values.size()) +
                      " is too short for differencing depth " + std::to_string(spec.depth()));
  }
  std::vector<double> work(values.begin(), values.end());
  for (int i = 0; i < spec.d; ++i) work = lag_difference(work, 1);
  for (int i = 0; i < spec.D; ++i) work = lag_difference(work, static_cast<std::size_t>(spec.S));
  return work;
}

std::vector<double> inverse_difference_values(std::span<const double> diffed,
                                              const DifferenceSpec& spec,
                                              std::span<const double> initials) {
  if (initials.size() != static_cast<std::size_t>(spec.depth())) {
    throw LengthError("expected " + std::to_string(spec.depth()) + " initial values, got " +
                      std::to_string(initials.size()));
  }
  // difference applies the non-seasonal operator d times, then the seasonal
  // operator D times, so inversion unwinds seasonally first. Each stage
  // needs the head of its own input vector; all of those heads are
  // recoverable from the first depth() values of the original series.
  const std::size_t lag = static_cast<std::size_t>(spec.S);

  // plain_heads[k]: first values of the k-times non-seasonally differenced series
  std::vector<std::vector<double>> plain_heads;
  plain_heads.emplace_back(initials.begin(), initials.end());
  for (int k = 0; k < spec.d; ++k) {
    plain_heads.push_back(lag_difference(plain_heads.back(), 1));
  }
  // seasonal_heads[k]: first values after d non-seasonal and k seasonal differences
  std::vector<std::vector<double>> seasonal_heads;
  seasonal_heads.push_back(plain_heads[static_cast<std::size_t>(spec.d)]);
  for (int k = 1; k < spec.D; ++k) {
    seasonal_heads.push_back(lag_difference(seasonal_heads.back(), lag));
  }

  std::vector<double> work(diffed.begin(), diffed.end());
  for (int i = spec.D; i > 0; --i) {
    const auto& h = seasonal_heads[static_cast<std::size_t>(i - 1)];
    work = lag_integrate(work, lag, std::span<const double>(h).subspan(0, lag));
  }
  for (int i = spec.d; i > 0; --i) {
    const auto& h = plain_heads[static_cast<std::size_t>(i - 1)];
    work = lag_integrate(work, 1, std::span<const double>(h).subspan(0, 1));
  }
  return work;
}

TimeSeries apply_transform(const TimeSeries& series, Transform t) {
  std::vector<double> out(series.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = t.apply(series[i]);
  return TimeSeries(series.start(), std::move(out));
}

TimeSeries invert_transform(const TimeSeries& series, Transform t) {
  std::vector<double> out(series.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = t.invert(series[i]);
  return TimeSeries(series.start(), std::move(out));
}

TimeSeries difference(const TimeSeries& series, const DifferenceSpec& spec) {
  auto values = difference_values(series.values(), spec);
  if (values.empty()) {
    throw LengthError("differencing consumed the whole series");
  }
  return TimeSeries(series.start().plus(spec.depth()), std::move(values));
}

TimeSeries inverse_difference(const TimeSeries& diffed, const DifferenceSpec& spec,
                              std::span<const double> initials) {
  auto values = inverse_difference_values(diffed.values(), spec, initials);
  return TimeSeries(diffed.start().plus(-spec.depth()), std::move(values));
}

TimeSeries resample_weekly_to_monthly(const TimeSeries& series) {
  if (series.frequency() != Frequency::Weekly) {
    throw RangeError("resample_weekly_to_monthly expects a weekly series");
  }
  std::vector<double> means;
  std::optional<Period> month_start;
  Period current = Period::monthly(0, 1);
  double sum = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const Period wk = series.period_at(i);
    const Period month = Period::monthly(wk.year(), wk.month());
    if (!month_start) {
      month_start = month;
      current = month;
    } else if (!(month == current)) {
      if (current.steps_until(month) != 1) {
        throw EmptyMonthError("month " + current.next().to_string() + " received no weeks");
      }
      means.push_back(sum / count);
      current = month;
      sum = 0.0;
      count = 0;
    }
    sum += series[i];
    ++count;
  }
  means.push_back(sum / count);
  return TimeSeries(*month_start, std::move(means));
}

TimeSeries slice_window(const TimeSeries& series, const Period& from, const Period& to) {
  const auto i = series.index_of(from);
  const auto j = series.index_of(to);
  if (!i || !j) {
    throw RangeError("window [" + from.to_string() + ", " + to.to_string() +
                     "] is not fully inside the series range [" + series.start().to_string() +
                     ", " + series.end().to_string() + "]");
  }
  if (*j < *i) {
    throw RangeError("window start " + from.to_string() + " is after window end " +
                     to.to_string());
  }
  std::vector<double> out(series.values().begin() + static_cast<std::ptrdiff_t>(*i),
                          series.values().begin() + static_cast<std::ptrdiff_t>(*j) + 1);
  return TimeSeries(from, std::move(out));
}

}  // namespace freightcast
