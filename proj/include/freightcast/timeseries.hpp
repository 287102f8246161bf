#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "freightcast/errors.hpp"
#include "freightcast/period.hpp"

namespace freightcast {

enum class TransformKind { None, Log, Sqrt };

std::string to_string(TransformKind k);
TransformKind transform_from_string(std::string_view s);

/// Variance-stabilizing transform applied to a series before modeling.
struct Transform {
  TransformKind kind = TransformKind::None;

  double apply(double v) const;   ///< throws DomainError outside the domain
  double invert(double v) const;  ///< monotone inverse (exp / square / identity)

  /// log |dT/dy| at y, the density correction needed to compare likelihoods
  /// of transformed data with likelihoods of untransformed data.
  double log_jacobian(double v) const;

  bool is_identity() const { return kind == TransformKind::None; }
  friend bool operator==(const Transform&, const Transform&) = default;
};

struct DifferenceSpec {
  int d = 0;  ///< non-seasonal order
  int D = 0;  ///< seasonal order
  int S = 1;  ///< seasonal period

  int depth() const { return d + D * S; }
  friend bool operator==(const DifferenceSpec&, const DifferenceSpec&) = default;
};

/// Regularly indexed observations. Contiguous by construction: value i sits at
/// start.plus(i). Values must be finite; missing observations are rejected at
/// load time rather than interpolated.
class TimeSeries {
 public:
  TimeSeries(Period start, std::vector<double> values);

  Frequency frequency() const { return start_.frequency(); }
  const Period& start() const { return start_; }
  Period period_at(std::size_t i) const { return start_.plus(static_cast<std::int64_t>(i)); }
  Period end() const { return period_at(size() - 1); }

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }

  /// Index of the given period, or nullopt if it falls outside the series.
  std::optional<std::size_t> index_of(const Period& p) const;

 private:
  Period start_;
  std::vector<double> values_;
};

// Value-level differencing operators. These work on bare vectors so the model
// engine can run them on already-extracted data; the TimeSeries overloads
// below adjust the start period. Differencing applies the non-seasonal
// operator d times, then the seasonal operator D times (the operators
// commute; the order is fixed for reproducibility).
std::vector<double> difference_values(std::span<const double> values, const DifferenceSpec& spec);

/// Exact inverse of difference_values. `initials` must hold the first
/// spec.depth() values of the undifferenced vector.
std::vector<double> inverse_difference_values(std::span<const double> diffed,
                                              const DifferenceSpec& spec,
                                              std::span<const double> initials);

TimeSeries apply_transform(const TimeSeries& series, Transform t);
TimeSeries invert_transform(const TimeSeries& series, Transform t);
TimeSeries difference(const TimeSeries& series, const DifferenceSpec& spec);
TimeSeries inverse_difference(const TimeSeries& diffed, const DifferenceSpec& spec,
                              std::span<const double> initials);

/// Down-samples a weekly series to monthly arithmetic means. A week belongs
/// to the calendar month containing its week-ending date.
TimeSeries resample_weekly_to_monthly(const TimeSeries& series);

/// Inclusive sub-series.
TimeSeries slice_window(const TimeSeries& series, const Period& from, const Period& to);

}  // namespace freightcast
