#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "freightcast/errors.hpp"

namespace freightcast {

enum class Frequency { Monthly, Weekly };

std::string to_string(Frequency f);
Frequency frequency_from_string(std::string_view s);

/// One slot on a regular monthly or weekly calendar grid.
///
/// Monthly periods count months since year 0. Weekly periods are labeled by
/// their week-ending date and count days since 1970-01-01; one step is seven
/// days. Weekly data keeps whatever week-ending weekday the source uses, so
/// a series reported on Saturdays stays on Saturdays.
class Period {
 public:
  Period() : freq_(Frequency::Monthly), serial_(0) {}  ///< placeholder month 0001-01

  static Period monthly(int year, int month);
  static Period weekly_ending(int year, int month, int day);

  /// Accepts "YYYY-MM" or "YYYY-MM-DD" for monthly periods (the day is
  /// ignored) and "YYYY-MM-DD" for weekly periods.
  static Period parse(std::string_view text, Frequency freq);

  Frequency frequency() const noexcept { return freq_; }
  int year() const;
  int month() const;  ///< weekly: the month containing the week-ending date
  int day_of_month() const;  ///< weekly only

  Period plus(std::int64_t steps) const;
  Period next() const { return plus(1); }

  /// Number of steps from *this to later (negative if later precedes *this).
  std::int64_t steps_until(const Period& later) const;

  std::string to_string() const;  ///< "2020-04" or "2020-04-04"

  friend bool operator==(const Period&, const Period&) = default;
  bool operator<(const Period& other) const;
  bool operator<=(const Period& other) const;

 private:
  Period(Frequency freq, std::int64_t serial) : freq_(freq), serial_(serial) {}

  Frequency freq_;
  std::int64_t serial_;
};

}  // namespace freightcast
