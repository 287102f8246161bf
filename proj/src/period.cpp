#include "freightcast/period.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

namespace freightcast {

namespace {

namespace chr = std::chrono;

std::int64_t days_from_civil(int y, int m, int d) {
  const chr::year_month_day ymd{chr::year{y}, chr::month{static_cast<unsigned>(m)},
                                chr::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) {
    throw ParseError("invalid calendar date " + std::to_string(y) + "-" + std::to_string(m) +
                     "-" + std::to_string(d));
  }
  return chr::sys_days{ymd}.time_since_epoch().count();
}

chr::year_month_day civil_from_days(std::int64_t days) {
  return chr::year_month_day{chr::sys_days{chr::days{days}}};
}

int parse_int(std::string_view text, const char* what) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError(std::string("cannot parse ") + what + " from '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

std::string to_string(Frequency f) {
  return f == Frequency::Monthly ? "monthly" : "weekly";
}

Frequency frequency_from_string(std::string_view s) {
  if (s == "monthly") return Frequency::Monthly;
  if (s == "weekly") return Frequency::Weekly;
  throw ParseError("unknown frequency '" + std::string(s) + "' (expected monthly or weekly)");
}

Period Period::monthly(int year, int month) {
  if (month < 1 || month > 12) {
    throw ParseError("month out of range: " + std::to_string(month));
  }
  return Period(Frequency::Monthly, static_cast<std::int64_t>(year) * 12 + (month - 1));
}

Period Period::weekly_ending(int year, int month, int day) {
  return Period(Frequency::Weekly, days_from_civil(year, month, day));
}

Period Period::parse(std::string_view text, Frequency freq) {
  const auto dash1 = text.find('-');
  if (dash1 == std::string_view::npos) {
    throw ParseError("cannot parse period '" + std::string(text) + "'");
  }
  const int year = parse_int(text.substr(0, dash1), "year");
  const auto rest = text.substr(dash1 + 1);
  const auto dash2 = rest.find('-');
  if (dash2 == std::string_view::npos) {
    if (freq == Frequency::Weekly) {
      throw ParseError("weekly period '" + std::string(text) +
                       "' must be a full week-ending date (YYYY-MM-DD)");
    }
    return monthly(year, parse_int(rest, "month"));
  }
  const int month = parse_int(rest.substr(0, dash2), "month");
  const int day = parse_int(rest.substr(dash2 + 1), "day");
  if (freq == Frequency::Monthly) {
    (void)days_from_civil(year, month, day);  // validates the full date
    return monthly(year, month);
  }
  return weekly_ending(year, month, day);
}

int Period::year() const {
  if (freq_ == Frequency::Monthly) {
    // floor division keeps pre-1 CE serials consistent
    std::int64_t y = serial_ >= 0 ? serial_ / 12 : (serial_ - 11) / 12;
    return static_cast<int>(y);
  }
  return static_cast<int>(civil_from_days(serial_).year());
}

int Period::month() const {
  if (freq_ == Frequency::Monthly) {
    std::int64_t m = serial_ % 12;
    if (m < 0) m += 12;
    return static_cast<int>(m) + 1;
  }
  return static_cast<int>(static_cast<unsigned>(civil_from_days(serial_).month()));
}

int Period::day_of_month() const {
  if (freq_ == Frequency::Monthly) {
    throw RangeError("day_of_month is only defined for weekly periods");
  }
  return static_cast<int>(static_cast<unsigned>(civil_from_days(serial_).day()));
}

Period Period::plus(std::int64_t steps) const {
  const std::int64_t stride = freq_ == Frequency::Monthly ? 1 : 7;
  return Period(freq_, serial_ + steps * stride);
}

std::int64_t Period::steps_until(const Period& later) const {
  if (later.freq_ != freq_) {
    throw AlignmentError("cannot compare periods of different frequencies");
  }
  const std::int64_t stride = freq_ == Frequency::Monthly ? 1 : 7;
  const std::int64_t delta = later.serial_ - serial_;
  if (delta % stride != 0) {
    throw AlignmentError("periods " + to_string() + " and " + later.to_string() +
                         " are not on the same weekly grid");
  }
  return delta / stride;
}

std::string Period::to_string() const {
  char buf[16];
  if (freq_ == Frequency::Monthly) {
    std::snprintf(buf, sizeof(buf), "%04d-%02d", year(), month());
  } else {
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year(), month(), day_of_month());
  }
  return buf;
}

bool Period::operator<(const Period& other) const {
  if (other.freq_ != freq_) {
    throw AlignmentError("cannot compare periods of different frequencies");
  }
  return serial_ < other.serial_;
}

bool Period::operator<=(const Period& other) const {
  return *this == other || *this < other;
}

}  // namespace freightcast
