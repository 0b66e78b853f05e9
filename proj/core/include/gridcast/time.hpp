#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace gridcast {

// UTC instant at hour resolution. Minute/second components are zero by type.
using Hour = std::chrono::sys_time<std::chrono::hours>;
using Day = std::chrono::sys_days;

// Wall-clock time in some declared zone, still at hour resolution.
using LocalHour = std::chrono::local_time<std::chrono::hours>;

enum class DstRule {
  none,
  eu,  // last Sunday of March to last Sunday of October, switching at 01:00 UTC
  us,  // 2nd Sunday March to 1st Sunday November (2007+), first Sunday April to last Sunday October before
};

// A fixed standard offset plus a daylight-saving rule. Covers the zones the
// datasets need without depending on a system tz database.
struct TimeZone {
  std::string name = "UTC";
  std::chrono::hours standard_offset{0};
  DstRule dst = DstRule::none;

  static TimeZone utc();
  // Accepts "UTC", "Europe/Berlin", "America/New_York" and "UTC+N" / "UTC-N".
  static TimeZone from_name(std::string_view name);

  bool observes_dst_at(Hour utc) const;
  std::chrono::hours offset_at(Hour utc) const;
  LocalHour to_local(Hour utc) const;
  // Number of UTC hours falling on the given local calendar day (23, 24 or 25).
  int hours_in_local_day(Day local_day) const;
};

Hour make_hour(int year, unsigned month, unsigned day, int hour = 0);
Day make_day(int year, unsigned month, unsigned day);

Day day_of(LocalHour t);
int hour_of_day(LocalHour t);
// 0 = Monday ... 6 = Sunday.
int day_of_week(Day d);
// 1-based day of year.
int day_of_year(Day d);

// ISO-8601 "YYYY-MM-DDTHH:MM:SSZ". Parsing also accepts a space separator,
// a missing seconds field, and explicit "+HH:MM" offsets (converted to UTC).
std::string format_hour(Hour t);
std::string format_day(Day d);
Hour parse_timestamp(std::string_view text);
Day parse_day(std::string_view text);

}  // namespace gridcast
