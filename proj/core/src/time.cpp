#include "gridcast/time.hpp"

#include <charconv>
#include <cstdio>

#include "gridcast/error.hpp"

namespace gridcast {

using namespace std::chrono;

namespace {

Day nth_sunday(int y, unsigned m, unsigned n) {
  return sys_days{year{y} / month{m} / weekday_indexed{Sunday, n}};
}

Day last_sunday(int y, unsigned m) { return sys_days{year{y} / month{m} / weekday_last{Sunday}}; }

int parse_int(std::string_view text, std::size_t pos, std::size_t len, std::string_view whole) {
  int value = 0;
  if (pos + len > text.size()) {
    fail(ErrorCode::ParseError, "truncated timestamp '" + std::string(whole) + "'");
  }
  auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, value);
  if (ec != std::errc{} || ptr != text.data() + pos + len) {
    fail(ErrorCode::ParseError, "bad timestamp '" + std::string(whole) + "'");
  }
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"')) s.remove_suffix(1);
  return s;
}

}  // namespace

TimeZone TimeZone::utc() { return TimeZone{}; }

TimeZone TimeZone::from_name(std::string_view name) {
  if (name == "UTC" || name == "Etc/UTC" || name.empty()) return utc();
  if (name == "Europe/Berlin") return TimeZone{"Europe/Berlin", hours{1}, DstRule::eu};
  if (name == "America/New_York") return TimeZone{"America/New_York", hours{-5}, DstRule::us};
  if (name.size() > 3 && name.substr(0, 3) == "UTC" && (name[3] == '+' || name[3] == '-')) {
    int h = 0;
    auto digits = name.substr(4);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), h);
    if (ec == std::errc{} && ptr == digits.data() + digits.size() && h <= 14) {
      return TimeZone{std::string(name), hours{name[3] == '-' ? -h : h}, DstRule::none};
    }
  }
  fail(ErrorCode::InvalidArgument, "unknown time zone '" + std::string(name) + "'");
}

bool TimeZone::observes_dst_at(Hour utc) const {
  if (dst == DstRule::none) return false;
  const int y = int(year_month_day{floor<days>(utc)}.year());
  Hour begin;
  Hour end;
  if (dst == DstRule::eu) {
    begin = Hour{last_sunday(y, 3)} + hours{1};
    end = Hour{last_sunday(y, 10)} + hours{1};
  } else if (y >= 2007) {
    begin = Hour{nth_sunday(y, 3, 2)} + hours{2} - standard_offset;
    end = Hour{nth_sunday(y, 11, 1)} + hours{1} - standard_offset;
  } else {
    begin = Hour{nth_sunday(y, 4, 1)} + hours{2} - standard_offset;
    end = Hour{last_sunday(y, 10)} + hours{1} - standard_offset;
  }
  return utc >= begin && utc < end;
}

hours TimeZone::offset_at(Hour utc) const {
  return standard_offset + (observes_dst_at(utc) ? hours{1} : hours{0});
}

LocalHour TimeZone::to_local(Hour utc) const {
  return LocalHour{utc.time_since_epoch() + offset_at(utc)};
}

int TimeZone::hours_in_local_day(Day local_day) const {
  const Hour probe_start = Hour{local_day} - standard_offset - hours{3};
  int count = 0;
  for (int i = 0; i < 30; ++i) {
    const LocalHour l = to_local(probe_start + hours{i});
    if (day_of(l) == local_day) ++count;
  }
  return count;
}

Hour make_hour(int y, unsigned m, unsigned d, int h) {
  const year_month_day ymd{year{y}, month{m}, day{d}};
  if (!ymd.ok()) fail(ErrorCode::InvalidArgument, "invalid calendar date");
  return Hour{sys_days{ymd}} + hours{h};
}

Day make_day(int y, unsigned m, unsigned d) {
  const year_month_day ymd{year{y}, month{m}, day{d}};
  if (!ymd.ok()) fail(ErrorCode::InvalidArgument, "invalid calendar date");
  return sys_days{ymd};
}

Day day_of(LocalHour t) {
  return Day{floor<days>(t).time_since_epoch()};
}

int hour_of_day(LocalHour t) {
  return int((t - floor<days>(t)).count());
}

int day_of_week(Day d) {
  return int(weekday{d}.iso_encoding()) - 1;
}

int day_of_year(Day d) {
  const year y = year_month_day{d}.year();
  return int((d - sys_days{y / January / 1}).count()) + 1;
}

std::string format_hour(Hour t) {
  const auto d = floor<days>(t);
  const year_month_day ymd{d};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:00:00Z", int(ymd.year()), unsigned(ymd.month()),
                unsigned(ymd.day()), int((t - d).count()));
  return buf;
}

std::string format_day(Day d) {
  const year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()), unsigned(ymd.day()));
  return buf;
}

Day parse_day(std::string_view text) {
  const auto s = trim(text);
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') {
    fail(ErrorCode::ParseError, "expected YYYY-MM-DD, got '" + std::string(text) + "'");
  }
  const year_month_day ymd{year{parse_int(s, 0, 4, text)}, month(unsigned(parse_int(s, 5, 2, text))),
                           day(unsigned(parse_int(s, 8, 2, text)))};
  if (!ymd.ok()) fail(ErrorCode::ParseError, "invalid date '" + std::string(text) + "'");
  return sys_days{ymd};
}

Hour parse_timestamp(std::string_view text) {
  const auto s = trim(text);
  const Day d = parse_day(s.substr(0, std::min<std::size_t>(10, s.size())));
  if (s.size() == 10) return Hour{d};
  if (s.size() < 16 || (s[10] != 'T' && s[10] != ' ') || s[13] != ':') {
    fail(ErrorCode::ParseError, "bad timestamp '" + std::string(text) + "'");
  }
  const int h = parse_int(s, 11, 2, text);
  const int minute = parse_int(s, 14, 2, text);
  std::size_t pos = 16;
  int second = 0;
  if (pos < s.size() && s[pos] == ':') {
    second = parse_int(s, pos + 1, 2, text);
    pos += 3;
  }
  if (h > 23 || minute > 59 || second > 59) {
    fail(ErrorCode::ParseError, "bad time of day in '" + std::string(text) + "'");
  }
  if (minute != 0 || second != 0) {
    fail(ErrorCode::ParseError, "timestamp not hour-aligned: '" + std::string(text) + "'");
  }
  Hour t = Hour{d} + hours{h};
  if (pos == s.size() || (s[pos] == 'Z' && pos + 1 == s.size())) return t;
  if ((s[pos] == '+' || s[pos] == '-') && s.size() == pos + 6 && s[pos + 3] == ':') {
    const int oh = parse_int(s, pos + 1, 2, text);
    const int om = parse_int(s, pos + 4, 2, text);
    if (om != 0) fail(ErrorCode::ParseError, "sub-hour UTC offsets unsupported: '" + std::string(text) + "'");
    return s[pos] == '+' ? t - hours{oh} : t + hours{oh};
  }
  fail(ErrorCode::ParseError, "bad timestamp suffix in '" + std::string(text) + "'");
}

}  // namespace gridcast
