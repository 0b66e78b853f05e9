#include "gridcast/preprocess.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "gridcast/csv.hpp"
#include "gridcast/error.hpp"

namespace gridcast {

using std::chrono::hours;

namespace {

// Fills values[i] for every i with bad[i] from the nearest good neighbours.
// Returns the filled positions. Requires at least one good position.
std::vector<std::size_t> linear_fill(std::vector<double>& values, const std::vector<bool>& bad) {
  const std::size_t n = values.size();
  std::vector<std::size_t> filled;
  std::size_t prev = n;  // n == none yet
  std::size_t i = 0;
  while (i < n) {
    if (!bad[i]) {
      prev = i;
      ++i;
      continue;
    }
    std::size_t next = i;
    while (next < n && bad[next]) ++next;
    for (std::size_t j = i; j < next; ++j) {
      if (prev == n) {
        values[j] = values[next];
      } else if (next == n) {
        values[j] = values[prev];
      } else {
        const double w = double(j - prev) / double(next - prev);
        values[j] = values[prev] + w * (values[next] - values[prev]);
      }
      filled.push_back(j);
    }
    i = next;
  }
  return filled;
}

}  // namespace

std::pair<std::vector<Series>, CleaningReport> filter_low_consumption(std::span<const Series> households,
                                                                      const LowConsumptionRule& rule) {
  std::vector<Series> kept;
  CleaningReport report;
  for (const auto& h : households) {
    double total = 0.0;
    std::size_t n = 0;
    for (double v : h.values()) {
      if (std::isfinite(v)) {
        total += v;
        ++n;
      }
    }
    const double mean = n > 0 ? total / double(n) : 0.0;
    if (mean < rule.min_mean_kwh || total < rule.min_total_kwh) {
      report.households_dropped.push_back(h.id());
    } else {
      kept.push_back(h);
    }
  }
  return {std::move(kept), std::move(report)};
}

Series harmonize_dst(const Series& series, const TimeZone& zone) {
  const auto& idx = series.index();
  if (idx.empty()) return series;

  struct Entry {
    int local_hour;
    std::size_t pos;
  };
  std::vector<double> values;
  std::vector<Quality> quality;
  Day first_day{};
  bool have_first = false;
  std::size_t pos = 0;
  while (pos < idx.size()) {
    const Day day = day_of(zone.to_local(idx.at(pos)));
    std::vector<Entry> entries;
    while (pos < idx.size()) {
      const LocalHour l = zone.to_local(idx.at(pos));
      if (day_of(l) != day) break;
      entries.push_back({hour_of_day(l), pos});
      ++pos;
    }
    const int count = int(entries.size());
    if (count < 23 || count > 25 || count != zone.hours_in_local_day(day) || entries.front().local_hour != 0) {
      fail(ErrorCode::MalformedDay, format_day(day) + " has " + std::to_string(count) + " hours");
    }
    if (!have_first) {
      first_day = day;
      have_first = true;
    }
    // First occurrence of each local hour; -1 marks the skipped spring hour.
    std::array<long, 24> slot;
    slot.fill(-1);
    for (const auto& e : entries) {
      if (slot[std::size_t(e.local_hour)] < 0) slot[std::size_t(e.local_hour)] = long(e.pos);
    }
    for (std::size_t h = 0; h < 24; ++h) {
      if (slot[h] >= 0) {
        values.push_back(series[std::size_t(slot[h])]);
        quality.push_back(series.quality()[std::size_t(slot[h])]);
        continue;
      }
      if (h == 0 || h == 23 || slot[h - 1] < 0 || slot[h + 1] < 0) {
        fail(ErrorCode::MalformedDay, format_day(day) + " lacks hour " + std::to_string(h));
      }
      const auto a = std::size_t(slot[h - 1]);
      const auto b = std::size_t(slot[h + 1]);
      values.push_back(0.5 * (series[a] + series[b]));
      const bool ok = series.quality()[a] == Quality::ok && series.quality()[b] == Quality::ok;
      quality.push_back(ok ? Quality::ok : Quality::missing);
    }
  }
  const std::size_t n = values.size();
  return Series(series.id(), HourlyIndex(Hour{first_day}, n), std::move(values), std::move(quality),
                series.unit());
}

std::pair<Series, CleaningReport> interpolate_flagged(const Series& series) {
  std::vector<double> values(series.values().begin(), series.values().end());
  std::vector<bool> bad(values.size());
  bool any_good = false;
  for (std::size_t i = 0; i < values.size(); ++i) {
    bad[i] = series.quality()[i] != Quality::ok || !std::isfinite(values[i]);
    any_good = any_good || !bad[i];
  }
  if (!any_good) fail(ErrorCode::AllBad, "series '" + series.id() + "' has no ok value");
  CleaningReport report;
  report.interpolated_positions = linear_fill(values, bad);
  report.interpolated_count = report.interpolated_positions.size();
  std::vector<Quality> quality(values.size(), Quality::ok);
  return {series.with_values(std::move(values), std::move(quality)), std::move(report)};
}

double quantile(std::span<const double> values, double q) {
  std::vector<double> sorted;
  sorted.reserve(values.size());
  for (double v : values) {
    if (std::isfinite(v)) sorted.push_back(v);
  }
  if (sorted.empty()) fail(ErrorCode::InvalidArgument, "quantile of empty data");
  if (!(q >= 0.0 && q <= 1.0)) fail(ErrorCode::InvalidArgument, "quantile level outside [0,1]");
  std::sort(sorted.begin(), sorted.end());
  const double h = double(sorted.size() - 1) * q;
  const auto lo = std::size_t(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - double(lo)) * (sorted[hi] - sorted[lo]);
}

double iqr_lower_fence(std::span<const double> values) {
  const double q25 = quantile(values, 0.25);
  const double q75 = quantile(values, 0.75);
  return q25 - 1.5 * (q75 - q25);
}

std::pair<Series, CleaningReport> iqr_clean(const Series& series) {
  if (series.size() < 4) fail(ErrorCode::InvalidArgument, "iqr_clean needs at least 4 values");
  const double fence = iqr_lower_fence(series.values());
  std::vector<double> values(series.values().begin(), series.values().end());
  std::vector<bool> bad(values.size(), false);
  CleaningReport report;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (std::isfinite(values[i]) && values[i] < fence) {
      bad[i] = true;
      report.removed_positions.push_back(i);
    }
  }
  report.removed_count = report.removed_positions.size();
  if (report.removed_count == 0) return {series, std::move(report)};
  // Interpolate across removed points only; other non-finite values stay as
  // anchors-to-avoid as well.
  std::vector<bool> anchor_bad = bad;
  for (std::size_t i = 0; i < values.size(); ++i) anchor_bad[i] = anchor_bad[i] || !std::isfinite(values[i]);
  std::vector<double> filled = values;
  linear_fill(filled, anchor_bad);
  for (std::size_t i : report.removed_positions) values[i] = filled[i];
  report.interpolated_positions = report.removed_positions;
  report.interpolated_count = report.removed_count;
  return {series.with_values(std::move(values), std::vector<Quality>(series.quality().begin(), series.quality().end())),
          std::move(report)};
}

HolidayCalendar HolidayCalendar::none() { return HolidayCalendar{}; }

HolidayCalendar HolidayCalendar::from_dates(std::vector<Day> holidays, int first_year, int last_year) {
  if (first_year > last_year) fail(ErrorCode::InvalidArgument, "holiday coverage years reversed");
  HolidayCalendar c;
  c.days_.insert(holidays.begin(), holidays.end());
  c.first_year_ = first_year;
  c.last_year_ = last_year;
  c.unbounded_ = false;
  return c;
}

HolidayCalendar HolidayCalendar::read(const std::filesystem::path& path) {
  csv::Reader reader(path);
  const std::size_t c_date = reader.column("date");
  std::vector<Day> dates;
  std::vector<std::string> f;
  while (reader.next(f)) {
    try {
      dates.push_back(parse_day(f[c_date]));
    } catch (const Error& e) {
      fail(ErrorCode::ParseError, path.filename().string() + " row " + std::to_string(reader.line()) + ": " + e.what());
    }
  }
  if (dates.empty()) fail(ErrorCode::ParseError, path.string() + ": no holidays listed");
  int lo = 1 << 30;
  int hi = -(1 << 30);
  for (Day d : dates) {
    const int y = int(std::chrono::year_month_day{d}.year());
    lo = std::min(lo, y);
    hi = std::max(hi, y);
  }
  return from_dates(std::move(dates), lo, hi);
}

bool HolidayCalendar::covers(Day d) const {
  if (unbounded_) return true;
  const int y = int(std::chrono::year_month_day{d}.year());
  return y >= first_year_ && y <= last_year_;
}

bool HolidayCalendar::is_holiday(Day d) const { return days_.contains(d); }

}  // namespace gridcast
