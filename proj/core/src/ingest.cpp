#include "gridcast/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "gridcast/csv.hpp"
#include "gridcast/error.hpp"

namespace gridcast {

namespace fs = std::filesystem;
using std::chrono::days;
using std::chrono::hours;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void warn(Warnings* sink, std::string message) {
  if (sink != nullptr) sink->push_back(std::move(message));
}

struct WideRow {
  int id = 0;
  Day day{};
  std::array<double, 24> values{};
  std::array<bool, 24> present{};
};

// Shared parser for the GEFC "<id>,year,month,day,h1..h24" layout.
std::vector<WideRow> read_wide(const fs::path& path, std::string_view id_column) {
  csv::Reader reader(path);
  const std::size_t c_id = reader.column(id_column);
  const std::size_t c_year = reader.column("year");
  const std::size_t c_month = reader.column("month");
  const std::size_t c_day = reader.column("day");
  std::array<std::size_t, 24> c_hour{};
  for (int h = 0; h < 24; ++h) c_hour[std::size_t(h)] = reader.column("h" + std::to_string(h + 1));

  std::vector<WideRow> rows;
  std::vector<std::string> f;
  while (reader.next(f)) {
    const std::string where = path.filename().string() + " row " + std::to_string(reader.line());
    WideRow row;
    row.id = int(csv::parse_integer(f[c_id], where + " column " + std::string(id_column)));
    const int y = int(csv::parse_integer(f[c_year], where + " column year"));
    const auto m = unsigned(csv::parse_integer(f[c_month], where + " column month"));
    const auto d = unsigned(csv::parse_integer(f[c_day], where + " column day"));
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok()) fail(ErrorCode::ParseError, where + ": invalid date");
    row.day = std::chrono::sys_days{ymd};
    for (std::size_t h = 0; h < 24; ++h) {
      std::string_view cell = f[c_hour[h]];
      while (!cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
      if (cell.empty()) {
        row.values[h] = kNaN;
        row.present[h] = false;
      } else {
        row.values[h] = csv::parse_double(cell, where + " column h" + std::to_string(h + 1), true);
        row.present[h] = true;
      }
    }
    rows.push_back(row);
  }
  return rows;
}

bool year_selected(Day d, const GefcReadOptions& options) {
  const int y = int(std::chrono::year_month_day{d}.year());
  if (options.first_year && y < *options.first_year) return false;
  if (options.last_year && y > *options.last_year) return false;
  return true;
}

}  // namespace

std::optional<int> gefc_zone_of(const std::string& series_id) {
  if (series_id.rfind("zone_", 0) != 0) return std::nullopt;
  try {
    return int(csv::parse_integer(series_id.substr(5), series_id));
  } catch (const Error&) {
    return std::nullopt;
  }
}

HierarchicalSet read_gefc_load(const fs::path& path, const GefcReadOptions& options, Warnings* warnings) {
  std::map<int, std::map<Day, WideRow>> zones;
  for (auto& row : read_wide(path, "zone_id")) {
    if (row.id < 1) fail(ErrorCode::ParseError, path.string() + ": zone_id must be >= 1");
    if (std::find(options.excluded_zones.begin(), options.excluded_zones.end(), row.id) !=
        options.excluded_zones.end()) {
      continue;
    }
    if (!year_selected(row.day, options)) continue;
    auto& by_day = zones[row.id];
    if (!by_day.emplace(row.day, row).second) {
      fail(ErrorCode::ParseError, path.string() + ": duplicate day " + format_day(row.day) + " for zone " +
                                      std::to_string(row.id));
    }
  }
  if (zones.empty()) fail(ErrorCode::MissingZone, path.string() + ": no zones left after exclusion");

  const Day first = zones.begin()->second.begin()->first;
  const Day last = zones.begin()->second.rbegin()->first;
  HierarchicalSet set;
  for (const auto& [zone, by_day] : zones) {
    if (by_day.begin()->first != first || by_day.rbegin()->first != last) {
      fail(ErrorCode::MissingZone, "zone " + std::to_string(zone) + " covers a different date range");
    }
    const auto n_days = std::size_t((last - first).count()) + 1;
    if (by_day.size() != n_days) {
      fail(ErrorCode::MissingZone, "zone " + std::to_string(zone) + " is missing days; hourly continuity broken");
    }
    std::vector<double> values;
    std::vector<Quality> quality;
    values.reserve(n_days * 24);
    std::size_t empty_cells = 0;
    for (const auto& [day, row] : by_day) {
      for (std::size_t h = 0; h < 24; ++h) {
        values.push_back(row.values[h]);
        quality.push_back(row.present[h] ? Quality::ok : Quality::missing);
        if (!row.present[h]) ++empty_cells;
      }
    }
    if (empty_cells > 0) {
      warn(warnings, "zone " + std::to_string(zone) + ": " + std::to_string(empty_cells) + " empty cells flagged missing");
    }
    const std::string id = "zone_" + std::to_string(zone);
    set.substations.emplace_back(id, HourlyIndex(Hour{first}, n_days * 24), std::move(values), std::move(quality),
                                 "kW");
    set.membership[id] = "grid";
  }
  set.grid = Series("grid", set.substations.front().index(), std::vector<double>(set.substations.front().size()),
                    "kW");
  return rebuild_grid(set);
}

Series read_gefc_temperature(const fs::path& path, const GefcReadOptions& options, Warnings* warnings) {
  std::map<Day, std::vector<WideRow>> by_day;
  std::map<int, std::size_t> station_days;
  for (auto& row : read_wide(path, "station_id")) {
    if (!year_selected(row.day, options)) continue;
    station_days[row.id] += 1;
    by_day[row.day].push_back(row);
  }
  if (by_day.empty()) fail(ErrorCode::ParseError, path.string() + ": no temperature rows");
  const Day first = by_day.begin()->first;
  const Day last = by_day.rbegin()->first;
  const auto n_days = std::size_t((last - first).count()) + 1;
  if (by_day.size() != n_days) {
    fail(ErrorCode::ParseError, path.string() + ": missing days; hourly continuity broken");
  }

  const std::size_t n_stations = station_days.size();
  bool unequal = false;
  for (const auto& [station, count] : station_days) unequal = unequal || count != n_days;

  std::vector<double> values;
  values.reserve(n_days * 24);
  std::size_t short_hours = 0;
  for (const auto& [day, rows] : by_day) {
    for (std::size_t h = 0; h < 24; ++h) {
      double sum = 0.0;
      std::size_t n = 0;
      for (const auto& r : rows) {
        if (r.present[h]) {
          sum += r.values[h];
          ++n;
        }
      }
      if (n == 0) {
        fail(ErrorCode::ParseError, path.string() + ": no station reports " + format_day(day) + " h" +
                                        std::to_string(h + 1));
      }
      if (n != n_stations) ++short_hours;
      values.push_back(sum / double(n));
    }
  }
  if (unequal || short_hours > 0) {
    warn(warnings, std::string(to_string(ErrorCode::StationCountMismatch)) + ": " + std::to_string(short_hours) +
                       " hours averaged over fewer than " + std::to_string(n_stations) + " stations");
  }
  return Series("temperature", HourlyIndex(Hour{first}, n_days * 24), std::move(values), "degC");
}

std::vector<Series> read_household_long(const fs::path& path) {
  csv::Reader reader(path);
  const std::size_t c_id = reader.column("household_id");
  const std::size_t c_ts = reader.column("timestamp");
  const std::size_t c_val = reader.column("value_kwh");
  const std::size_t c_q = reader.column("quality");

  struct Acc {
    Hour start{};
    Hour last{};
    std::vector<double> values;
    std::vector<Quality> quality;
  };
  std::vector<std::string> order;
  std::map<std::string, Acc> acc;
  std::vector<std::string> f;
  while (reader.next(f)) {
    const std::string where = path.filename().string() + " row " + std::to_string(reader.line());
    const std::string& id = f[c_id];
    if (id.empty()) fail(ErrorCode::ParseError, where + ": empty household_id");
    Hour t;
    try {
      t = parse_timestamp(f[c_ts]);
    } catch (const Error& e) {
      fail(ErrorCode::ParseError, where + " column timestamp: " + e.what());
    }
    Quality q;
    try {
      q = parse_quality(f[c_q]);
    } catch (const Error& e) {
      fail(ErrorCode::ParseError, where + " column quality: " + e.what());
    }
    double v = kNaN;
    if (!f[c_val].empty()) {
      v = csv::parse_double(f[c_val], where + " column value_kwh");
    } else if (q == Quality::ok) {
      fail(ErrorCode::ParseError, where + " column value_kwh: empty value flagged ok");
    }
    auto [it, inserted] = acc.try_emplace(id);
    Acc& a = it->second;
    if (inserted) {
      order.push_back(id);
      a.start = t;
    } else if (t <= a.last) {
      fail(ErrorCode::NonMonotonicTimestamps,
           where + ": household '" + id + "' timestamp " + format_hour(t) + " not after " + format_hour(a.last));
    } else if (t != a.last + hours{1}) {
      fail(ErrorCode::ParseError, where + ": household '" + id + "' skips from " + format_hour(a.last) + " to " +
                                      format_hour(t) + "; hourly continuity broken");
    }
    a.last = t;
    a.values.push_back(v);
    a.quality.push_back(q);
  }
  std::vector<Series> out;
  out.reserve(order.size());
  for (const auto& id : order) {
    Acc& a = acc[id];
    const auto n = a.values.size();
    out.emplace_back(id, HourlyIndex(a.start, n), std::move(a.values), std::move(a.quality), "kWh");
  }
  return out;
}

Series read_incidence(const fs::path& path, Warnings* warnings) {
  csv::Reader reader(path);
  const std::size_t c_date = reader.column("date");
  const std::size_t c_inc = reader.column("incidence");
  std::vector<std::pair<Day, double>> daily;
  std::vector<std::string> f;
  while (reader.next(f)) {
    const std::string where = path.filename().string() + " row " + std::to_string(reader.line());
    Day d;
    try {
      d = parse_day(f[c_date]);
    } catch (const Error& e) {
      fail(ErrorCode::ParseError, where + " column date: " + e.what());
    }
    const double v = csv::parse_double(f[c_inc], where + " column incidence");
    if (!daily.empty() && d <= daily.back().first) {
      fail(ErrorCode::ParseError, where + ": dates must be strictly increasing");
    }
    daily.emplace_back(d, v);
  }
  if (daily.empty()) fail(ErrorCode::ParseError, path.string() + ": no incidence rows");

  const Day first = daily.front().first;
  const auto n_days = std::size_t((daily.back().first - first).count()) + 1;
  std::vector<double> values;
  values.reserve(n_days * 24);
  std::size_t filled = 0;
  std::size_t next = 0;
  double current = daily.front().second;
  for (std::size_t i = 0; i < n_days; ++i) {
    const Day d = first + days{long(i)};
    if (next < daily.size() && daily[next].first == d) {
      current = daily[next].second;
      ++next;
    } else {
      ++filled;
    }
    values.insert(values.end(), 24, current);
  }
  if (filled > 0) warn(warnings, "incidence: forward-filled " + std::to_string(filled) + " gap day(s)");
  return Series("incidence", HourlyIndex(Hour{first}, n_days * 24), std::move(values), "cases");
}

void write_gefc_load(const fs::path& path, std::span<const Series> substations) {
  std::ostringstream out;
  out << "zone_id,year,month,day";
  for (int h = 1; h <= 24; ++h) out << ",h" << h;
  out << '\n';
  int fallback = 0;
  for (const auto& s : substations) {
    ++fallback;
    if (fallback == 9) ++fallback;  // 9 is dropped by the reader
    const int zone = gefc_zone_of(s.id()).value_or(fallback);
    if (s.index().start() != Hour{std::chrono::floor<days>(s.index().start())} || s.size() % 24 != 0) {
      fail(ErrorCode::InvalidArgument, "GEFC layout needs whole UTC days");
    }
    for (std::size_t d = 0; d < s.size() / 24; ++d) {
      const std::chrono::year_month_day ymd{std::chrono::floor<days>(s.index().at(d * 24))};
      out << zone << ',' << int(ymd.year()) << ',' << unsigned(ymd.month()) << ',' << unsigned(ymd.day());
      for (std::size_t h = 0; h < 24; ++h) {
        const double v = s[d * 24 + h];
        out << ',';
        if (std::isfinite(v) && s.quality()[d * 24 + h] == Quality::ok) out << csv::format_double(v);
      }
      out << '\n';
    }
  }
  csv::write_file_atomic(path, out.str());
}

void write_gefc_temperature(const fs::path& path, const Series& temperature, int station_id) {
  std::ostringstream out;
  out << "station_id,year,month,day";
  for (int h = 1; h <= 24; ++h) out << ",h" << h;
  out << '\n';
  if (temperature.size() % 24 != 0) fail(ErrorCode::InvalidArgument, "GEFC layout needs whole UTC days");
  for (std::size_t d = 0; d < temperature.size() / 24; ++d) {
    const std::chrono::year_month_day ymd{std::chrono::floor<days>(temperature.index().at(d * 24))};
    out << station_id << ',' << int(ymd.year()) << ',' << unsigned(ymd.month()) << ',' << unsigned(ymd.day());
    for (std::size_t h = 0; h < 24; ++h) out << ',' << csv::format_double(temperature[d * 24 + h]);
    out << '\n';
  }
  csv::write_file_atomic(path, out.str());
}

void write_household_long(const fs::path& path, std::span<const Series> households) {
  std::ostringstream out;
  out << "household_id,timestamp,value_kwh,quality\n";
  for (const auto& s : households) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      out << s.id() << ',' << format_hour(s.index().at(i)) << ',';
      if (std::isfinite(s[i])) out << csv::format_double(s[i]);
      out << ',' << to_string(s.quality()[i]) << '\n';
    }
  }
  csv::write_file_atomic(path, out.str());
}

void write_incidence(const fs::path& path, const Series& hourly) {
  std::ostringstream out;
  out << "date,incidence\n";
  for (std::size_t i = 0; i < hourly.size(); i += 24) {
    out << format_day(std::chrono::floor<days>(hourly.index().at(i))) << ',' << csv::format_double(hourly[i])
        << '\n';
  }
  csv::write_file_atomic(path, out.str());
}

}  // namespace gridcast
