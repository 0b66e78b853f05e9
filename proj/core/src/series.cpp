#include "gridcast/series.hpp"

#include <algorithm>
#include <cmath>

#include "gridcast/error.hpp"

namespace gridcast {

using std::chrono::hours;

std::size_t HourlyIndex::offset_of(Hour t) const {
  if (!contains(t)) fail(ErrorCode::IndexMismatch, format_hour(t) + " outside index");
  return static_cast<std::size_t>((t - start_).count());
}

HourlyIndex HourlyIndex::slice(std::size_t offset, std::size_t count) const {
  if (offset + count > length_) fail(ErrorCode::IndexMismatch, "slice exceeds index");
  return HourlyIndex(at(offset), count);
}

std::string_view to_string(Quality q) noexcept {
  switch (q) {
    case Quality::ok: return "ok";
    case Quality::provisional: return "provisional";
    case Quality::defective: return "defective";
    case Quality::incorrect: return "incorrect";
    case Quality::missing: return "missing";
  }
  return "ok";
}

Quality parse_quality(std::string_view text) {
  if (text == "ok" || text.empty()) return Quality::ok;
  if (text == "provisional") return Quality::provisional;
  if (text == "defective") return Quality::defective;
  if (text == "incorrect") return Quality::incorrect;
  if (text == "missing") return Quality::missing;
  fail(ErrorCode::ParseError, "unknown quality flag '" + std::string(text) + "'");
}

Series::Series(std::string id, HourlyIndex index, std::vector<double> values, std::string unit)
    : Series(std::move(id), index, std::move(values), {}, std::move(unit)) {}

Series::Series(std::string id, HourlyIndex index, std::vector<double> values, std::vector<Quality> quality,
               std::string unit)
    : id_(std::move(id)),
      index_(index),
      values_(std::move(values)),
      quality_(std::move(quality)),
      unit_(std::move(unit)) {
  if (quality_.empty()) quality_.assign(values_.size(), Quality::ok);
  if (values_.size() != index_.size() || quality_.size() != index_.size()) {
    fail(ErrorCode::IndexMismatch, "series '" + id_ + "': values/quality length differs from index");
  }
}

std::size_t Series::flagged_count() const {
  return static_cast<std::size_t>(
      std::count_if(quality_.begin(), quality_.end(), [](Quality q) { return q != Quality::ok; }));
}

Series Series::slice(std::size_t offset, std::size_t count) const {
  const auto idx = index_.slice(offset, count);
  return Series(id_, idx, {values_.begin() + long(offset), values_.begin() + long(offset + count)},
                {quality_.begin() + long(offset), quality_.begin() + long(offset + count)}, unit_);
}

Series Series::with_values(std::vector<double> values) const {
  return Series(id_, index_, std::move(values), quality_, unit_);
}

Series Series::with_values(std::vector<double> values, std::vector<Quality> quality) const {
  return Series(id_, index_, std::move(values), std::move(quality), unit_);
}

Series Series::renamed(std::string id) const {
  return Series(std::move(id), index_, values_, quality_, unit_);
}

SplitSpec SplitSpec::at_fraction(double f) {
  if (!(f > 0.0 && f < 1.0)) fail(ErrorCode::DegenerateSplit, "split fraction must lie in (0,1)");
  SplitSpec s;
  s.mode = Mode::fraction;
  s.fraction = f;
  return s;
}

SplitSpec SplitSpec::at_date(Hour boundary) {
  SplitSpec s;
  s.mode = Mode::date;
  s.boundary = boundary;
  return s;
}

std::string_view to_string(WindowKind kind) noexcept { return kind == WindowKind::day ? "day" : "week"; }

std::size_t horizon_hours(WindowKind kind) noexcept { return kind == WindowKind::day ? 24 : 168; }

std::vector<Series> align(std::span<const Series> series) {
  if (series.empty()) return {};
  Hour lo = series.front().index().start();
  Hour hi = series.front().index().end();
  for (const auto& s : series) {
    lo = std::max(lo, s.index().start());
    hi = std::min(hi, s.index().end());
  }
  if (hi <= lo) fail(ErrorCode::EmptyOverlap, "series indices do not overlap");
  const auto n = static_cast<std::size_t>((hi - lo).count());
  std::vector<Series> out;
  out.reserve(series.size());
  for (const auto& s : series) out.push_back(s.slice(s.index().offset_of(lo), n));
  return out;
}

std::size_t split_point(const HourlyIndex& index, const SplitSpec& spec) {
  const std::size_t n = index.size();
  std::size_t cut = 0;
  if (spec.mode == SplitSpec::Mode::fraction) {
    if (!(spec.fraction > 0.0 && spec.fraction < 1.0)) {
      fail(ErrorCode::DegenerateSplit, "split fraction must lie in (0,1)");
    }
    // Relative nudge so that e.g. 0.29 * 100 lands on 29, not 28.
    cut = static_cast<std::size_t>(std::floor(spec.fraction * double(n) * (1.0 + 1e-12)));
  } else {
    if (spec.boundary <= index.start()) {
      cut = 0;
    } else if (spec.boundary >= index.end()) {
      cut = n;
    } else {
      cut = index.offset_of(spec.boundary);
    }
  }
  if (cut == 0 || cut >= n) fail(ErrorCode::DegenerateSplit, "split leaves one side empty");
  return cut;
}

std::pair<Series, Series> time_split(const Series& series, const SplitSpec& spec) {
  if (series.size() < 2) fail(ErrorCode::DegenerateSplit, "series needs at least 2 hours to split");
  const std::size_t cut = split_point(series.index(), spec);
  return {series.slice(0, cut), series.slice(cut, series.size() - cut)};
}

std::vector<EvalWindow> enumerate_eval_windows(const Series& test, std::size_t k, WindowKind kind,
                                               std::size_t history_hours, const TimeZone& zone) {
  if (k == 0) fail(ErrorCode::InvalidArgument, "input window k must be >= 1");
  const std::size_t horizon = horizon_hours(kind);
  const auto& idx = test.index();
  std::vector<EvalWindow> out;
  std::size_t i = 0;
  while (i + horizon <= idx.size()) {
    const Hour t = idx.at(i);
    const LocalHour local = zone.to_local(t);
    const bool starts_period =
        hour_of_day(local) == 0 && (kind == WindowKind::day || day_of_week(day_of(local)) == 0);
    // The period must span exactly `horizon` hours to the next local boundary;
    // DST transition days do not qualify.
    const bool complete = starts_period && zone.to_local(t + hours(long(horizon))) ==
                                               local + hours(long(horizon));
    if (complete && i + history_hours >= k) {
      EvalWindow w;
      w.kind = kind;
      w.target = HourSpan{t, horizon};
      w.input = HourSpan{t - hours(long(k)), k};
      out.push_back(w);
      i += horizon;
      continue;
    }
    ++i;
  }
  return out;
}

Series aggregate_bottom_up(std::span<const Series> forecasts, std::string grid_id) {
  if (forecasts.empty()) fail(ErrorCode::EmptyHierarchy, "no substation series to aggregate");
  const auto& idx = forecasts.front().index();
  for (const auto& s : forecasts) {
    if (s.index() != idx) fail(ErrorCode::IndexMismatch, "series '" + s.id() + "' index differs");
  }
  std::vector<double> sum(idx.size());
  std::vector<Quality> quality(idx.size(), Quality::ok);
  std::vector<double> column(forecasts.size());
  for (std::size_t t = 0; t < idx.size(); ++t) {
    for (std::size_t s = 0; s < forecasts.size(); ++s) {
      column[s] = forecasts[s][t];
      if (forecasts[s].quality()[t] != Quality::ok) quality[t] = Quality::missing;
    }
    // Summing in sorted order makes the result independent of input order.
    std::sort(column.begin(), column.end());
    double acc = 0.0;
    for (double v : column) acc += v;
    sum[t] = acc;
  }
  return Series(std::move(grid_id), idx, std::move(sum), std::move(quality), forecasts.front().unit());
}

HierarchicalSet rebuild_grid(const HierarchicalSet& set) {
  if (set.substations.empty()) fail(ErrorCode::EmptyHierarchy, "hierarchy has no substations");
  HierarchicalSet out = set;
  const std::string grid_id = set.grid.id().empty() ? "grid" : set.grid.id();
  out.grid = aggregate_bottom_up(set.substations, grid_id);
  for (const auto& s : set.substations) {
    if (!out.membership.contains(s.id())) out.membership[s.id()] = grid_id;
  }
  return out;
}

}  // namespace gridcast
