#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "gridcast/error.hpp"
#include "gridcast/preprocess.hpp"

namespace gridcast {

FeatureMatrix FeatureMatrix::slice_rows(std::size_t begin, std::size_t count) const {
  if (begin + count > rows) fail(ErrorCode::IndexMismatch, "row slice exceeds matrix");
  FeatureMatrix out(count, cols);
  std::copy(data.begin() + long(begin * cols), data.begin() + long((begin + count) * cols), out.data.begin());
  return out;
}

std::vector<double> FeatureMatrix::column(std::size_t c) const {
  std::vector<double> out(rows);
  for (std::size_t r = 0; r < rows; ++r) out[r] = at(r, c);
  return out;
}

const std::vector<std::string>& calendar_column_names() {
  static const std::vector<std::string> names{"hour_sin", "hour_cos", "dow_sin",        "dow_cos",
                                              "doy_sin",  "doy_cos",  "holiday_weekend"};
  return names;
}

FeatureMatrix encode_calendar(const HourlyIndex& index, const TimeZone& zone, const HolidayCalendar& holidays) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  FeatureMatrix out(index.size(), calendar_column_names().size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    const LocalHour local = zone.to_local(index.at(i));
    const Day day = day_of(local);
    if (!holidays.covers(day)) fail(ErrorCode::CalendarGap, "holiday calendar does not cover " + format_day(day));
    const double hour = hour_of_day(local);
    const int dow = day_of_week(day);
    // Leap years: the 366th day reuses day 365's phase.
    const double doy = std::min(day_of_year(day), 365);
    out.at(i, 0) = std::sin(two_pi * hour / 24.0);
    out.at(i, 1) = std::cos(two_pi * hour / 24.0);
    out.at(i, 2) = std::sin(two_pi * dow / 7.0);
    out.at(i, 3) = std::cos(two_pi * dow / 7.0);
    out.at(i, 4) = std::sin(two_pi * (doy - 1.0) / 365.0);
    out.at(i, 5) = std::cos(two_pi * (doy - 1.0) / 365.0);
    out.at(i, 6) = (dow >= 5 || holidays.is_holiday(day)) ? 1.0 : 0.0;
  }
  return out;
}

Normalizer Normalizer::fit(const FeatureMatrix& train) {
  if (train.rows == 0) fail(ErrorCode::InvalidArgument, "cannot fit a normalizer on zero rows");
  std::vector<double> lo(train.cols, std::numeric_limits<double>::infinity());
  std::vector<double> hi(train.cols, -std::numeric_limits<double>::infinity());
  for (std::size_t r = 0; r < train.rows; ++r) {
    for (std::size_t c = 0; c < train.cols; ++c) {
      const double v = train.at(r, c);
      if (!std::isfinite(v)) continue;
      lo[c] = std::min(lo[c], v);
      hi[c] = std::max(hi[c], v);
    }
  }
  for (std::size_t c = 0; c < train.cols; ++c) {
    if (!std::isfinite(lo[c])) lo[c] = hi[c] = 0.0;
  }
  return from_bounds(std::move(lo), std::move(hi));
}

Normalizer Normalizer::from_bounds(std::vector<double> min, std::vector<double> max) {
  if (min.size() != max.size()) fail(ErrorCode::InvalidArgument, "normalizer bound lengths differ");
  Normalizer n;
  n.passthrough_.resize(min.size());
  for (std::size_t c = 0; c < min.size(); ++c) {
    if (max[c] < min[c]) fail(ErrorCode::InvalidArgument, "normalizer max < min");
    n.passthrough_[c] = !(max[c] > min[c]);
  }
  n.min_ = std::move(min);
  n.max_ = std::move(max);
  return n;
}

double Normalizer::apply_value(std::size_t f, double v) const {
  if (passthrough_[f]) return v;
  return (v - min_[f]) / (max_[f] - min_[f]);
}

double Normalizer::invert_value(std::size_t f, double v) const {
  if (passthrough_[f]) return v;
  return v * (max_[f] - min_[f]) + min_[f];
}

FeatureMatrix Normalizer::apply(const FeatureMatrix& x) const {
  if (x.cols != features()) fail(ErrorCode::ShapeMismatch, "normalizer feature count differs from input");
  FeatureMatrix out = x;
  for (std::size_t r = 0; r < x.rows; ++r) {
    for (std::size_t c = 0; c < x.cols; ++c) out.at(r, c) = apply_value(c, x.at(r, c));
  }
  return out;
}

FeatureMatrix Normalizer::invert(const FeatureMatrix& x) const {
  if (x.cols != features()) fail(ErrorCode::ShapeMismatch, "normalizer feature count differs from input");
  FeatureMatrix out = x;
  for (std::size_t r = 0; r < x.rows; ++r) {
    for (std::size_t c = 0; c < x.cols; ++c) out.at(r, c) = invert_value(c, x.at(r, c));
  }
  return out;
}

std::string_view to_string(FeatureHorizon h) noexcept {
  switch (h) {
    case FeatureHorizon::past: return "P";
    case FeatureHorizon::future: return "F";
    case FeatureHorizon::statik: return "S";
  }
  return "P";
}

std::string_view to_string(Level level) noexcept {
  switch (level) {
    case Level::grid: return "grid";
    case Level::substation: return "substation";
    case Level::hierarchical: return "hierarchical";
  }
  return "grid";
}

Level parse_level(std::string_view text) {
  if (text == "grid") return Level::grid;
  if (text == "substation") return Level::substation;
  if (text == "hierarchical") return Level::hierarchical;
  fail(ErrorCode::InvalidArgument, "unknown level '" + std::string(text) + "'");
}

namespace {

std::vector<double> covering_slice(const Series& s, const HourlyIndex& index, const char* what) {
  if (s.size() == 0 || index.empty() || !s.index().contains(index.start()) ||
      !s.index().contains(index.at(index.size() - 1))) {
    fail(ErrorCode::IndexMismatch, std::string(what) + " does not cover the target index");
  }
  const auto off = s.index().offset_of(index.start());
  const auto sl = s.slice(off, index.size());
  return {sl.values().begin(), sl.values().end()};
}

}  // namespace

std::vector<CovariateFrame> assemble_covariates(const HierarchicalSet& set, const Series& temperature,
                                                const std::optional<Series>& incidence,
                                                const HolidayCalendar& calendar, const TimeZone& zone,
                                                Level level) {
  if (set.substations.empty()) fail(ErrorCode::EmptyHierarchy, "hierarchy has no substations");
  const HourlyIndex& index = set.grid.index();
  for (const auto& s : set.substations) {
    if (s.index() != index) fail(ErrorCode::IndexMismatch, "substation '" + s.id() + "' not aligned with grid");
  }
  const auto temp = covering_slice(temperature, index, "temperature");
  std::vector<double> inc;
  if (incidence) inc = covering_slice(*incidence, index, "incidence");
  const FeatureMatrix cal = encode_calendar(index, zone, calendar);

  FeatureSchema schema;
  schema.past.push_back({"consumption", FeatureHorizon::past});
  if (incidence) schema.past.push_back({"incidence", FeatureHorizon::past});
  for (const auto& name : calendar_column_names()) schema.future.push_back({name, FeatureHorizon::future});
  schema.future.push_back({"temperature", FeatureHorizon::future});
  if (level != Level::grid) schema.statics.push_back({"grid_node_id", FeatureHorizon::statik});

  FeatureMatrix future(index.size(), schema.future.size());
  for (std::size_t r = 0; r < index.size(); ++r) {
    for (std::size_t c = 0; c < cal.cols; ++c) future.at(r, c) = cal.at(r, c);
    future.at(r, cal.cols) = temp[r];
  }

  auto make_frame = [&](const Series& target, std::optional<std::size_t> node) {
    CovariateFrame f;
    f.series_id = target.id();
    f.index = index;
    f.schema = schema;
    f.past_known = FeatureMatrix(index.size(), schema.past.size());
    for (std::size_t r = 0; r < index.size(); ++r) {
      f.past_known.at(r, 0) = target[r];
      if (incidence) f.past_known.at(r, 1) = inc[r];
    }
    f.future_known = future;
    if (node) f.static_ids.push_back(*node);
    return f;
  };

  std::vector<CovariateFrame> frames;
  if (level != Level::grid) {
    for (std::size_t s = 0; s < set.substations.size(); ++s) frames.push_back(make_frame(set.substations[s], s));
  } else {
    frames.push_back(make_frame(set.grid, std::nullopt));
  }
  return frames;
}

}  // namespace gridcast
