#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gridcast/time.hpp"

namespace gridcast {

// Contiguous hourly timestamps: start, start+1h, ..., start+(length-1)h.
class HourlyIndex {
 public:
  HourlyIndex() = default;
  HourlyIndex(Hour start, std::size_t length) : start_(start), length_(length) {}

  Hour start() const noexcept { return start_; }
  std::size_t size() const noexcept { return length_; }
  bool empty() const noexcept { return length_ == 0; }
  Hour at(std::size_t i) const noexcept { return start_ + std::chrono::hours(static_cast<long>(i)); }
  // One past the last timestamp.
  Hour end() const noexcept { return at(length_); }
  bool contains(Hour t) const noexcept { return t >= start_ && t < end(); }
  std::size_t offset_of(Hour t) const;
  HourlyIndex slice(std::size_t offset, std::size_t count) const;

  friend bool operator==(const HourlyIndex&, const HourlyIndex&) = default;

 private:
  Hour start_{};
  std::size_t length_ = 0;
};

enum class Quality { ok, provisional, defective, incorrect, missing };

std::string_view to_string(Quality q) noexcept;
Quality parse_quality(std::string_view text);

// Hourly values with a declared unit and per-hour quality flags.
class Series {
 public:
  Series() = default;
  Series(std::string id, HourlyIndex index, std::vector<double> values, std::string unit = "kWh");
  Series(std::string id, HourlyIndex index, std::vector<double> values, std::vector<Quality> quality,
         std::string unit);

  const std::string& id() const noexcept { return id_; }
  const std::string& unit() const noexcept { return unit_; }
  const HourlyIndex& index() const noexcept { return index_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const Quality> quality() const noexcept { return quality_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  std::size_t flagged_count() const;
  Series slice(std::size_t offset, std::size_t count) const;
  Series with_values(std::vector<double> values) const;
  Series with_values(std::vector<double> values, std::vector<Quality> quality) const;
  Series renamed(std::string id) const;

 private:
  std::string id_;
  HourlyIndex index_;
  std::vector<double> values_;
  std::vector<Quality> quality_;
  std::string unit_;
};

// Grid-level series plus its substations. The grid equals the hourly sum of
// the substations only after rebuild_grid.
struct HierarchicalSet {
  Series grid;
  std::vector<Series> substations;
  std::map<std::string, std::string> membership;  // substation id -> grid id
};

struct SplitSpec {
  enum class Mode { fraction, date };
  Mode mode = Mode::fraction;
  double fraction = 0.8;
  Hour boundary{};

  static SplitSpec at_fraction(double f);
  static SplitSpec at_date(Hour boundary);
};

struct HourSpan {
  Hour start{};
  std::size_t length = 0;

  Hour end() const noexcept { return start + std::chrono::hours(static_cast<long>(length)); }
  friend bool operator==(const HourSpan&, const HourSpan&) = default;
};

enum class WindowKind { day, week };

std::string_view to_string(WindowKind kind) noexcept;
std::size_t horizon_hours(WindowKind kind) noexcept;

struct EvalWindow {
  HourSpan input;
  HourSpan target;
  WindowKind kind = WindowKind::day;
};

std::vector<Series> align(std::span<const Series> series);

std::pair<Series, Series> time_split(const Series& series, const SplitSpec& spec);
// Number of leading hours that go to the training side.
std::size_t split_point(const HourlyIndex& index, const SplitSpec& spec);

// Every complete local day (00h-23h) or Monday-Sunday week of `test` whose k
// preceding input hours are available; `history_hours` is how much data
// precedes test.start() (usually the training span).
std::vector<EvalWindow> enumerate_eval_windows(const Series& test, std::size_t k, WindowKind kind,
                                               std::size_t history_hours = 0,
                                               const TimeZone& zone = TimeZone::utc());

Series aggregate_bottom_up(std::span<const Series> substation_forecasts, std::string grid_id = "grid");

HierarchicalSet rebuild_grid(const HierarchicalSet& set);

}  // namespace gridcast
