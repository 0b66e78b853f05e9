#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gridcast/series.hpp"

namespace gridcast {

struct CleaningReport {
  std::size_t removed_count = 0;
  std::vector<std::size_t> removed_positions;
  std::size_t interpolated_count = 0;
  std::vector<std::size_t> interpolated_positions;
  std::vector<std::string> households_dropped;

  bool consistent() const noexcept {
    return removed_count == removed_positions.size() && interpolated_count == interpolated_positions.size();
  }
};

struct LowConsumptionRule {
  double min_mean_kwh = 0.01;
  double min_total_kwh = 100.0;
};

// Drops households whose mean is below 0.01 kWh or whose total is below 100 kWh.
std::pair<std::vector<Series>, CleaningReport> filter_low_consumption(std::span<const Series> households,
                                                                      const LowConsumptionRule& rule = {});

// Reshapes a UTC-indexed series into 24 values per local calendar day of
// `zone`: the repeated autumn hour keeps its first occurrence, the missing
// spring hour is linearly interpolated. The result is indexed on the local
// wall clock (zone-naive). Throws MalformedDay for partial or irregular days.
Series harmonize_dst(const Series& series, const TimeZone& zone);

// Replaces every non-ok position by linear interpolation between the nearest
// ok neighbours; leading/trailing runs take the nearest ok value.
std::pair<Series, CleaningReport> interpolate_flagged(const Series& series);

// Type-7 (linear between order statistics) sample quantile of finite values.
double quantile(std::span<const double> values, double q);

// Lower IQR fence q25 - 1.5 (q75 - q25); values strictly below it are removed
// and linearly interpolated. The fence is one-sided: outages only.
std::pair<Series, CleaningReport> iqr_clean(const Series& series);
double iqr_lower_fence(std::span<const double> values);

class HolidayCalendar {
 public:
  // An empty calendar that covers every date (no holidays anywhere).
  static HolidayCalendar none();
  static HolidayCalendar from_dates(std::vector<Day> holidays, int first_year, int last_year);
  // CSV `date,name`; coverage is the span of years that appear in the file.
  static HolidayCalendar read(const std::filesystem::path& path);

  bool covers(Day d) const;
  bool is_holiday(Day d) const;
  std::size_t size() const noexcept { return days_.size(); }

 private:
  std::set<Day> days_;
  int first_year_ = 0;
  int last_year_ = 0;
  bool unbounded_ = true;
};

// Dense row-major feature matrix.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  FeatureMatrix() = default;
  FeatureMatrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  FeatureMatrix slice_rows(std::size_t begin, std::size_t count) const;
  std::vector<double> column(std::size_t c) const;
};

// Column names produced by encode_calendar, in order.
const std::vector<std::string>& calendar_column_names();

// sin/cos of hour-of-day, day-of-week and day-of-year plus a binary
// holiday-or-weekend flag, evaluated on the local clock of `zone`.
FeatureMatrix encode_calendar(const HourlyIndex& index, const TimeZone& zone, const HolidayCalendar& holidays);

// Per-feature min-max scaling fitted on training rows only.
class Normalizer {
 public:
  static Normalizer fit(const FeatureMatrix& train);
  static Normalizer from_bounds(std::vector<double> min, std::vector<double> max);

  FeatureMatrix apply(const FeatureMatrix& x) const;
  FeatureMatrix invert(const FeatureMatrix& x) const;
  double apply_value(std::size_t feature, double v) const;
  double invert_value(std::size_t feature, double v) const;

  std::size_t features() const noexcept { return min_.size(); }
  const std::vector<double>& min() const noexcept { return min_; }
  const std::vector<double>& max() const noexcept { return max_; }
  // True where the training column was constant and passes through unscaled.
  bool passthrough(std::size_t feature) const { return passthrough_[feature]; }
  static constexpr std::string_view method() noexcept { return "minmax"; }

 private:
  std::vector<double> min_;
  std::vector<double> max_;
  std::vector<bool> passthrough_;
};

enum class FeatureHorizon { past, future, statik };

std::string_view to_string(FeatureHorizon h) noexcept;

struct ColumnDescriptor {
  std::string name;
  FeatureHorizon horizon = FeatureHorizon::past;
  friend bool operator==(const ColumnDescriptor&, const ColumnDescriptor&) = default;
};

struct FeatureSchema {
  std::vector<ColumnDescriptor> past;
  std::vector<ColumnDescriptor> future;
  std::vector<ColumnDescriptor> statics;
  friend bool operator==(const FeatureSchema&, const FeatureSchema&) = default;
};

enum class Level { grid, substation, hierarchical };

std::string_view to_string(Level level) noexcept;
Level parse_level(std::string_view text);

// Past-known, future-known and static covariates of one target series.
struct CovariateFrame {
  std::string series_id;
  HourlyIndex index;
  FeatureMatrix past_known;    // [hours x P]; column 0 is the consumption history
  FeatureMatrix future_known;  // [hours x F]
  std::vector<std::size_t> static_ids;  // categorical static features (grid node id)
  FeatureSchema schema;
};

// One frame per target: the grid series for Level::grid, each substation
// (with its node id as static feature) for Level::substation.
std::vector<CovariateFrame> assemble_covariates(const HierarchicalSet& set, const Series& temperature,
                                                const std::optional<Series>& incidence,
                                                const HolidayCalendar& calendar, const TimeZone& zone,
                                                Level level);

}  // namespace gridcast
