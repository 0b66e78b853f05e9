#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gridcast/series.hpp"

namespace gridcast {

// Non-fatal reader diagnostics, one human-readable line each.
using Warnings = std::vector<std::string>;

struct GefcLoadRow {
  int zone_id = 1;
  int year = 2004;
  unsigned month = 1;
  unsigned day = 1;
  std::array<double, 24> hours{};
  std::array<bool, 24> present{};  // false for empty cells
};

struct GefcReadOptions {
  // Zone 9 is a single industrial customer, not a substation; zone 4 stays.
  std::vector<int> excluded_zones{9};
  std::optional<int> first_year;
  std::optional<int> last_year;
};

// GEFC'12 wide load file -> one substation series per zone ("zone_<id>"),
// grid rebuilt as their sum. Empty cells become `missing`-flagged NaNs.
HierarchicalSet read_gefc_load(const std::filesystem::path& path, const GefcReadOptions& options = {},
                               Warnings* warnings = nullptr);

// GEFC'12 wide temperature file -> per-hour mean over all stations.
Series read_gefc_temperature(const std::filesystem::path& path, const GefcReadOptions& options = {},
                             Warnings* warnings = nullptr);

// Long CSV `household_id,timestamp,value_kwh,quality`, one series per household
// in order of first appearance.
std::vector<Series> read_household_long(const std::filesystem::path& path);

// Daily `date,incidence` CSV expanded to hourly values; gap days are
// forward-filled from the previous day.
Series read_incidence(const std::filesystem::path& path, Warnings* warnings = nullptr);

void write_gefc_load(const std::filesystem::path& path, std::span<const Series> substations);
void write_gefc_temperature(const std::filesystem::path& path, const Series& temperature, int station_id = 1);
void write_household_long(const std::filesystem::path& path, std::span<const Series> households);
void write_incidence(const std::filesystem::path& path, const Series& hourly_incidence);

// GEFC zone number encoded in a substation id ("zone_4" -> 4), or nullopt.
std::optional<int> gefc_zone_of(const std::string& series_id);

struct SyntheticConfig {
  std::size_t n_substations = 8;
  std::size_t n_days = 90;
  double daily_amplitude = 15.0;
  double weekly_amplitude = 8.0;
  double temp_sensitivity = 1.0;
  double noise_std = 2.0;
  // Standard deviation of the slowly varying weather anomaly added on top of
  // the annual and daily temperature cycles. Zero gives pure sinusoids.
  double weather_std = 3.0;
  std::uint64_t seed = 7;
  Day start = make_day(2021, 1, 4);  // a Monday

  void validate() const;
};

struct SyntheticDataset {
  HierarchicalSet hierarchy;
  Series temperature;
};

// Substation s: base_s + daily + weekly sinusoids + temp_sensitivity_s * (T_ref - T)
// + Gaussian noise; all per-substation draws come from `seed`.
SyntheticDataset generate_synthetic(const SyntheticConfig& config);

inline constexpr double kSyntheticReferenceTemperature = 15.0;

}  // namespace gridcast
