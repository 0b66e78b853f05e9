#include <cmath>
#include <numbers>
#include <random>

#include "gridcast/error.hpp"
#include "gridcast/ingest.hpp"

namespace gridcast {

void SyntheticConfig::validate() const {
  if (n_substations < 1) fail(ErrorCode::InvalidArgument, "n_substations must be >= 1");
  if (n_days < 1) fail(ErrorCode::InvalidArgument, "n_days must be >= 1");
  if (!(noise_std >= 0.0)) fail(ErrorCode::InvalidArgument, "noise_std must be >= 0");
  if (!(weather_std >= 0.0)) fail(ErrorCode::InvalidArgument, "weather_std must be >= 0");
}

SyntheticDataset generate_synthetic(const SyntheticConfig& config) {
  config.validate();
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const std::size_t n = config.n_days * 24;
  const HourlyIndex index(Hour{config.start}, n);

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  struct Profile {
    double base, daily_scale, daily_phase, weekly_scale, weekly_phase, temp_scale;
  };
  std::vector<Profile> profiles(config.n_substations);
  for (auto& p : profiles) {
    p.base = 100.0 + 100.0 * unit(rng);
    p.daily_scale = 0.5 + unit(rng);
    p.daily_phase = unit(rng) - 0.5;
    p.weekly_scale = 0.5 + unit(rng);
    p.weekly_phase = unit(rng) - 0.5;
    p.temp_scale = 0.2 + 1.6 * unit(rng);
  }

  // Annual cycle (coldest mid-January) + daily cycle (warmest mid-afternoon)
  // + an AR(1) anomaly with stationary standard deviation weather_std.
  constexpr double persistence = 0.98;
  const double innovation = config.weather_std * std::sqrt(1.0 - persistence * persistence);
  std::vector<double> temperature(n);
  double anomaly = config.weather_std * gauss(rng);
  for (std::size_t t = 0; t < n; ++t) {
    const LocalHour local = TimeZone::utc().to_local(index.at(t));
    const double doy = day_of_year(day_of(local));
    const double hod = hour_of_day(local);
    if (t > 0) anomaly = persistence * anomaly + innovation * gauss(rng);
    temperature[t] = 10.0 + 10.0 * std::sin(two_pi * (doy - 105.0) / 365.0) +
                     4.0 * std::sin(two_pi * (hod - 9.0) / 24.0) + anomaly;
  }

  HierarchicalSet set;
  for (std::size_t s = 0; s < config.n_substations; ++s) {
    const Profile& p = profiles[s];
    std::vector<double> values(n);
    for (std::size_t t = 0; t < n; ++t) {
      const double th = double(t);
      const double daily = config.daily_amplitude * p.daily_scale *
                           std::sin(two_pi * (th - 8.0) / 24.0 + p.daily_phase);
      const double weekly = config.weekly_amplitude * p.weekly_scale *
                            std::sin(two_pi * th / 168.0 + p.weekly_phase);
      const double thermal =
          config.temp_sensitivity * p.temp_scale * (kSyntheticReferenceTemperature - temperature[t]);
      const double noise = config.noise_std > 0.0 ? config.noise_std * gauss(rng) : 0.0;
      values[t] = p.base + daily + weekly + thermal + noise;
    }
    const std::string id = (s + 1 < 10 ? "S0" : "S") + std::to_string(s + 1);
    set.substations.emplace_back(id, index, std::move(values), "kWh");
    set.membership[id] = "grid";
  }
  set.grid = Series("grid", index, std::vector<double>(n), "kWh");
  set = rebuild_grid(set);
  return {std::move(set), Series("temperature", index, std::move(temperature), "degC")};
}

}  // namespace gridcast
