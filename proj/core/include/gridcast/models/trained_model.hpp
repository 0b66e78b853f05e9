#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gridcast/models/config.hpp"
#include "gridcast/nn/params.hpp"
#include "gridcast/preprocess.hpp"
#include "gridcast/series.hpp"

namespace gridcast {

struct EpochRecord {
  std::size_t member = 0;
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double validation_loss = 0.0;
};

struct ArimaCoefficients {
  double constant = 0.0;
  std::vector<double> ar;
  std::vector<double> ma;
  double sigma2 = 0.0;
  std::size_t iterations = 0;
};

// One independently fitted unit: a global network over several series, a
// per-series network, or one ARIMA fit.
struct ModelMember {
  std::vector<std::string> series_ids;
  nn::ParameterStore params;
  std::optional<ArimaCoefficients> arima;
};

struct TrainedModel {
  ModelConfig config;
  FeatureSchema schema;
  std::vector<std::string> series_ids;
  // Number of distinct static node ids seen in training (0 without statics).
  std::size_t static_cardinality = 0;
  std::map<std::string, Normalizer> normalizers;
  std::vector<ModelMember> members;
  std::vector<EpochRecord> history;
  std::uint64_t seed = 0;

  ModelKind kind() const noexcept { return kind_of(config); }
  std::size_t horizon() const noexcept { return horizon_of(config); }
  // Throws SchemaMismatch for a series the model was not trained on.
  const ModelMember& member_for(const std::string& series_id) const;
  const Normalizer& normalizer_for(const std::string& series_id) const;
};

// The inputs of one forecast: `past` holds the hours before `start`, and
// `future` the same hours followed by the horizon. Values are raw units.
struct ForecastWindow {
  std::string series_id;
  Hour start{};
  FeatureMatrix past;
  FeatureMatrix future;
  std::vector<std::size_t> static_ids;
  FeatureSchema schema;
};

// Hours of history the model needs before a forecast start.
std::size_t required_history(const TrainedModel& model);

// Cuts the window whose first forecast hour is frame row `anchor`. Throws
// WindowTooShort when the frame lacks the needed history or horizon rows.
ForecastWindow cut_window(const CovariateFrame& frame, std::size_t anchor, std::size_t history, std::size_t horizon);

// One forecast of model.horizon() values per window, in original units.
std::vector<std::vector<double>> forecast(const TrainedModel& model, std::span<const ForecastWindow> windows);
std::vector<double> forecast(const TrainedModel& model, const ForecastWindow& window);
Series forecast_series(const TrainedModel& model, const ForecastWindow& window);

// Trains the configured model kind. With per_series, neural models train
// one network per frame instead of one global network.
struct TrainOptions {
  bool per_series = false;
};
TrainedModel train_model(const ModelConfig& config, std::span<const CovariateFrame> frames, const SplitSpec& split,
                         std::uint64_t seed, const TrainOptions& options = {});

// Binary tensor container next to a JSON sidecar (config, schema,
// normalizer constants, seed, history). Loading verifies the config hash.
void save_model(const TrainedModel& model, const std::filesystem::path& checkpoint);
TrainedModel load_model(const std::filesystem::path& checkpoint);
std::filesystem::path sidecar_path(const std::filesystem::path& checkpoint);

// Throws SchemaMismatch naming the first differing column.
void require_schema(const FeatureSchema& expected, const FeatureSchema& actual);

}  // namespace gridcast
