#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

namespace gridcast {

enum class ModelKind { tft, lstm, arima, naive };

std::string_view to_string(ModelKind kind) noexcept;
ModelKind parse_model_kind(std::string_view text);

// Shared by the two neural forecasters.
struct TrainingSchedule {
  std::size_t max_epochs = 100;
  std::size_t patience = 10;
  // Fraction of the training span (its tail) held out for early stopping.
  double validation_fraction = 0.1;
  // Hours between consecutive training window anchors.
  std::size_t window_stride = 1;
  // Global gradient-norm bound; 0 disables clipping.
  double clip_norm = 0.0;
};

struct TFTConfig {
  std::size_t attention_heads = 1;
  std::size_t hidden_size = 64;
  std::size_t lstm_layers = 2;
  std::size_t input_window = 24;
  double dropout = 0.1;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  std::size_t horizon = 24;
  TrainingSchedule schedule;
};

struct LSTMConfig {
  std::size_t hidden_size = 64;
  std::size_t num_layers = 2;
  std::size_t input_window = 48;
  double dropout = 0.2;
  std::size_t batch_size = 10;
  double learning_rate = 0.01;
  std::size_t horizon = 24;
  TrainingSchedule schedule;
};

struct ArimaConfig {
  std::size_t p = 2;
  std::size_t d = 1;
  std::size_t q = 2;
  std::size_t max_iterations = 200;
  double tolerance = 1e-9;
  // Observations used to rebuild residuals before each forecast.
  std::size_t history = 24 * 28;
  std::size_t horizon = 24;
};

struct NaiveConfig {
  std::size_t season = 168;
  std::size_t horizon = 24;
};

using ModelConfig = std::variant<TFTConfig, LSTMConfig, ArimaConfig, NaiveConfig>;

ModelKind kind_of(const ModelConfig& config) noexcept;
std::size_t horizon_of(const ModelConfig& config) noexcept;
// Past hours a forecast needs (k for neural models).
std::size_t input_window_of(const ModelConfig& config) noexcept;
ModelConfig with_horizon(ModelConfig config, std::size_t horizon);

// Throws ConfigError whose message lists every offending field.
void validate(const TFTConfig& config);
void validate(const LSTMConfig& config);
void validate(const ArimaConfig& config);
void validate(const NaiveConfig& config);
void validate(const ModelConfig& config);

// JSON text with a schema_version field. Parsing rejects unknown keys and
// fills absent keys from the defaults of `kind`.
inline constexpr int kConfigSchemaVersion = 1;
std::string to_json(const ModelConfig& config);
ModelConfig parse_model_config(ModelKind kind, std::string_view json_text);
ModelConfig default_config(ModelKind kind);

}  // namespace gridcast
