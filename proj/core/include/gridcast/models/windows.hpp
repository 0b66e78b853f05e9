#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "gridcast/models/config.hpp"
#include "gridcast/models/trained_model.hpp"
#include "gridcast/nn/layers.hpp"
#include "gridcast/preprocess.hpp"

namespace gridcast {

// Normalized covariates of one series. Column 0 of `past` is the target.
struct SeriesData {
  std::string id;
  FeatureMatrix past;
  FeatureMatrix future;
  std::size_t static_id = 0;
  bool has_static = false;
};

// Fits on the first `train_rows` rows of [past | future].
Normalizer fit_frame_normalizer(const CovariateFrame& frame, std::size_t train_rows);
SeriesData normalize_frame(const CovariateFrame& frame, const Normalizer& norm);

struct WindowRef {
  std::size_t series = 0;
  std::size_t anchor = 0;  // first target row
};

struct WindowPlan {
  std::vector<WindowRef> train;
  std::vector<WindowRef> validation;
};

// Training windows end before the validation tail of each series' training
// rows; validation windows have their targets inside that tail.
WindowPlan plan_windows(std::span<const std::size_t> train_rows, std::size_t k, std::size_t horizon,
                        const TrainingSchedule& schedule);

// Time-major batch: row t * size + b holds step t of sample b.
struct Batch {
  std::size_t size = 0;
  std::size_t k = 0;
  std::size_t horizon = 0;
  nn::Tensor past;    // [k*B x P]
  nn::Tensor future;  // [(k+H)*B x F]
  nn::Tensor target;  // [H*B x 1], empty for forecasting
  nn::Tensor statics; // [B x cardinality] one-hot, empty without statics
};

Batch make_batch(std::span<const SeriesData> data, std::span<const WindowRef> refs, std::size_t k, std::size_t horizon,
                 std::size_t static_cardinality);
// Normalizes raw forecast windows (the last k past rows are used).
Batch make_forecast_batch(const TrainedModel& model, std::span<const ForecastWindow> windows, std::size_t k);

// Predicts [H*B x 1] normalized targets for a batch.
using Predictor = std::function<nn::Var(const nn::Forward&, const Batch&)>;

struct FitSettings {
  FitSettings() = default;
  FitSettings(const TFTConfig& config, std::size_t static_cardinality, std::uint64_t seed);
  FitSettings(const LSTMConfig& config, std::size_t static_cardinality, std::uint64_t seed);

  std::size_t k = 0;
  std::size_t horizon = 0;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  double dropout = 0.0;
  std::size_t static_cardinality = 0;
  TrainingSchedule schedule;
  std::uint64_t seed = 0;
};

// Mini-batch Adam on MSE with early stopping; restores the parameters of
// the best validation epoch. Throws NonFiniteLoss on a NaN/Inf loss.
std::vector<EpochRecord> fit_network(nn::ParameterStore& store, const Predictor& predict,
                                     std::span<const SeriesData> data, const WindowPlan& plan,
                                     const FitSettings& settings);

// Mean MSE of the predictor over `refs` (evaluation mode).
double mean_loss(nn::ParameterStore& store, const Predictor& predict, std::span<const SeriesData> data,
                 std::span<const WindowRef> refs, const FitSettings& settings);

// Normalized training inputs of a set of frames sharing one schema.
struct PreparedFrames {
  FeatureSchema schema;
  std::vector<std::size_t> train_rows;
  std::vector<SeriesData> data;
  std::map<std::string, Normalizer> normalizers;
  std::vector<std::string> ids;
  std::size_t static_cardinality = 0;
};

// Fits one normalizer per frame on its training rows (per `split`).
PreparedFrames prepare_frames(std::span<const CovariateFrame> frames, const SplitSpec& split);

// Series index lists per trained member: one list, or one per series.
std::vector<std::vector<std::size_t>> member_groups(std::size_t series, bool per_series);

struct MemberGroup {
  const ModelMember* member = nullptr;
  std::vector<std::size_t> indices;
  std::vector<ForecastWindow> windows;
};

// Partitions forecast windows by the member responsible for their series.
std::vector<MemberGroup> group_by_member(const TrainedModel& model, std::span<const ForecastWindow> windows);

// Mixes a base seed with an index into an independent stream seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

}  // namespace gridcast
