#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gridcast/models/config.hpp"
#include "gridcast/models/trained_model.hpp"
#include "gridcast/models/windows.hpp"
#include "gridcast/nn/layers.hpp"

namespace gridcast {

// Stacked LSTM over the past window of [past-known | future-known] features
// with a dense head emitting all H values from the last hidden state.
class LSTMNetwork {
 public:
  LSTMNetwork(nn::ParameterStore& store, const LSTMConfig& config, std::size_t past_vars, std::size_t future_vars);

  nn::Var forward(const nn::Forward& fw, const Batch& batch) const;  // [H*B x 1], time-major

 private:
  LSTMConfig config_;
  std::size_t past_vars_;
  std::size_t future_vars_;
  nn::StackedLSTM lstm_;
};

TrainedModel train_lstm(const LSTMConfig& config, std::span<const CovariateFrame> frames, const SplitSpec& split,
                        std::uint64_t seed, const TrainOptions& options = {});

std::vector<std::vector<double>> lstm_forecast(const TrainedModel& model, std::span<const ForecastWindow> windows);

}  // namespace gridcast
