#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gridcast/models/config.hpp"
#include "gridcast/models/trained_model.hpp"
#include "gridcast/models/windows.hpp"
#include "gridcast/nn/layers.hpp"

namespace gridcast {

// Temporal fusion network: per-variable embeddings, one variable selection
// network per input type (past-known, future-known, static), LSTM
// encoder/decoder, static enrichment, causal interpretable attention and a
// per-step output projection.
class TFTNetwork {
 public:
  TFTNetwork(nn::ParameterStore& store, const TFTConfig& config, std::size_t past_vars, std::size_t future_vars,
             std::size_t static_cardinality);

  struct Output {
    nn::Var prediction;     // [H*B x 1], time-major
    nn::Var past_weights;   // [k*B x P]
    nn::Var future_weights; // [(k+H)*B x F]
    nn::Var static_weights; // [B x 1] when statics exist
    std::vector<nn::Tensor> attention;  // per sample, [H x (k+H)]
  };
  Output forward(const nn::Forward& fw, const Batch& batch) const;

 private:
  std::vector<nn::Var> embed(const nn::Forward& fw, const nn::Tensor& x, const std::string& group) const;

  TFTConfig config_;
  std::size_t past_vars_;
  std::size_t future_vars_;
  std::size_t static_cardinality_;
  std::vector<nn::Dense> past_embed_;
  std::vector<nn::Dense> future_embed_;
  nn::VariableSelectionNetwork static_vsn_;
  nn::GatedResidualNetwork ctx_select_;
  nn::GatedResidualNetwork ctx_enrich_;
  nn::GatedResidualNetwork ctx_h_;
  nn::GatedResidualNetwork ctx_c_;
  nn::VariableSelectionNetwork past_vsn_;
  nn::VariableSelectionNetwork future_vsn_;
  nn::StackedLSTM encoder_;
  nn::StackedLSTM decoder_;
  nn::GateAddNorm post_lstm_;
  nn::GatedResidualNetwork enrichment_;
  nn::InterpretableAttention attention_;
  nn::GateAddNorm post_attention_;
  nn::GatedResidualNetwork positionwise_;
  nn::GateAddNorm pre_output_;
  nn::Dense output_;
};

TrainedModel train_tft(const TFTConfig& config, std::span<const CovariateFrame> frames, const SplitSpec& split,
                       std::uint64_t seed, const TrainOptions& options = {});

std::vector<std::vector<double>> tft_forecast(const TrainedModel& model, std::span<const ForecastWindow> windows);

struct NamedWeight {
  std::string name;
  double weight = 0.0;
};

// Mean selection weights per input type (each group sums to 1) and the mean
// attention mass each past position receives from the decoder queries.
struct VariableImportance {
  std::vector<NamedWeight> past;
  std::vector<NamedWeight> future;
  std::vector<NamedWeight> statics;
  std::vector<double> past_attention;  // index 0 = oldest past hour
};

VariableImportance tft_variable_importance(const TrainedModel& model, std::span<const ForecastWindow> windows);

}  // namespace gridcast
