#include "gridcast/models/lstm.hpp"

#include "gridcast/error.hpp"

namespace gridcast {

using nn::Var;

LSTMNetwork::LSTMNetwork(nn::ParameterStore& store, const LSTMConfig& config, std::size_t past_vars,
                         std::size_t future_vars)
    : config_(config), past_vars_(past_vars), future_vars_(future_vars) {
  validate(config);
  lstm_ = nn::StackedLSTM(store, "lstm", past_vars + future_vars, config.hidden_size, config.num_layers);
  // [H x (hidden + 1)]: the last column is the bias.
  store.create("head.W", config.horizon, config.hidden_size + 1, config.hidden_size);
}

Var LSTMNetwork::forward(const nn::Forward& fw, const Batch& batch) const {
  const std::size_t B = batch.size, k = batch.k, H = batch.horizon;
  if (H != config_.horizon) fail(ErrorCode::ShapeMismatch, "batch horizon differs from the configured horizon");
  if (batch.past.cols() != past_vars_ || batch.future.cols() != future_vars_) {
    fail(ErrorCode::ShapeMismatch, "batch feature counts differ from the network inputs");
  }
  Var past = fw.tape.constant(batch.past);
  Var future = fw.tape.constant(batch.future);
  std::vector<Var> steps;
  steps.reserve(k);
  for (std::size_t t = 0; t < k; ++t) {
    const Var parts[] = {nn::slice_rows(past, t * B, B), nn::slice_rows(future, t * B, B)};
    steps.push_back(nn::concat_cols(parts));
  }
  std::vector<nn::LSTMCell::State> init;
  for (std::size_t l = 0; l < config_.num_layers; ++l) {
    init.push_back({fw.tape.constant(nn::Tensor(B, config_.hidden_size)),
                    fw.tape.constant(nn::Tensor(B, config_.hidden_size))});
  }
  auto run = lstm_(fw, steps, init);
  const Var last[] = {fw.drop(run.outputs.back()), fw.tape.constant(nn::Tensor(B, 1, 1.0))};
  // [H x B] in row-major order is already time-major.
  return nn::reshape(nn::matmul_nt(fw.param("head.W"), nn::concat_cols(last)), H * B, 1);
}

TrainedModel train_lstm(const LSTMConfig& config, std::span<const CovariateFrame> frames, const SplitSpec& split,
                        std::uint64_t seed, const TrainOptions& options) {
  validate(config);
  PreparedFrames prep = prepare_frames(frames, split);
  TrainedModel model;
  model.config = config;
  model.schema = prep.schema;
  model.series_ids = prep.ids;
  model.normalizers = prep.normalizers;
  model.seed = seed;
  const auto groups = member_groups(prep.data.size(), options.per_series);
  for (std::size_t m = 0; m < groups.size(); ++m) {
    ModelMember member;
    member.params = nn::ParameterStore(derive_seed(seed, 100 + m));
    LSTMNetwork net(member.params, config, prep.schema.past.size(), prep.schema.future.size());
    std::vector<SeriesData> data;
    std::vector<std::size_t> rows;
    for (auto s : groups[m]) {
      data.push_back(prep.data[s]);
      rows.push_back(prep.train_rows[s]);
      member.series_ids.push_back(prep.ids[s]);
    }
    const FitSettings fs(config, 0, derive_seed(seed, 200 + m));
    const auto plan = plan_windows(rows, fs.k, fs.horizon, fs.schedule);
    auto history = fit_network(
        member.params, [&net](const nn::Forward& fw, const Batch& b) { return net.forward(fw, b); }, data, plan, fs);
    for (auto& h : history) {
      h.member = m;
      model.history.push_back(h);
    }
    model.members.push_back(std::move(member));
  }
  return model;
}

std::vector<std::vector<double>> lstm_forecast(const TrainedModel& model, std::span<const ForecastWindow> windows) {
  const auto& config = std::get<LSTMConfig>(model.config);
  std::vector<std::vector<double>> out(windows.size());
  for (const auto& group : group_by_member(model, windows)) {
    nn::ParameterStore scratch;
    LSTMNetwork net(scratch, config, model.schema.past.size(), model.schema.future.size());
    nn::ParameterStore params = group.member->params;
    Batch batch = make_forecast_batch(model, group.windows, config.input_window);
    nn::Tape tape;
    nn::Forward fw{tape, params, false, 0.0, nullptr};
    const nn::Tensor& pred = net.forward(fw, batch).value();
    const std::size_t B = group.windows.size(), H = config.horizon;
    for (std::size_t b = 0; b < B; ++b) {
      const Normalizer& norm = model.normalizer_for(group.windows[b].series_id);
      auto& values = out[group.indices[b]];
      values.resize(H);
      for (std::size_t t = 0; t < H; ++t) values[t] = norm.invert_value(0, pred[t * B + b]);
    }
  }
  return out;
}

}  // namespace gridcast
