#include "gridcast/models/tft.hpp"

#include <algorithm>
#include <map>

#include "gridcast/error.hpp"

namespace gridcast {

using nn::Var;

TFTNetwork::TFTNetwork(nn::ParameterStore& store, const TFTConfig& config, std::size_t past_vars,
                       std::size_t future_vars, std::size_t static_cardinality)
    : config_(config), past_vars_(past_vars), future_vars_(future_vars), static_cardinality_(static_cardinality) {
  validate(config);
  if (past_vars == 0 || future_vars == 0) fail(ErrorCode::EmptyVariableList, "network needs past and future inputs");
  const std::size_t d = config.hidden_size;
  for (std::size_t v = 0; v < past_vars; ++v) past_embed_.emplace_back(store, "embed.past" + std::to_string(v), 1, d);
  for (std::size_t v = 0; v < future_vars; ++v) {
    future_embed_.emplace_back(store, "embed.future" + std::to_string(v), 1, d);
  }
  const std::size_t ctx = static_cardinality > 0 ? d : 0;
  if (static_cardinality > 0) {
    store.create("embed.static", static_cardinality, d, 1);
    static_vsn_ = nn::VariableSelectionNetwork(store, "vsn.static", 1, d);
    ctx_select_ = nn::GatedResidualNetwork(store, "ctx.select", d, d, d);
    ctx_enrich_ = nn::GatedResidualNetwork(store, "ctx.enrich", d, d, d);
    ctx_h_ = nn::GatedResidualNetwork(store, "ctx.h", d, d, d);
    ctx_c_ = nn::GatedResidualNetwork(store, "ctx.c", d, d, d);
  }
  past_vsn_ = nn::VariableSelectionNetwork(store, "vsn.past", past_vars, d, ctx);
  future_vsn_ = nn::VariableSelectionNetwork(store, "vsn.future", future_vars, d, ctx);
  encoder_ = nn::StackedLSTM(store, "encoder", d, d, config.lstm_layers);
  decoder_ = nn::StackedLSTM(store, "decoder", d, d, config.lstm_layers);
  post_lstm_ = nn::GateAddNorm(store, "post_lstm", d, d);
  enrichment_ = nn::GatedResidualNetwork(store, "enrichment", d, d, d, ctx);
  attention_ = nn::InterpretableAttention(store, "attention", d, config.attention_heads);
  post_attention_ = nn::GateAddNorm(store, "post_attention", d, d);
  positionwise_ = nn::GatedResidualNetwork(store, "positionwise", d, d, d);
  pre_output_ = nn::GateAddNorm(store, "pre_output", d, d);
  output_ = nn::Dense(store, "output", d, 1);
}

std::vector<Var> TFTNetwork::embed(const nn::Forward& fw, const nn::Tensor& x, const std::string& group) const {
  const auto& layers = group == "past" ? past_embed_ : future_embed_;
  if (x.cols() != layers.size()) {
    fail(ErrorCode::ShapeMismatch, group + " inputs have " + std::to_string(x.cols()) + " columns, network expects " +
                                       std::to_string(layers.size()));
  }
  Var all = fw.tape.constant(x);
  std::vector<Var> out;
  out.reserve(layers.size());
  for (std::size_t v = 0; v < layers.size(); ++v) out.push_back(layers[v](fw, nn::slice_cols(all, v, 1)));
  return out;
}

TFTNetwork::Output TFTNetwork::forward(const nn::Forward& fw, const Batch& batch) const {
  const std::size_t B = batch.size, k = batch.k, H = batch.horizon, T = k + H, d = config_.hidden_size;
  if (k == 0 || H == 0 || B == 0) fail(ErrorCode::WindowTooShort, "empty batch dimensions");
  if (batch.past.rows() != k * B || batch.future.rows() != T * B) {
    fail(ErrorCode::ShapeMismatch, "batch tensors do not match k, H and batch size");
  }
  Output out;
  Var c_select, c_enrich, c_h, c_c;
  if (static_cardinality_ > 0) {
    if (batch.statics.rows() != B || batch.statics.cols() != static_cardinality_) {
      fail(ErrorCode::SchemaMismatch, "batch lacks static node ids");
    }
    Var emb = nn::matmul(fw.tape.constant(batch.statics), fw.param("embed.static"));
    auto sel = static_vsn_(fw, {emb});
    out.static_weights = sel.weights;
    c_select = ctx_select_(fw, sel.combined).output;
    c_enrich = ctx_enrich_(fw, sel.combined).output;
    c_h = ctx_h_(fw, sel.combined).output;
    c_c = ctx_c_(fw, sel.combined).output;
  }
  auto tiled = [](Var v, std::size_t times) { return v.valid() ? nn::tile_rows(v, times) : Var{}; };

  auto past = past_vsn_(fw, embed(fw, batch.past, "past"), tiled(c_select, k));
  auto future = future_vsn_(fw, embed(fw, batch.future, "future"), tiled(c_select, T));
  out.past_weights = past.weights;
  out.future_weights = future.weights;

  Var enc_in = nn::add(past.combined, nn::slice_rows(future.combined, 0, k * B));
  Var dec_in = nn::slice_rows(future.combined, k * B, H * B);

  std::vector<nn::LSTMCell::State> init;
  for (std::size_t l = 0; l < config_.lstm_layers; ++l) {
    if (c_h.valid()) {
      init.push_back({c_h, c_c});
    } else {
      init.push_back({fw.tape.constant(nn::Tensor(B, d)), fw.tape.constant(nn::Tensor(B, d))});
    }
  }
  std::vector<Var> enc_steps, dec_steps;
  for (std::size_t t = 0; t < k; ++t) enc_steps.push_back(nn::slice_rows(enc_in, t * B, B));
  for (std::size_t t = 0; t < H; ++t) dec_steps.push_back(nn::slice_rows(dec_in, t * B, B));
  auto enc = encoder_(fw, enc_steps, init);
  auto dec = decoder_(fw, dec_steps, enc.finals);
  std::vector<Var> steps = enc.outputs;
  steps.insert(steps.end(), dec.outputs.begin(), dec.outputs.end());
  Var lstm_out = nn::concat_rows(steps);
  const Var inputs[] = {enc_in, dec_in};
  Var temporal = post_lstm_(fw, lstm_out, nn::concat_rows(inputs)).output;
  Var enriched = enrichment_(fw, temporal, tiled(c_enrich, T)).output;

  const auto mask = nn::causal_mask(H, T, k);
  std::vector<Var> per_sample;
  per_sample.reserve(B);
  std::vector<std::size_t> rows(T);
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t t = 0; t < T; ++t) rows[t] = t * B + b;
    Var seq = nn::gather_rows(enriched, rows);
    auto att = attention_(fw, nn::slice_rows(seq, k, H), seq, seq, mask);
    per_sample.push_back(att.output);
    out.attention.push_back(std::move(att.weights));
  }
  // sample-major (b*H + j) back to time-major (j*B + b)
  std::vector<std::size_t> perm(H * B);
  for (std::size_t j = 0; j < H; ++j) {
    for (std::size_t b = 0; b < B; ++b) perm[j * B + b] = b * H + j;
  }
  Var attended = nn::gather_rows(nn::concat_rows(per_sample), perm);
  Var post = post_attention_(fw, attended, nn::slice_rows(enriched, k * B, H * B)).output;
  Var wide = positionwise_(fw, post).output;
  Var fused = pre_output_(fw, wide, nn::slice_rows(temporal, k * B, H * B)).output;
  out.prediction = output_(fw, fused);
  return out;
}

TrainedModel train_tft(const TFTConfig& config, std::span<const CovariateFrame> frames, const SplitSpec& split,
                       std::uint64_t seed, const TrainOptions& options) {
  validate(config);
  PreparedFrames prep = prepare_frames(frames, split);
  TrainedModel model;
  model.config = config;
  model.schema = prep.schema;
  model.series_ids = prep.ids;
  model.static_cardinality = prep.static_cardinality;
  model.normalizers = prep.normalizers;
  model.seed = seed;

  const auto groups = member_groups(prep.data.size(), options.per_series);
  for (std::size_t m = 0; m < groups.size(); ++m) {
    ModelMember member;
    member.params = nn::ParameterStore(derive_seed(seed, 100 + m));
    TFTNetwork net(member.params, config, prep.schema.past.size(), prep.schema.future.size(),
                   prep.static_cardinality);
    std::vector<SeriesData> data;
    std::vector<std::size_t> rows;
    for (auto s : groups[m]) {
      data.push_back(prep.data[s]);
      rows.push_back(prep.train_rows[s]);
      member.series_ids.push_back(prep.ids[s]);
    }
    const FitSettings fs(config, prep.static_cardinality, derive_seed(seed, 200 + m));
    const auto plan = plan_windows(rows, fs.k, fs.horizon, fs.schedule);
    auto history = fit_network(
        member.params, [&net](const nn::Forward& fw, const Batch& b) { return net.forward(fw, b).prediction; }, data,
        plan, fs);
    for (auto& h : history) {
      h.member = m;
      model.history.push_back(h);
    }
    model.members.push_back(std::move(member));
  }
  return model;
}

std::vector<std::vector<double>> tft_forecast(const TrainedModel& model, std::span<const ForecastWindow> windows) {
  const auto& config = std::get<TFTConfig>(model.config);
  std::vector<std::vector<double>> out(windows.size());
  for (const auto& [member_ptr, idx, subset] : group_by_member(model, windows)) {
    const ModelMember& member = *member_ptr;
    nn::ParameterStore scratch;
    TFTNetwork net(scratch, config, model.schema.past.size(), model.schema.future.size(), model.static_cardinality);
    nn::ParameterStore params = member.params;
    Batch batch = make_forecast_batch(model, subset, config.input_window);
    nn::Tape tape;
    nn::Forward fw{tape, params, false, 0.0, nullptr};
    const nn::Tensor& pred = net.forward(fw, batch).prediction.value();
    const std::size_t B = subset.size(), H = config.horizon;
    for (std::size_t b = 0; b < B; ++b) {
      const Normalizer& norm = model.normalizer_for(subset[b].series_id);
      auto& values = out[idx[b]];
      values.resize(H);
      for (std::size_t t = 0; t < H; ++t) values[t] = norm.invert_value(0, pred[t * B + b]);
    }
  }
  return out;
}

VariableImportance tft_variable_importance(const TrainedModel& model, std::span<const ForecastWindow> windows) {
  const auto& config = std::get<TFTConfig>(model.config);
  const std::size_t P = model.schema.past.size(), F = model.schema.future.size(), k = config.input_window;
  VariableImportance vi;
  for (const auto& c : model.schema.past) vi.past.push_back({c.name, 0.0});
  for (const auto& c : model.schema.future) vi.future.push_back({c.name, 0.0});
  for (const auto& c : model.schema.statics) vi.statics.push_back({c.name, 0.0});
  vi.past_attention.assign(k, 0.0);
  std::size_t past_rows = 0, future_rows = 0, static_rows = 0, samples = 0;
  for (const auto& [member_ptr, idx, subset] : group_by_member(model, windows)) {
    const ModelMember& member = *member_ptr;
    nn::ParameterStore scratch;
    TFTNetwork net(scratch, config, P, F, model.static_cardinality);
    nn::ParameterStore params = member.params;
    Batch batch = make_forecast_batch(model, subset, k);
    nn::Tape tape;
    nn::Forward fw{tape, params, false, 0.0, nullptr};
    auto o = net.forward(fw, batch);
    auto accumulate = [](std::vector<NamedWeight>& dst, const nn::Tensor& w, std::size_t& rows) {
      for (std::size_t r = 0; r < w.rows(); ++r) {
        for (std::size_t c = 0; c < w.cols(); ++c) dst[c].weight += w(r, c);
      }
      rows += w.rows();
    };
    accumulate(vi.past, o.past_weights.value(), past_rows);
    accumulate(vi.future, o.future_weights.value(), future_rows);
    if (o.static_weights.valid() && !vi.statics.empty()) accumulate(vi.statics, o.static_weights.value(), static_rows);
    for (const auto& a : o.attention) {
      for (std::size_t q = 0; q < a.rows(); ++q) {
        for (std::size_t c = 0; c < k; ++c) vi.past_attention[c] += a(q, c) / double(a.rows());
      }
      ++samples;
    }
  }
  auto finish = [](std::vector<NamedWeight>& v, std::size_t rows) {
    for (auto& w : v) w.weight = rows ? w.weight / double(rows) : 0.0;
  };
  finish(vi.past, past_rows);
  finish(vi.future, future_rows);
  finish(vi.statics, static_rows);
  for (auto& a : vi.past_attention) a = samples ? a / double(samples) : 0.0;
  return vi;
}

}  // namespace gridcast
