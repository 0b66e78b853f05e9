#include "gridcast/models/windows.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "gridcast/error.hpp"

namespace gridcast {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  // splitmix64 finalizer over the combined state
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

FeatureMatrix joined(const CovariateFrame& frame, std::size_t rows) {
  const std::size_t p = frame.past_known.cols, f = frame.future_known.cols;
  FeatureMatrix m(rows, p + f);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < p; ++c) m.at(r, c) = frame.past_known.at(r, c);
    for (std::size_t c = 0; c < f; ++c) m.at(r, p + c) = frame.future_known.at(r, c);
  }
  return m;
}

}  // namespace

Normalizer fit_frame_normalizer(const CovariateFrame& frame, std::size_t train_rows) {
  if (train_rows == 0 || train_rows > frame.past_known.rows) {
    fail(ErrorCode::InvalidArgument, "normalizer training rows out of range for '" + frame.series_id + "'");
  }
  return Normalizer::fit(joined(frame, train_rows));
}

SeriesData normalize_frame(const CovariateFrame& frame, const Normalizer& norm) {
  const std::size_t p = frame.past_known.cols, f = frame.future_known.cols;
  if (norm.features() != p + f) fail(ErrorCode::SchemaMismatch, "normalizer width differs from frame");
  SeriesData d;
  d.id = frame.series_id;
  d.past = FeatureMatrix(frame.past_known.rows, p);
  d.future = FeatureMatrix(frame.future_known.rows, f);
  for (std::size_t r = 0; r < d.past.rows; ++r) {
    for (std::size_t c = 0; c < p; ++c) d.past.at(r, c) = norm.apply_value(c, frame.past_known.at(r, c));
    for (std::size_t c = 0; c < f; ++c) d.future.at(r, c) = norm.apply_value(p + c, frame.future_known.at(r, c));
  }
  d.has_static = !frame.static_ids.empty();
  if (d.has_static) d.static_id = frame.static_ids.front();
  return d;
}

WindowPlan plan_windows(std::span<const std::size_t> train_rows, std::size_t k, std::size_t horizon,
                        const TrainingSchedule& schedule) {
  WindowPlan plan;
  const std::size_t stride = std::max<std::size_t>(schedule.window_stride, 1);
  for (std::size_t s = 0; s < train_rows.size(); ++s) {
    const std::size_t n = train_rows[s];
    const auto tail = static_cast<std::size_t>(std::floor(schedule.validation_fraction * double(n)));
    const std::size_t val_start = n - tail;
    for (std::size_t a = k; a + horizon <= val_start; a += stride) plan.train.push_back({s, a});
    for (std::size_t a = std::max(val_start, k); a + horizon <= n; a += stride) plan.validation.push_back({s, a});
  }
  if (plan.train.empty()) {
    fail(ErrorCode::SeriesTooShort, "training span holds no window of " + std::to_string(k) + "+" +
                                        std::to_string(horizon) + " hours before its validation tail");
  }
  if (plan.validation.empty()) {
    fail(ErrorCode::SeriesTooShort, "validation tail shorter than the " + std::to_string(horizon) + "-hour horizon");
  }
  return plan;
}

Batch make_batch(std::span<const SeriesData> data, std::span<const WindowRef> refs, std::size_t k, std::size_t horizon,
                 std::size_t static_cardinality) {
  if (refs.empty()) fail(ErrorCode::InvalidArgument, "empty batch");
  const std::size_t B = refs.size();
  const std::size_t P = data[refs[0].series].past.cols;
  const std::size_t F = data[refs[0].series].future.cols;
  Batch batch;
  batch.size = B;
  batch.k = k;
  batch.horizon = horizon;
  batch.past = nn::Tensor(k * B, P);
  batch.future = nn::Tensor((k + horizon) * B, F);
  batch.target = nn::Tensor(horizon * B, 1);
  if (static_cardinality > 0) batch.statics = nn::Tensor(B, static_cardinality);
  for (std::size_t b = 0; b < B; ++b) {
    const auto& d = data[refs[b].series];
    const std::size_t a = refs[b].anchor;
    if (a < k || a + horizon > d.past.rows) fail(ErrorCode::WindowTooShort, "window outside series '" + d.id + "'");
    for (std::size_t t = 0; t < k; ++t) {
      for (std::size_t c = 0; c < P; ++c) batch.past((t * B + b), c) = d.past.at(a - k + t, c);
    }
    for (std::size_t t = 0; t < k + horizon; ++t) {
      for (std::size_t c = 0; c < F; ++c) batch.future((t * B + b), c) = d.future.at(a - k + t, c);
    }
    for (std::size_t t = 0; t < horizon; ++t) batch.target[t * B + b] = d.past.at(a + t, 0);
    if (static_cardinality > 0) {
      if (!d.has_static || d.static_id >= static_cardinality) {
        fail(ErrorCode::SchemaMismatch, "series '" + d.id + "' lacks a known static node id");
      }
      batch.statics(b, d.static_id) = 1.0;
    }
  }
  return batch;
}

Batch make_forecast_batch(const TrainedModel& model, std::span<const ForecastWindow> windows, std::size_t k) {
  if (windows.empty()) fail(ErrorCode::InvalidArgument, "no forecast windows");
  const std::size_t H = model.horizon();
  const std::size_t B = windows.size();
  const std::size_t P = model.schema.past.size(), F = model.schema.future.size();
  Batch batch;
  batch.size = B;
  batch.k = k;
  batch.horizon = H;
  batch.past = nn::Tensor(k * B, P);
  batch.future = nn::Tensor((k + H) * B, F);
  if (model.static_cardinality > 0) batch.statics = nn::Tensor(B, model.static_cardinality);
  for (std::size_t b = 0; b < B; ++b) {
    const auto& w = windows[b];
    require_schema(model.schema, w.schema);
    if (w.past.rows < k) {
      fail(ErrorCode::WindowTooShort, "window for '" + w.series_id + "' has " + std::to_string(w.past.rows) +
                                          " past hours, model needs " + std::to_string(k));
    }
    if (w.future.rows != w.past.rows + H) {
      fail(ErrorCode::WindowTooShort, "window for '" + w.series_id + "' lacks " + std::to_string(H) +
                                          " future-known hours");
    }
    if (w.past.cols != P || w.future.cols != F) fail(ErrorCode::SchemaMismatch, "window column count differs");
    const Normalizer& norm = model.normalizer_for(w.series_id);
    const std::size_t off = w.past.rows - k;
    for (std::size_t t = 0; t < k; ++t) {
      for (std::size_t c = 0; c < P; ++c) batch.past(t * B + b, c) = norm.apply_value(c, w.past.at(off + t, c));
    }
    for (std::size_t t = 0; t < k + H; ++t) {
      for (std::size_t c = 0; c < F; ++c) {
        batch.future(t * B + b, c) = norm.apply_value(P + c, w.future.at(off + t, c));
      }
    }
    if (model.static_cardinality > 0) {
      if (w.static_ids.empty() || w.static_ids.front() >= model.static_cardinality) {
        fail(ErrorCode::SchemaMismatch, "window for '" + w.series_id + "' has an unknown static node id");
      }
      batch.statics(b, w.static_ids.front()) = 1.0;
    }
  }
  return batch;
}

double mean_loss(nn::ParameterStore& store, const Predictor& predict, std::span<const SeriesData> data,
                 std::span<const WindowRef> refs, const FitSettings& settings) {
  double total = 0.0;
  std::size_t count = 0;
  const std::size_t step = std::max<std::size_t>(settings.batch_size, 64);
  for (std::size_t i = 0; i < refs.size(); i += step) {
    const auto chunk = refs.subspan(i, std::min(step, refs.size() - i));
    Batch batch = make_batch(data, chunk, settings.k, settings.horizon, settings.static_cardinality);
    nn::Tape tape;
    nn::Forward fw{tape, store, false, 0.0, nullptr};
    const nn::Tensor& pred = predict(fw, batch).value();
    for (std::size_t j = 0; j < pred.size(); ++j) {
      const double d = pred[j] - batch.target[j];
      total += d * d;
    }
    count += pred.size();
  }
  return count == 0 ? 0.0 : total / double(count);
}

std::vector<EpochRecord> fit_network(nn::ParameterStore& store, const Predictor& predict,
                                     std::span<const SeriesData> data, const WindowPlan& plan,
                                     const FitSettings& settings) {
  nn::AdamConfig adam_config;
  adam_config.learning_rate = settings.learning_rate;
  adam_config.clip_norm = settings.schedule.clip_norm;
  nn::Adam adam(adam_config);
  std::mt19937_64 rng(derive_seed(settings.seed, 1));

  std::vector<EpochRecord> history;
  double best = std::numeric_limits<double>::infinity();
  std::map<std::string, nn::Tensor> best_values;
  std::size_t stale = 0;
  std::vector<WindowRef> order = plan.train;
  const std::size_t B = std::max<std::size_t>(settings.batch_size, 1);

  for (std::size_t epoch = 1; epoch <= settings.schedule.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    std::size_t seen = 0;
    for (std::size_t i = 0; i < order.size(); i += B) {
      const auto chunk = std::span<const WindowRef>(order).subspan(i, std::min(B, order.size() - i));
      Batch batch = make_batch(data, chunk, settings.k, settings.horizon, settings.static_cardinality);
      store.zero_grad();
      nn::Tape tape;
      nn::Forward fw{tape, store, true, settings.dropout, &rng};
      nn::Var loss = nn::mse_loss(predict(fw, batch), tape.constant(batch.target));
      const double value = loss.value()[0];
      if (!std::isfinite(value)) {
        fail(ErrorCode::NonFiniteLoss, "loss became " + std::to_string(value) + " at epoch " + std::to_string(epoch) +
                                           ", batch " + std::to_string(i / B) + " (learning_rate " +
                                           std::to_string(settings.learning_rate) + ")");
      }
      tape.backward(loss);
      adam.step(store);
      total += value * double(chunk.size());
      seen += chunk.size();
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = total / double(seen);
    rec.validation_loss = mean_loss(store, predict, data, plan.validation, settings);
    if (!std::isfinite(rec.validation_loss)) {
      fail(ErrorCode::NonFiniteLoss, "validation loss became non-finite at epoch " + std::to_string(epoch));
    }
    history.push_back(rec);
    if (rec.validation_loss < best) {
      best = rec.validation_loss;
      stale = 0;
      best_values.clear();
      for (const auto& [name, p] : store.all()) best_values.emplace(name, p.value);
    } else if (++stale >= settings.schedule.patience) {
      break;
    }
  }
  for (auto& [name, value] : best_values) store.at(name).value = value;
  store.zero_grad();
  return history;
}


PreparedFrames prepare_frames(std::span<const CovariateFrame> frames, const SplitSpec& split) {
  if (frames.empty()) fail(ErrorCode::InvalidArgument, "no training series");
  PreparedFrames p;
  p.schema = frames.front().schema;
  for (const auto& f : frames) {
    require_schema(p.schema, f.schema);
    if (p.normalizers.contains(f.series_id)) fail(ErrorCode::InvalidArgument, "duplicate series '" + f.series_id + "'");
    const std::size_t rows = split_point(f.index, split);
    p.train_rows.push_back(rows);
    Normalizer norm = fit_frame_normalizer(f, rows);
    p.data.push_back(normalize_frame(f, norm));
    p.normalizers.emplace(f.series_id, std::move(norm));
    p.ids.push_back(f.series_id);
    if (!f.static_ids.empty()) p.static_cardinality = std::max(p.static_cardinality, f.static_ids.front() + 1);
  }
  for (const auto& f : frames) {
    if (f.static_ids.empty() != frames.front().static_ids.empty()) {
      fail(ErrorCode::SchemaMismatch, "series '" + f.series_id + "' differs in static features");
    }
  }
  return p;
}

std::vector<MemberGroup> group_by_member(const TrainedModel& model, std::span<const ForecastWindow> windows) {
  std::vector<MemberGroup> out;
  std::map<const ModelMember*, std::size_t> slot;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const ModelMember* m = &model.member_for(windows[i].series_id);
    auto [it, inserted] = slot.try_emplace(m, out.size());
    if (inserted) out.push_back({m, {}, {}});
    out[it->second].indices.push_back(i);
    out[it->second].windows.push_back(windows[i]);
  }
  return out;
}

FitSettings::FitSettings(const TFTConfig& c, std::size_t cardinality, std::uint64_t s)
    : k(c.input_window), horizon(c.horizon), batch_size(c.batch_size), learning_rate(c.learning_rate),
      dropout(c.dropout), static_cardinality(cardinality), schedule(c.schedule), seed(s) {}

FitSettings::FitSettings(const LSTMConfig& c, std::size_t cardinality, std::uint64_t s)
    : k(c.input_window), horizon(c.horizon), batch_size(c.batch_size), learning_rate(c.learning_rate),
      dropout(c.dropout), static_cardinality(cardinality), schedule(c.schedule), seed(s) {}

std::vector<std::vector<std::size_t>> member_groups(std::size_t series, bool per_series) {
  std::vector<std::vector<std::size_t>> groups;
  if (per_series) {
    for (std::size_t s = 0; s < series; ++s) groups.push_back({s});
  } else {
    groups.emplace_back();
    for (std::size_t s = 0; s < series; ++s) groups.back().push_back(s);
  }
  return groups;
}

}  // namespace gridcast
