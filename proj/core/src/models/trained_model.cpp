#include "gridcast/models/trained_model.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gridcast/csv.hpp"
#include "gridcast/error.hpp"
#include "gridcast/models/arima.hpp"
#include "gridcast/models/lstm.hpp"
#include "gridcast/models/tft.hpp"
#include "gridcast/nn/checkpoint.hpp"

namespace gridcast {

using nlohmann::ordered_json;

const ModelMember& TrainedModel::member_for(const std::string& series_id) const {
  for (const auto& m : members) {
    for (const auto& id : m.series_ids) {
      if (id == series_id) return m;
    }
  }
  fail(ErrorCode::SchemaMismatch, "model was not trained on series '" + series_id + "'");
}

const Normalizer& TrainedModel::normalizer_for(const std::string& series_id) const {
  auto it = normalizers.find(series_id);
  if (it == normalizers.end()) fail(ErrorCode::SchemaMismatch, "no normalizer for series '" + series_id + "'");
  return it->second;
}

void require_schema(const FeatureSchema& expected, const FeatureSchema& actual) {
  auto check = [](const std::vector<ColumnDescriptor>& a, const std::vector<ColumnDescriptor>& b, const char* group) {
    for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
      const std::string want = i < a.size() ? a[i].name : "<none>";
      const std::string got = i < b.size() ? b[i].name : "<none>";
      if (i >= a.size() || i >= b.size() || !(a[i] == b[i])) {
        fail(ErrorCode::SchemaMismatch, std::string(group) + " column " + std::to_string(i) + ": expected '" + want +
                                            "', got '" + got + "'");
      }
    }
  };
  check(expected.past, actual.past, "past-known");
  check(expected.future, actual.future, "future-known");
  check(expected.statics, actual.statics, "static");
}

std::size_t required_history(const TrainedModel& model) { return input_window_of(model.config); }

ForecastWindow cut_window(const CovariateFrame& frame, std::size_t anchor, std::size_t history, std::size_t horizon) {
  if (anchor < history) {
    fail(ErrorCode::WindowTooShort, "series '" + frame.series_id + "' has " + std::to_string(anchor) +
                                        " hours before the forecast start, " + std::to_string(history) + " needed");
  }
  if (anchor + horizon > frame.future_known.rows) {
    fail(ErrorCode::WindowTooShort, "series '" + frame.series_id + "' lacks future-known rows for the horizon");
  }
  ForecastWindow w;
  w.series_id = frame.series_id;
  w.start = frame.index.at(anchor);
  w.past = frame.past_known.slice_rows(anchor - history, history);
  w.future = frame.future_known.slice_rows(anchor - history, history + horizon);
  w.static_ids = frame.static_ids;
  w.schema = frame.schema;
  return w;
}

std::vector<std::vector<double>> forecast(const TrainedModel& model, std::span<const ForecastWindow> windows) {
  if (windows.empty()) return {};
  switch (model.kind()) {
    case ModelKind::tft: return tft_forecast(model, windows);
    case ModelKind::lstm: return lstm_forecast(model, windows);
    case ModelKind::arima: return arima_forecast_windows(model, windows);
    case ModelKind::naive: return naive_forecast_windows(model, windows);
  }
  return {};
}

std::vector<double> forecast(const TrainedModel& model, const ForecastWindow& window) {
  return forecast(model, std::span(&window, 1)).front();
}

Series forecast_series(const TrainedModel& model, const ForecastWindow& window) {
  return Series(window.series_id, HourlyIndex(window.start, model.horizon()), forecast(model, window));
}

TrainedModel train_model(const ModelConfig& config, std::span<const CovariateFrame> frames, const SplitSpec& split,
                         std::uint64_t seed, const TrainOptions& options) {
  validate(config);
  switch (kind_of(config)) {
    case ModelKind::tft: return train_tft(std::get<TFTConfig>(config), frames, split, seed, options);
    case ModelKind::lstm: return train_lstm(std::get<LSTMConfig>(config), frames, split, seed, options);
    case ModelKind::arima: {
      auto m = train_arima(std::get<ArimaConfig>(config), frames, split);
      m.seed = seed;
      return m;
    }
    case ModelKind::naive: {
      auto m = make_naive_model(std::get<NaiveConfig>(config), frames);
      m.seed = seed;
      return m;
    }
  }
  fail(ErrorCode::ConfigError, "unknown model kind");
}

std::filesystem::path sidecar_path(const std::filesystem::path& checkpoint) {
  auto p = checkpoint;
  p += ".json";
  return p;
}

namespace {

ordered_json columns_json(const std::vector<ColumnDescriptor>& cols) {
  ordered_json a = ordered_json::array();
  for (const auto& c : cols) a.push_back(c.name);
  return a;
}

std::vector<ColumnDescriptor> columns_from(const ordered_json& a, FeatureHorizon h) {
  std::vector<ColumnDescriptor> out;
  for (const auto& n : a) out.push_back({n.get<std::string>(), h});
  return out;
}

std::string member_prefix(std::size_t m) { return "m" + std::to_string(m) + "/"; }

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

void save_model(const TrainedModel& model, const std::filesystem::path& checkpoint) {
  const std::string config_json = to_json(model.config);
  const std::uint64_t hash = nn::fnv1a64(config_json);
  nn::Checkpoint ckpt;
  ckpt.seed = model.seed;
  ckpt.config_hash = hash;
  ordered_json members = ordered_json::array();
  for (std::size_t m = 0; m < model.members.size(); ++m) {
    const auto& member = model.members[m];
    for (const auto& [name, p] : member.params.all()) ckpt.tensors.emplace(member_prefix(m) + name, p.value);
    ordered_json jm;
    jm["series_ids"] = member.series_ids;
    jm["param_seed"] = member.params.seed();
    if (member.arima) {
      const auto& a = *member.arima;
      std::vector<double> packed{a.constant};
      packed.insert(packed.end(), a.ar.begin(), a.ar.end());
      packed.insert(packed.end(), a.ma.begin(), a.ma.end());
      ckpt.tensors.emplace(member_prefix(m) + "arima", nn::Tensor::row(packed));
      jm["arima"] = {{"p", a.ar.size()}, {"q", a.ma.size()}, {"sigma2", a.sigma2}, {"iterations", a.iterations}};
    }
    members.push_back(jm);
  }
  ordered_json j;
  j["format"] = "gridcast-model";
  j["version"] = nn::kCheckpointVersion;
  j["kind"] = std::string(to_string(model.kind()));
  j["config"] = ordered_json::parse(config_json);
  j["config_hash"] = hash;
  j["seed"] = model.seed;
  j["schema"] = {{"past", columns_json(model.schema.past)},
                 {"future", columns_json(model.schema.future)},
                 {"static", columns_json(model.schema.statics)}};
  j["series_ids"] = model.series_ids;
  j["static_cardinality"] = model.static_cardinality;
  ordered_json norms = ordered_json::object();
  for (const auto& [id, n] : model.normalizers) {
    norms[id] = {{"method", std::string(Normalizer::method())}, {"min", n.min()}, {"max", n.max()}};
  }
  j["normalizers"] = norms;
  j["members"] = members;
  ordered_json hist = ordered_json::array();
  for (const auto& h : model.history) {
    hist.push_back({{"member", h.member}, {"epoch", h.epoch}, {"train_loss", h.train_loss},
                    {"validation_loss", h.validation_loss}});
  }
  j["history"] = hist;
  nn::write_checkpoint(checkpoint, ckpt);
  csv::write_file_atomic(sidecar_path(checkpoint), j.dump(2) + "\n");
}

TrainedModel load_model(const std::filesystem::path& checkpoint) {
  const nn::Checkpoint ckpt = nn::read_checkpoint(checkpoint);
  ordered_json j;
  try {
    j = ordered_json::parse(read_text(sidecar_path(checkpoint)));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, "model sidecar " + sidecar_path(checkpoint).string() + ": " + e.what());
  }
  try {
    if (j.at("format") != "gridcast-model") fail(ErrorCode::ParseError, "sidecar is not a gridcast model");
    TrainedModel model;
    const ModelKind kind = parse_model_kind(j.at("kind").get<std::string>());
    model.config = parse_model_config(kind, j.at("config").dump());
    const std::uint64_t hash = nn::fnv1a64(to_json(model.config));
    if (hash != ckpt.config_hash || hash != j.at("config_hash").get<std::uint64_t>()) {
      fail(ErrorCode::ParseError, "config hash mismatch between checkpoint and sidecar");
    }
    model.seed = j.at("seed").get<std::uint64_t>();
    model.schema.past = columns_from(j.at("schema").at("past"), FeatureHorizon::past);
    model.schema.future = columns_from(j.at("schema").at("future"), FeatureHorizon::future);
    model.schema.statics = columns_from(j.at("schema").at("static"), FeatureHorizon::statik);
    model.series_ids = j.at("series_ids").get<std::vector<std::string>>();
    model.static_cardinality = j.at("static_cardinality").get<std::size_t>();
    for (const auto& [id, n] : j.at("normalizers").items()) {
      model.normalizers.emplace(id, Normalizer::from_bounds(n.at("min").get<std::vector<double>>(),
                                                            n.at("max").get<std::vector<double>>()));
    }
    const auto& members = j.at("members");
    for (std::size_t m = 0; m < members.size(); ++m) {
      ModelMember member;
      member.series_ids = members[m].at("series_ids").get<std::vector<std::string>>();
      nn::Checkpoint part = ckpt;
      part.seed = members[m].at("param_seed").get<std::uint64_t>();
      member.params = nn::restore(part, member_prefix(m));
      if (members[m].contains("arima")) {
        const auto& ja = members[m]["arima"];
        const auto p = ja.at("p").get<std::size_t>(), q = ja.at("q").get<std::size_t>();
        const auto& packed = member.params.at("arima").value;
        if (packed.size() != 1 + p + q) fail(ErrorCode::ParseError, "ARIMA coefficient count differs from orders");
        ArimaCoefficients a;
        a.constant = packed[0];
        for (std::size_t i = 0; i < p; ++i) a.ar.push_back(packed[1 + i]);
        for (std::size_t i = 0; i < q; ++i) a.ma.push_back(packed[1 + p + i]);
        a.sigma2 = ja.at("sigma2").get<double>();
        a.iterations = ja.at("iterations").get<std::size_t>();
        member.arima = a;
        member.params = nn::ParameterStore(part.seed);
      }
      model.members.push_back(std::move(member));
    }
    for (const auto& h : j.at("history")) {
      model.history.push_back({h.at("member").get<std::size_t>(), h.at("epoch").get<std::size_t>(),
                               h.at("train_loss").get<double>(), h.at("validation_loss").get<double>()});
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, "model sidecar " + sidecar_path(checkpoint).string() + ": " + e.what());
  }
}

}  // namespace gridcast
