#include "gridcast/models/config.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include <json.hpp>

#include "gridcast/error.hpp"

namespace gridcast {

using nlohmann::ordered_json;

std::string_view to_string(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::tft: return "tft";
    case ModelKind::lstm: return "lstm";
    case ModelKind::arima: return "arima";
    case ModelKind::naive: return "naive";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view text) {
  if (text == "tft") return ModelKind::tft;
  if (text == "lstm") return ModelKind::lstm;
  if (text == "arima") return ModelKind::arima;
  if (text == "naive") return ModelKind::naive;
  fail(ErrorCode::ConfigError, "unknown model '" + std::string(text) + "' (expected tft, lstm, arima or naive)");
}

ModelKind kind_of(const ModelConfig& config) noexcept { return static_cast<ModelKind>(config.index()); }

std::size_t horizon_of(const ModelConfig& config) noexcept {
  return std::visit([](const auto& c) { return c.horizon; }, config);
}

std::size_t input_window_of(const ModelConfig& config) noexcept {
  struct {
    std::size_t operator()(const TFTConfig& c) const { return c.input_window; }
    std::size_t operator()(const LSTMConfig& c) const { return c.input_window; }
    std::size_t operator()(const ArimaConfig& c) const { return c.history; }
    std::size_t operator()(const NaiveConfig& c) const { return c.season; }
  } visitor;
  return std::visit(visitor, config);
}

ModelConfig with_horizon(ModelConfig config, std::size_t horizon) {
  std::visit([horizon](auto& c) { c.horizon = horizon; }, config);
  return config;
}

namespace {

class Problems {
 public:
  void check(bool ok, const char* field, const std::string& rule) {
    if (!ok) items_.push_back(std::string(field) + " " + rule);
  }
  void raise(std::string_view what) const {
    if (items_.empty()) return;
    std::string msg = "invalid " + std::string(what) + " config:";
    for (const auto& s : items_) msg += " " + s + ";";
    msg.pop_back();
    fail(ErrorCode::ConfigError, msg);
  }

 private:
  std::vector<std::string> items_;
};

void check_horizon(Problems& p, std::size_t horizon) {
  p.check(horizon == 24 || horizon == 168, "horizon", "must be 24 or 168");
}

void check_schedule(Problems& p, const TrainingSchedule& s) {
  p.check(s.max_epochs >= 1, "max_epochs", "must be >= 1");
  p.check(s.patience >= 1, "patience", "must be >= 1");
  p.check(s.validation_fraction > 0.0 && s.validation_fraction < 1.0, "validation_fraction", "must be in (0,1)");
  p.check(s.window_stride >= 1, "window_stride", "must be >= 1");
  p.check(s.clip_norm >= 0.0 && std::isfinite(s.clip_norm), "clip_norm", "must be >= 0");
}

void check_dropout(Problems& p, double dropout) {
  p.check(dropout >= 0.0 && dropout < 1.0, "dropout", "must be in [0,1)");
}

void check_lr(Problems& p, double lr) { p.check(lr > 0.0 && std::isfinite(lr), "learning_rate", "must be > 0"); }

}  // namespace

void validate(const TFTConfig& c) {
  Problems p;
  p.check(c.attention_heads >= 1, "attention_heads", "must be >= 1");
  p.check(c.hidden_size >= 1, "hidden_size", "must be >= 1");
  p.check(c.attention_heads == 0 || c.hidden_size % c.attention_heads == 0, "hidden_size",
          "must be divisible by attention_heads");
  p.check(c.lstm_layers >= 1, "lstm_layers", "must be >= 1");
  p.check(c.input_window >= 1, "input_window", "must be >= 1");
  check_dropout(p, c.dropout);
  p.check(c.batch_size >= 1, "batch_size", "must be >= 1");
  check_lr(p, c.learning_rate);
  check_horizon(p, c.horizon);
  check_schedule(p, c.schedule);
  p.raise("tft");
}

void validate(const LSTMConfig& c) {
  Problems p;
  p.check(c.hidden_size >= 1, "hidden_size", "must be >= 1");
  p.check(c.num_layers >= 1, "num_layers", "must be >= 1");
  p.check(c.input_window >= 1, "input_window", "must be >= 1");
  check_dropout(p, c.dropout);
  p.check(c.batch_size >= 1, "batch_size", "must be >= 1");
  check_lr(p, c.learning_rate);
  check_horizon(p, c.horizon);
  check_schedule(p, c.schedule);
  p.raise("lstm");
}

void validate(const ArimaConfig& c) {
  Problems p;
  // A pure differencing model (p = q = 0) is meaningful only with d >= 1.
  p.check(c.p + c.q >= 1 || c.d >= 1, "p", "p + q must be >= 1 unless d >= 1");
  p.check(c.p <= 48 && c.q <= 48, "p", "orders above 48 are not supported");
  p.check(c.d <= 2, "d", "must be <= 2");
  p.check(c.max_iterations >= 1, "max_iterations", "must be >= 1");
  p.check(c.tolerance > 0.0, "tolerance", "must be > 0");
  p.check(c.history >= 1, "history", "must be >= 1");
  check_horizon(p, c.horizon);
  p.raise("arima");
}

void validate(const NaiveConfig& c) {
  Problems p;
  p.check(c.season >= 1, "season", "must be >= 1");
  check_horizon(p, c.horizon);
  p.raise("naive");
}

void validate(const ModelConfig& config) {
  std::visit([](const auto& c) { validate(c); }, config);
}

namespace {

// Binds JSON keys to config members for one config type.
template <class C>
struct Fields {
  std::vector<std::pair<std::string, std::function<ordered_json(const C&)>>> getters;
  std::map<std::string, std::function<void(C&, const ordered_json&)>> setters;

  template <class T>
  Fields& add(const std::string& key, T C::*member) {
    getters.emplace_back(key, [member](const C& c) { return ordered_json(c.*member); });
    setters[key] = [member, key](C& c, const ordered_json& j) { c.*member = read<T>(key, j); };
    return *this;
  }
  template <class T>
  Fields& add_schedule(const std::string& key, T TrainingSchedule::*member) {
    getters.emplace_back(key, [member](const C& c) { return ordered_json(c.schedule.*member); });
    setters[key] = [member, key](C& c, const ordered_json& j) { c.schedule.*member = read<T>(key, j); };
    return *this;
  }

  template <class T>
  static T read(const std::string& key, const ordered_json& j) {
    if constexpr (std::is_same_v<T, std::size_t>) {
      if (j.is_number_integer() && j.get<long long>() >= 0) return j.get<std::size_t>();
      if (j.is_number_integer()) fail(ErrorCode::ConfigError, key + " must be >= 0");
      fail(ErrorCode::ConfigError, key + " must be a non-negative integer");
    } else {
      if (!j.is_number()) fail(ErrorCode::ConfigError, key + " must be a number");
      return j.get<T>();
    }
  }
};

template <class C>
void add_schedule_fields(Fields<C>& f) {
  f.add_schedule("max_epochs", &TrainingSchedule::max_epochs)
      .add_schedule("patience", &TrainingSchedule::patience)
      .add_schedule("validation_fraction", &TrainingSchedule::validation_fraction)
      .add_schedule("window_stride", &TrainingSchedule::window_stride)
      .add_schedule("clip_norm", &TrainingSchedule::clip_norm);
}

const Fields<TFTConfig>& tft_fields() {
  static const Fields<TFTConfig> f = [] {
    Fields<TFTConfig> f;
    f.add("attention_heads", &TFTConfig::attention_heads)
        .add("hidden_size", &TFTConfig::hidden_size)
        .add("lstm_layers", &TFTConfig::lstm_layers)
        .add("input_window", &TFTConfig::input_window)
        .add("dropout", &TFTConfig::dropout)
        .add("batch_size", &TFTConfig::batch_size)
        .add("learning_rate", &TFTConfig::learning_rate)
        .add("horizon", &TFTConfig::horizon);
    add_schedule_fields(f);
    return f;
  }();
  return f;
}

const Fields<LSTMConfig>& lstm_fields() {
  static const Fields<LSTMConfig> f = [] {
    Fields<LSTMConfig> f;
    f.add("hidden_size", &LSTMConfig::hidden_size)
        .add("num_layers", &LSTMConfig::num_layers)
        .add("input_window", &LSTMConfig::input_window)
        .add("dropout", &LSTMConfig::dropout)
        .add("batch_size", &LSTMConfig::batch_size)
        .add("learning_rate", &LSTMConfig::learning_rate)
        .add("horizon", &LSTMConfig::horizon);
    add_schedule_fields(f);
    return f;
  }();
  return f;
}

const Fields<ArimaConfig>& arima_fields() {
  static const Fields<ArimaConfig> f = [] {
    Fields<ArimaConfig> f;
    f.add("p", &ArimaConfig::p)
        .add("d", &ArimaConfig::d)
        .add("q", &ArimaConfig::q)
        .add("max_iterations", &ArimaConfig::max_iterations)
        .add("tolerance", &ArimaConfig::tolerance)
        .add("history", &ArimaConfig::history)
        .add("horizon", &ArimaConfig::horizon);
    return f;
  }();
  return f;
}

const Fields<NaiveConfig>& naive_fields() {
  static const Fields<NaiveConfig> f = [] {
    Fields<NaiveConfig> f;
    f.add("season", &NaiveConfig::season).add("horizon", &NaiveConfig::horizon);
    return f;
  }();
  return f;
}

template <class C>
const Fields<C>& fields_for() {
  if constexpr (std::is_same_v<C, TFTConfig>) return tft_fields();
  else if constexpr (std::is_same_v<C, LSTMConfig>) return lstm_fields();
  else if constexpr (std::is_same_v<C, ArimaConfig>) return arima_fields();
  else return naive_fields();
}

template <class C>
C parse_fields(const ordered_json& j) {
  C c;
  const auto& f = fields_for<C>();
  std::vector<std::string> unknown;
  for (const auto& [key, value] : j.items()) {
    if (key == "schema_version" || key == "model") continue;
    auto it = f.setters.find(key);
    if (it == f.setters.end()) {
      unknown.push_back(key);
      continue;
    }
    it->second(c, value);
  }
  if (!unknown.empty()) {
    std::string msg = "unknown config key(s):";
    for (const auto& k : unknown) msg += " " + k;
    fail(ErrorCode::ConfigError, msg);
  }
  return c;
}

}  // namespace

std::string to_json(const ModelConfig& config) {
  ordered_json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["model"] = std::string(to_string(kind_of(config)));
  std::visit(
      [&j](const auto& c) {
        using C = std::decay_t<decltype(c)>;
        for (const auto& [key, get] : fields_for<C>().getters) j[key] = get(c);
      },
      config);
  return j.dump(2);
}

ModelConfig default_config(ModelKind kind) {
  switch (kind) {
    case ModelKind::tft: return TFTConfig{};
    case ModelKind::lstm: return LSTMConfig{};
    case ModelKind::arima: return ArimaConfig{};
    case ModelKind::naive: return NaiveConfig{};
  }
  return TFTConfig{};
}

ModelConfig parse_model_config(ModelKind kind, std::string_view json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::ConfigError, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::ConfigError, "config must be a JSON object");
  if (!j.contains("schema_version")) fail(ErrorCode::ConfigError, "config lacks schema_version");
  if (!j["schema_version"].is_number_integer() || j["schema_version"].get<int>() != kConfigSchemaVersion) {
    fail(ErrorCode::ConfigError, "unsupported schema_version (expected " + std::to_string(kConfigSchemaVersion) + ")");
  }
  if (j.contains("model")) {
    if (!j["model"].is_string() || parse_model_kind(j["model"].get<std::string>()) != kind) {
      fail(ErrorCode::ConfigError, "config is for model " + j["model"].dump() + ", not " +
                                       std::string(to_string(kind)));
    }
  }
  ModelConfig out;
  switch (kind) {
    case ModelKind::tft: out = parse_fields<TFTConfig>(j); break;
    case ModelKind::lstm: out = parse_fields<LSTMConfig>(j); break;
    case ModelKind::arima: out = parse_fields<ArimaConfig>(j); break;
    case ModelKind::naive: out = parse_fields<NaiveConfig>(j); break;
  }
  validate(out);
  return out;
}

}  // namespace gridcast
