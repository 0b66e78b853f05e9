#include "gridcast/cli/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gridcast/cli/dataset.hpp"
#include "gridcast/cli/manifest.hpp"
#include "gridcast/csv.hpp"
#include "gridcast/error.hpp"
#include "gridcast/eval/report.hpp"
#include "gridcast/models/trained_model.hpp"
#include "gridcast/nn/checkpoint.hpp"

#ifndef GRIDCAST_VERSION
#define GRIDCAST_VERSION "0.0.0"
#endif

namespace gridcast::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string_view tool_version() noexcept { return GRIDCAST_VERSION; }

namespace {

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::size_t horizon_from_flag(const std::string& text) {
  if (text == "day") return horizon_hours(WindowKind::day);
  if (text == "week") return horizon_hours(WindowKind::week);
  fail(ErrorCode::ConfigError, "horizon: expected day or week, got '" + text + "'");
}

WindowKind window_kind_of(std::size_t horizon) {
  if (horizon == horizon_hours(WindowKind::day)) return WindowKind::day;
  if (horizon == horizon_hours(WindowKind::week)) return WindowKind::week;
  fail(ErrorCode::ConfigError, "horizon " + std::to_string(horizon) + " is neither day (24) nor week (168)");
}

std::string config_hash(const ModelConfig& config) { return hex64(nn::fnv1a64(to_json(config))); }

// Options shared by every subcommand.
struct Common {
  std::string out;
  std::size_t threads = 1;
  std::vector<std::string> arguments;
};

fs::path run_dir(const Common& common, const std::string& command) {
  if (!common.out.empty()) return common.out;
  const fs::path base = fs::path("runs") / (utc_now_compact() + "-" + command);
  fs::path dir = base;
  for (int n = 2; fs::exists(dir); ++n) dir = base.string() + "-" + std::to_string(n);
  return dir;
}

fs::path data_root(const std::string& flag) {
  const char* env = std::getenv("GRIDCAST_DATA_DIR");
  if (flag.empty()) {
    if (env == nullptr || *env == '\0') {
      fail(ErrorCode::ConfigError, "no dataset given: pass --data or set GRIDCAST_DATA_DIR");
    }
    return env;
  }
  const fs::path p(flag);
  if (p.is_relative() && env != nullptr && *env != '\0' && !fs::exists(p)) return fs::path(env) / p;
  return p;
}

RunManifest begin_manifest(const std::string& command, const Common& common) {
  RunManifest m;
  m.command = command;
  m.arguments = common.arguments;
  m.started = utc_now_iso();
  m.tool_version = std::string(tool_version());
  return m;
}

void finish_manifest(RunManifest& m, const fs::path& dir, const std::vector<fs::path>& inputs,
                     const std::vector<fs::path>& outputs) {
  m.inputs = digest_files(inputs);
  m.outputs = digest_files(outputs);
  m.finished = utc_now_iso();
  write_manifest(dir, m);
}

std::vector<std::string> preprocessing_notes(const LoadedDataset& data) {
  std::vector<std::string> notes;
  const auto& p = data.preprocessing;
  notes.push_back("households dropped: " + std::to_string(p.households_dropped.size()));
  notes.push_back("flagged values interpolated: " + std::to_string(p.flagged_interpolated));
  notes.push_back("IQR outliers removed: " + std::to_string(p.outliers_removed));
  for (const auto& w : data.warnings) notes.push_back("warning: " + w);
  return notes;
}

// Resolves the model configuration from --model, --config and --horizon.
ModelConfig resolve_config(const std::string& model_flag, const std::string& config_file,
                           const std::string& horizon_flag, std::vector<fs::path>& inputs) {
  std::optional<ModelKind> kind;
  if (!model_flag.empty()) kind = parse_model_kind(model_flag);
  ModelConfig config;
  if (!config_file.empty()) {
    const std::string text = read_text(config_file);
    inputs.emplace_back(config_file);
    if (!kind) {
      try {
        const auto j = ordered_json::parse(text);
        if (j.is_object() && j.contains("model") && j["model"].is_string()) kind = parse_model_kind(j["model"].get<std::string>());
      } catch (const ordered_json::exception&) {
      }
    }
    if (!kind) fail(ErrorCode::ConfigError, "model kind unknown: pass --model or a config with a 'model' key");
    config = parse_model_config(*kind, text);
  } else {
    if (!kind) fail(ErrorCode::ConfigError, "pass --model or --config");
    config = default_config(*kind);
  }
  if (!horizon_flag.empty()) config = with_horizon(config, horizon_from_flag(horizon_flag));
  validate(config);
  return config;
}

Level parse_train_level(const std::string& text) {
  const Level level = parse_level(text);
  if (level == Level::hierarchical) {
    fail(ErrorCode::ConfigError, "train --level takes grid or substation; hierarchical is an evaluation level");
  }
  return level;
}

std::string history_csv(const TrainedModel& model) {
  std::ostringstream out;
  out << "member,epoch,train_loss,validation_loss\n";
  for (const auto& h : model.history) {
    out << h.member << ',' << h.epoch << ',' << csv::format_double(h.train_loss) << ','
        << csv::format_double(h.validation_loss) << '\n';
  }
  return out.str();
}

// ---- synth -------------------------------------------------------------------

struct SynthArgs {
  SynthOptions options;
  std::string format = "household-long";
  std::string start;
};

int cmd_synth(const SynthArgs& args, const Common& common, std::ostream& out) {
  RunManifest m = begin_manifest("synth", common);
  SynthOptions options = args.options;
  options.format = parse_dataset_format(args.format);
  if (!args.start.empty()) options.generator.start = parse_day(args.start);
  const fs::path dir = run_dir(common, "synth");
  const auto written = write_synthetic_dataset(dir, options);
  m.seeds["synthetic"] = options.generator.seed;
  finish_manifest(m, dir, {}, written);
  out << "wrote " << written.size() << " files to " << dir.string() << '\n';
  return kExitOk;
}

// ---- train -------------------------------------------------------------------

struct TrainArgs {
  std::string data;
  std::string model;
  std::string level = "grid";
  std::string horizon;
  std::string config;
  std::uint64_t seed = 0;
  bool per_substation = false;
};

int cmd_train(const TrainArgs& args, const Common& common, std::ostream& out) {
  RunManifest m = begin_manifest("train", common);
  std::vector<fs::path> inputs;
  const ModelConfig config = resolve_config(args.model, args.config, args.horizon, inputs);
  const Level level = parse_train_level(args.level);
  const LoadedDataset data = load_dataset(data_root(args.data));
  inputs.insert(inputs.end(), data.inputs.begin(), data.inputs.end());

  const auto frames = dataset_frames(data, level);
  TrainOptions options;
  options.per_series = args.per_substation;
  const TrainedModel model = train_model(config, frames, data.spec.split, args.seed, options);

  const fs::path dir = run_dir(common, "train");
  fs::create_directories(dir);
  const fs::path ckpt = dir / "model.ckpt";
  save_model(model, ckpt);
  csv::write_file_atomic(dir / "history.csv", history_csv(model));
  csv::write_file_atomic(dir / "config.json", to_json(config) + "\n");

  m.config_hash = config_hash(config);
  m.seeds["train"] = args.seed;
  m.notes = preprocessing_notes(data);
  m.notes.push_back("level: " + std::string(to_string(level)));
  finish_manifest(m, dir, inputs, {ckpt, sidecar_path(ckpt), dir / "history.csv", dir / "config.json"});

  out << "trained " << to_string(model.kind()) << " on " << frames.size() << " series ("
      << model.members.size() << " member" << (model.members.size() == 1 ? "" : "s") << ", horizon "
      << model.horizon() << "h)\n";
  out << "checkpoint: " << ckpt.string() << '\n';
  return kExitOk;
}

// ---- evaluate ----------------------------------------------------------------

struct EvaluateArgs {
  std::string checkpoint;
  std::string data;
  std::string level;
  bool aggregate = false;
};

int cmd_evaluate(const EvaluateArgs& args, const Common& common, std::ostream& out) {
  RunManifest m = begin_manifest("evaluate", common);
  const fs::path ckpt(args.checkpoint);
  const TrainedModel model = load_model(ckpt);
  const LoadedDataset data = load_dataset(data_root(args.data));

  Level level = Level::grid;
  if (!args.level.empty()) {
    level = parse_level(args.level);
  } else if (model.series_ids.size() != 1 || model.series_ids.front() != data.hierarchy.grid.id()) {
    level = Level::substation;
  }
  if (args.aggregate) {
    if (level == Level::grid) fail(ErrorCode::ConfigError, "--aggregate needs a substation-level checkpoint");
    level = Level::hierarchical;
  }

  const auto frames = dataset_frames(data, level);
  require_schema(model.schema, frames.front().schema);
  const WindowKind kind = window_kind_of(model.horizon());
  const auto windows = dataset_windows(data, required_history(model), kind);
  const auto results = forecast_windows(model, frames, windows, level, common.threads);
  const std::string model_id = std::string(to_string(model.kind())) + ":" + ckpt.filename().string();
  const EvalReport report = evaluate_windows(results, model_id, data.spec.id, level, kind);

  const fs::path dir = run_dir(common, "evaluate");
  write_report(report, results, dir);

  m.config_hash = config_hash(model.config);
  m.seeds["train"] = model.seed;
  m.notes = preprocessing_notes(data);
  std::vector<fs::path> inputs{ckpt, sidecar_path(ckpt)};
  inputs.insert(inputs.end(), data.inputs.begin(), data.inputs.end());
  finish_manifest(m, dir, inputs, {dir / "windows.csv", dir / "forecasts.csv", dir / "summary.json"});

  out << "level " << to_string(level) << ", " << report.windows() << " " << to_string(kind) << " windows\n";
  out << "RMSE " << report.rmse_summary.mean << "  MAPE " << report.mape_summary.mean << "  SMAPE "
      << report.smape_summary.mean << '\n';
  out << "report: " << dir.string() << '\n';
  return kExitOk;
}

// ---- compare -----------------------------------------------------------------

struct CompareArgs {
  std::string report_a;
  std::string report_b;
};

int cmd_compare(const CompareArgs& args, const Common& common, std::ostream& out) {
  RunManifest m = begin_manifest("compare", common);
  const EvalReport a = read_report(args.report_a);
  const EvalReport b = read_report(args.report_b);
  const SignificanceResult r = compare_reports(a, b);

  ordered_json j;
  j["a"] = {{"report", args.report_a}, {"model", a.model_id}, {"level", std::string(to_string(a.level))}};
  j["b"] = {{"report", args.report_b}, {"model", b.model_id}, {"level", std::string(to_string(b.level))}};
  j["metric"] = "mape";
  j["windows"] = a.windows();
  j["mean_a"] = r.mean_a;
  j["mean_b"] = r.mean_b;
  j["t"] = r.t;
  j["df"] = r.df;
  j["p"] = r.p;
  j["cohens_d"] = r.cohens_d;

  const fs::path dir = run_dir(common, "compare");
  fs::create_directories(dir);
  const fs::path file = dir / "comparison.json";
  csv::write_file_atomic(file, j.dump(2) + "\n");
  const std::vector<fs::path> inputs{fs::path(args.report_a) / "summary.json", fs::path(args.report_a) / "windows.csv",
                                     fs::path(args.report_b) / "summary.json", fs::path(args.report_b) / "windows.csv"};
  finish_manifest(m, dir, inputs, {file});

  out << "MAPE a " << r.mean_a << " vs b " << r.mean_b << ": t = " << r.t << ", df = " << r.df << ", p = " << r.p
      << ", d = " << r.cohens_d << '\n';
  return kExitOk;
}

// ---- search ------------------------------------------------------------------

struct SearchArgs {
  std::string data;
  std::string model = "tft";
  std::string level = "grid";
  std::string horizon = "day";
  std::string space;
  std::string config;
  std::optional<std::size_t> budget;
  std::optional<std::uint64_t> seed;
  bool strict = false;
  bool emit_space = false;
};

std::string trials_csv(const std::vector<Trial>& trials) {
  std::ostringstream out;
  out << "rank,trial,seed";
  if (!trials.empty()) {
    for (const auto& [name, v] : trials.front().assignment) out << ',' << name;
  }
  out << ",validation_mape,seconds,error\n";
  for (std::size_t r = 0; r < trials.size(); ++r) {
    const auto& t = trials[r];
    out << r + 1 << ',' << t.index << ',' << t.seed;
    for (const auto& [name, v] : t.assignment) out << ',' << csv::format_double(v);
    out << ',' << (t.error.empty() ? csv::format_double(t.validation_mape) : std::string()) << ','
        << csv::format_double(std::round(t.seconds * 1000.0) / 1000.0) << ',';
    std::string msg = t.error;
    for (auto& ch : msg) {
      if (ch == ',' || ch == '\n' || ch == '"') ch = ' ';
    }
    out << msg << '\n';
  }
  return out.str();
}

int cmd_search(const SearchArgs& args, const Common& common, std::ostream& out, std::ostream& err) {
  const ModelKind kind = parse_model_kind(args.model);
  const std::size_t horizon = horizon_from_flag(args.horizon);
  const WindowKind window_kind = window_kind_of(horizon);
  if (args.emit_space) {
    out << search_space_to_json(default_search_space(kind, window_kind));
    return kExitOk;
  }

  RunManifest m = begin_manifest("search", common);
  std::vector<fs::path> inputs;
  SearchSpace space = default_search_space(kind, window_kind);
  if (!args.space.empty()) {
    space = parse_search_space(read_text(args.space));
    inputs.emplace_back(args.space);
    if (space.kind != kind) fail(ErrorCode::ConfigError, "space file is for model '" + std::string(to_string(space.kind)) + "'");
  }
  if (args.budget) space.budget = *args.budget;
  if (args.seed) space.seed = *args.seed;
  validate(space);

  const ModelConfig base = resolve_config(args.model, args.config, args.horizon, inputs);
  const Level level = parse_train_level(args.level);
  const LoadedDataset data = load_dataset(data_root(args.data));
  inputs.insert(inputs.end(), data.inputs.begin(), data.inputs.end());

  // Trials see only the training span, split again 90/10; validation MAPE is
  // scored at grid level (substation forecasts are summed first).
  const auto frames = dataset_frames(data, level);
  const std::size_t train_rows = split_point(data.hierarchy.grid.index(), data.spec.split);
  std::vector<CovariateFrame> inner;
  for (const auto& f : frames) inner.push_back(head_rows(f, train_rows));
  const SplitSpec inner_split = SplitSpec::at_fraction(0.9);
  const Series inner_grid = data.hierarchy.grid.slice(0, train_rows);
  const auto [inner_train, inner_test] = time_split(inner_grid, inner_split);
  const Level score_level = level == Level::grid ? Level::grid : Level::hierarchical;

  const TrialFn run = [&](const ModelConfig& config, std::uint64_t trial_seed) {
    const auto windows =
        enumerate_eval_windows(inner_test, input_window_of(config), window_kind, inner_train.size(), TimeZone::utc());
    const TrainedModel model = train_model(config, inner, inner_split, trial_seed);
    const auto results = forecast_windows(model, inner, windows, score_level, 1);
    return evaluate_windows(results, "trial", data.spec.id, score_level, window_kind).mape_summary.mean;
  };
  if (args.strict) (void)sample_assignments(space, nullptr, true);
  Warnings warnings;
  const auto trials = random_search(space, base, run, common.threads, &warnings);
  for (const auto& w : warnings) err << "warning: " << w << '\n';

  const fs::path dir = run_dir(common, "search");
  fs::create_directories(dir);
  csv::write_file_atomic(dir / "trials.csv", trials_csv(trials));
  csv::write_file_atomic(dir / "space.json", search_space_to_json(space));
  std::vector<fs::path> outputs{dir / "trials.csv", dir / "space.json"};
  if (!trials.empty() && trials.front().error.empty()) {
    csv::write_file_atomic(dir / "best_config.json", to_json(trials.front().config) + "\n");
    outputs.push_back(dir / "best_config.json");
  }

  m.config_hash = config_hash(base);
  m.seeds["search"] = space.seed;
  m.notes = preprocessing_notes(data);
  for (const auto& w : warnings) m.notes.push_back("warning: " + w);
  finish_manifest(m, dir, inputs, outputs);

  out << trials.size() << " trials written to " << (dir / "trials.csv").string() << '\n';
  if (!trials.empty() && trials.front().error.empty()) {
    out << "best (validation MAPE " << trials.front().validation_mape << "): " << to_json(trials.front().config)
        << '\n';
    return kExitOk;
  }
  err << "every trial failed\n";
  return kExitValidation;
}

int exit_code_for(const Error& e) { return e.code() == ErrorCode::IoError ? kExitIo : kExitValidation; }

}  // namespace

std::string search_space_to_json(const SearchSpace& space) {
  ordered_json j;
  j["schema_version"] = 1;
  j["model"] = std::string(to_string(space.kind));
  j["budget"] = space.budget;
  j["seed"] = space.seed;
  j["values"] = ordered_json::object();
  for (const auto& [name, list] : space.values) {
    ordered_json arr = ordered_json::array();
    for (double v : list) {
      if (std::round(v) == v && std::fabs(v) < 1e15) arr.push_back(static_cast<long long>(v));
      else arr.push_back(v);
    }
    j["values"][name] = arr;
  }
  return j.dump(2) + "\n";
}

SearchSpace parse_search_space(std::string_view json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const ordered_json::parse_error& e) {
    fail(ErrorCode::ConfigError, std::string("space file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::ConfigError, "space file must hold a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key != "schema_version" && key != "model" && key != "budget" && key != "seed" && key != "values") {
      fail(ErrorCode::ConfigError, "space file: unknown key '" + key + "'");
    }
  }
  if (!j.contains("schema_version") || j["schema_version"] != 1) {
    fail(ErrorCode::ConfigError, "space file: schema_version must be 1");
  }
  SearchSpace space;
  try {
    space.kind = parse_model_kind(j.at("model").get<std::string>());
    space.budget = j.value("budget", space.budget);
    space.seed = j.value("seed", space.seed);
    for (const auto& [name, list] : j.at("values").items()) {
      space.values.emplace_back(name, list.get<std::vector<double>>());
    }
  } catch (const ordered_json::exception& e) {
    fail(ErrorCode::ConfigError, std::string("space file: ") + e.what());
  }
  validate(space);
  return space;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"gridcast: hierarchical electricity load forecasting", "gridcast"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tool_version()));

  Common common;
  common.arguments = args;
  auto add_common = [&common](CLI::App* sub) {
    sub->add_option("--out", common.out, "Output directory (default runs/<timestamp>-<command>)");
    sub->add_option("--threads", common.threads, "Worker threads; 1 is bit-deterministic")
        ->check(CLI::PositiveNumber);
  };

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic hierarchical dataset");
  add_common(synth_cmd);
  synth_cmd->add_option("--substations", synth.options.generator.n_substations, "Number of substations");
  synth_cmd->add_option("--days", synth.options.generator.n_days, "Number of days");
  synth_cmd->add_option("--seed", synth.options.generator.seed, "Generator seed");
  synth_cmd->add_option("--noise", synth.options.generator.noise_std, "Noise standard deviation (kWh)");
  synth_cmd->add_option("--weather-std", synth.options.generator.weather_std, "Weather anomaly standard deviation");
  synth_cmd->add_option("--temp-sensitivity", synth.options.generator.temp_sensitivity, "Load response to temperature");
  synth_cmd->add_option("--daily-amplitude", synth.options.generator.daily_amplitude, "Daily cycle amplitude");
  synth_cmd->add_option("--weekly-amplitude", synth.options.generator.weekly_amplitude, "Weekly cycle amplitude");
  synth_cmd->add_option("--start", synth.start, "First day, YYYY-MM-DD");
  synth_cmd->add_option("--format", synth.format, "household-long or gefc")
      ->check(CLI::IsMember({"household-long", "gefc"}));
  synth_cmd->add_option("--id", synth.options.id, "Dataset id");

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train a forecaster on a dataset");
  add_common(train_cmd);
  train_cmd->add_option("--data", train.data, "Dataset directory (default $GRIDCAST_DATA_DIR)");
  train_cmd->add_option("--model", train.model, "tft, lstm, arima or naive");
  train_cmd->add_option("--level", train.level, "grid or substation");
  train_cmd->add_option("--horizon", train.horizon, "day (24h) or week (168h)");
  train_cmd->add_option("--config", train.config, "JSON config file");
  train_cmd->add_option("--seed", train.seed, "Training seed");
  train_cmd->add_flag("--per-substation", train.per_substation, "One network per substation");

  EvaluateArgs evaluate;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score a checkpoint on the test windows");
  add_common(eval_cmd);
  eval_cmd->add_option("--checkpoint", evaluate.checkpoint, "Checkpoint file")->required();
  eval_cmd->add_option("--data", evaluate.data, "Dataset directory (default $GRIDCAST_DATA_DIR)");
  eval_cmd->add_option("--level", evaluate.level, "grid or substation (default: from the checkpoint)");
  eval_cmd->add_flag("--aggregate", evaluate.aggregate, "Sum substation forecasts to the grid before scoring");

  CompareArgs compare;
  auto* compare_cmd = app.add_subcommand("compare", "Welch t-test on the per-window MAPE of two reports");
  add_common(compare_cmd);
  compare_cmd->add_option("report_a", compare.report_a, "First report directory")->required();
  compare_cmd->add_option("report_b", compare.report_b, "Second report directory")->required();

  SearchArgs search;
  auto* search_cmd = app.add_subcommand("search", "Random hyperparameter search");
  add_common(search_cmd);
  search_cmd->add_option("--data", search.data, "Dataset directory (default $GRIDCAST_DATA_DIR)");
  search_cmd->add_option("--model", search.model, "tft or lstm");
  search_cmd->add_option("--level", search.level, "grid or substation");
  search_cmd->add_option("--horizon", search.horizon, "day or week");
  search_cmd->add_option("--space", search.space, "Search space JSON file");
  search_cmd->add_option("--config", search.config, "Base config JSON file");
  search_cmd->add_option("--budget", search.budget, "Number of trials");
  search_cmd->add_option("--seed", search.seed, "Search seed");
  search_cmd->add_flag("--strict", search.strict, "Fail when the budget exceeds the space");
  search_cmd->add_flag("--emit-space", search.emit_space, "Print the default space file and exit");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*synth_cmd) return cmd_synth(synth, common, out);
    if (*train_cmd) return cmd_train(train, common, out);
    if (*eval_cmd) return cmd_evaluate(evaluate, common, out);
    if (*compare_cmd) return cmd_compare(compare, common, out);
    if (*search_cmd) return cmd_search(search, common, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const fs::filesystem_error& e) {
    err << "error: IoError: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace gridcast::cli
