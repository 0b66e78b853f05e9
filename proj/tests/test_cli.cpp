#include <doctest.h>

#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "gridcast/cli/cli.hpp"
#include "gridcast/cli/manifest.hpp"
#include "gridcast/eval/report.hpp"
#include "gridcast/models/config.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace gridcast;
using testing::read_file;
using testing::TempDir;
using testing::write_file;

namespace {

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun invoke(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  CliRun run;
  run.code = cli::run_cli(args, out, err);
  run.out = out.str();
  run.err = err.str();
  return run;
}

std::string path(const fs::path& p) { return p.string(); }

// A small dataset with every generator flag spelled out.
CliRun synth(const fs::path& dir, std::size_t substations = 3, std::size_t days = 40, std::uint64_t seed = 7,
             std::vector<std::string> extra = {}) {
  std::vector<std::string> args{"synth",          "--substations", std::to_string(substations),
                                "--days",         std::to_string(days), "--seed",
                                std::to_string(seed), "--out",     path(dir)};
  args.insert(args.end(), extra.begin(), extra.end());
  return invoke(args);
}

// Data files of a run directory, manifest excluded.
std::vector<fs::path> data_files(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().filename() != "manifest.json") {
      files.push_back(fs::relative(entry.path(), dir));
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

void check_identical_trees(const fs::path& a, const fs::path& b) {
  const auto files_a = data_files(a);
  REQUIRE(files_a == data_files(b));
  REQUIRE_FALSE(files_a.empty());
  for (const auto& f : files_a) {
    INFO(f.string());
    CHECK(read_file(a / f) == read_file(b / f));
  }
}

fs::path tiny_tft_config(const fs::path& dir, std::size_t horizon = 24) {
  TFTConfig config;
  config.hidden_size = 8;
  config.attention_heads = 1;
  config.lstm_layers = 1;
  config.input_window = 48;
  config.horizon = horizon;
  config.dropout = 0.0;
  config.batch_size = 32;
  config.learning_rate = 0.01;
  config.schedule.max_epochs = 1;
  config.schedule.window_stride = 6;
  const fs::path file = dir / "tft.json";
  write_file(file, to_json(ModelConfig{config}));
  return file;
}

fs::path tiny_lstm_config(const fs::path& dir) {
  LSTMConfig config;
  config.hidden_size = 4;
  config.num_layers = 1;
  config.input_window = 24;
  config.horizon = 24;
  config.dropout = 0.0;
  config.batch_size = 16;
  config.schedule.max_epochs = 1;
  config.schedule.window_stride = 12;
  const fs::path file = dir / "lstm.json";
  write_file(file, to_json(ModelConfig{config}));
  return file;
}

nlohmann::json read_json(const fs::path& file) { return nlohmann::json::parse(read_file(file)); }

}  // namespace

TEST_CASE("synth writes one file per substation plus temperature, descriptor and manifest") {
  TempDir tmp("cli");
  const CliRun run = synth(tmp.path() / "d", 8, 90, 7);
  REQUIRE(run.code == cli::kExitOk);
  std::size_t substation_files = 0;
  for (const auto& entry : fs::directory_iterator(tmp.path() / "d" / "substations")) {
    substation_files += entry.path().extension() == ".csv";
  }
  CHECK(substation_files == 8);
  CHECK(fs::exists(tmp.path() / "d" / "temperature.csv"));
  CHECK(fs::exists(tmp.path() / "d" / "dataset.json"));
  const auto manifest = cli::read_manifest(tmp.path() / "d" / "manifest.json");
  CHECK(manifest.command == "synth");
  CHECK(manifest.outputs.size() == 10);
  CHECK(manifest.seeds.at("synthetic") == 7);
  for (const auto& digest : manifest.outputs) CHECK(digest.sha256.size() == 64);
}

TEST_CASE("synth reruns with the same seed are byte-identical and other seeds differ") {
  TempDir tmp("cli");
  REQUIRE(synth(tmp.path() / "a").code == 0);
  REQUIRE(synth(tmp.path() / "b").code == 0);
  REQUIRE(synth(tmp.path() / "c", 3, 40, 8).code == 0);
  check_identical_trees(tmp.path() / "a", tmp.path() / "b");
  CHECK(read_file(tmp.path() / "a" / "substations" / "S01.csv") !=
        read_file(tmp.path() / "c" / "substations" / "S01.csv"));
}

TEST_CASE("synth gefc format writes a wide load file") {
  TempDir tmp("cli");
  REQUIRE(synth(tmp.path() / "g", 3, 30, 2, {"--format", "gefc"}).code == 0);
  CHECK(fs::exists(tmp.path() / "g" / "load.csv"));
  CHECK(fs::exists(tmp.path() / "g" / "temperature.csv"));
  CHECK_FALSE(fs::exists(tmp.path() / "g" / "substations"));
}

TEST_CASE("synth into an unwritable location exits with the I/O code") {
  TempDir tmp("cli");
  write_file(tmp.path() / "blocker", "a regular file");
  const CliRun run = synth(tmp.path() / "blocker" / "d");
  CHECK(run.code == cli::kExitIo);
  CHECK(run.err.find("blocker") != std::string::npos);
}

TEST_CASE("unknown flags and missing subcommands are validation errors") {
  CHECK(invoke({}).code == cli::kExitValidation);
  CHECK(invoke({"synth", "--bogus", "1"}).code == cli::kExitValidation);
  CHECK(invoke({"synth", "--format", "parquet"}).code == cli::kExitValidation);
  CHECK(invoke({"evaluate"}).code == cli::kExitValidation);
}

TEST_CASE("train without a dataset names the missing input") {
  TempDir tmp("cli");
  const CliRun run = invoke({"train", "--model", "naive", "--out", path(tmp.path() / "t")});
  CHECK(run.code == cli::kExitValidation);
  CHECK(run.err.find("--data") != std::string::npos);
}

TEST_CASE("train on a missing dataset directory is an I/O failure") {
  TempDir tmp("cli");
  const CliRun run =
      invoke({"train", "--model", "naive", "--data", path(tmp.path() / "absent"), "--out", path(tmp.path() / "t")});
  CHECK(run.code == cli::kExitIo);
}

TEST_CASE("hidden size 0 is rejected naming hidden_size") {
  TempDir tmp("cli");
  REQUIRE(synth(tmp.path() / "d").code == 0);
  auto config = read_json(tiny_tft_config(tmp.path()));
  config["hidden_size"] = 0;
  write_file(tmp.path() / "bad.json", config.dump());
  const CliRun run = invoke({"train", "--data", path(tmp.path() / "d"), "--config", path(tmp.path() / "bad.json"),
                          "--out", path(tmp.path() / "t")});
  CHECK(run.code == cli::kExitValidation);
  CHECK(run.err.find("hidden_size") != std::string::npos);
  CHECK_FALSE(fs::exists(tmp.path() / "t" / "model.ckpt"));
}

TEST_CASE("unknown config keys are hard errors") {
  TempDir tmp("cli");
  REQUIRE(synth(tmp.path() / "d").code == 0);
  auto config = read_json(tiny_tft_config(tmp.path()));
  config["hiden_size"] = 8;
  write_file(tmp.path() / "typo.json", config.dump());
  const CliRun run = invoke({"train", "--data", path(tmp.path() / "d"), "--config", path(tmp.path() / "typo.json"),
                          "--out", path(tmp.path() / "t")});
  CHECK(run.code == cli::kExitValidation);
  CHECK(run.err.find("hiden_size") != std::string::npos);
}

TEST_CASE("train writes checkpoint, sidecar, history, config and manifest") {
  TempDir tmp("cli");
  REQUIRE(synth(tmp.path() / "d").code == 0);
  const fs::path out = tmp.path() / "t";
  const CliRun run = invoke({"train", "--data", path(tmp.path() / "d"), "--config", path(tiny_tft_config(tmp.path())),
                          "--level", "substation", "--horizon", "day", "--out", path(out), "--seed", "4"});
  REQUIRE(run.code == cli::kExitOk);
  CHECK(run.out.find("3 series (1 member") != std::string::npos);
  for (const char* name : {"model.ckpt", "model.ckpt.json", "history.csv", "config.json", "manifest.json"}) {
    CHECK(fs::exists(out / name));
  }
  const auto manifest = cli::read_manifest(out / "manifest.json");
  CHECK(manifest.command == "train");
  CHECK(manifest.seeds.at("train") == 4);
  CHECK(manifest.config_hash.size() == 16);
  CHECK(read_file(out / "history.csv").rfind("member,epoch,train_loss,validation_loss\n", 0) == 0);
}

TEST_CASE("--horizon week sets a 168-hour horizon") {
  TempDir tmp("cli");
  REQUIRE(synth(tmp.path() / "d", 2, 70, 3).code == 0);
  const CliRun run = invoke({"train", "--data", path(tmp.path() / "d"), "--model", "naive", "--horizon", "week",
                          "--out", path(tmp.path() / "t")});
  REQUIRE(run.code == cli::kExitOk);
  CHECK(run.out.find("horizon 168h") != std::string::npos);
  CHECK(read_json(tmp.path() / "t" / "config.json")["horizon"] == 168);
  const CliRun eval = invoke({"evaluate", "--checkpoint", path(tmp.path() / "t" / "model.ckpt"), "--data",
                           path(tmp.path() / "d"), "--out", path(tmp.path() / "e")});
  REQUIRE(eval.code == cli::kExitOk);
  CHECK(read_json(tmp.path() / "e" / "summary.json")["horizon"] == "week");
}

TEST_CASE("--horizon rejects values other than day and week") {
  TempDir tmp("cli");
  REQUIRE(synth(tmp.path() / "d").code == 0);
  const CliRun run = invoke({"train", "--data", path(tmp.path() / "d"), "--model", "naive", "--horizon", "month",
                          "--out", path(tmp.path() / "t")});
  CHECK(run.code == cli::kExitValidation);
}

TEST_CASE("the data directory defaults to GRIDCAST_DATA_DIR") {
  TempDir tmp("cli");
  REQUIRE(synth(tmp.path() / "d").code == 0);
  ::setenv("GRIDCAST_DATA_DIR", path(tmp.path() / "d").c_str(), 1);
  const CliRun run = invoke({"train", "--model", "naive", "--out", path(tmp.path() / "t")});
  ::setenv("GRIDCAST_DATA_DIR", "", 1);
  CHECK(run.code == cli::kExitOk);
}

TEST_CASE("day-ahead evaluation of a periodic dataset with the seasonal naive model has zero MAPE") {
  TempDir tmp("cli");
  REQUIRE(synth(tmp.path() / "d", 3, 42, 5,
                {"--noise", "0", "--temp-sensitivity", "0", "--weather-std", "0"})
              .code == 0);
  REQUIRE(invoke({"train", "--data", path(tmp.path() / "d"), "--model", "naive", "--out", path(tmp.path() / "t")})
              .code == 0);
  REQUIRE(invoke({"evaluate", "--checkpoint", path(tmp.path() / "t" / "model.ckpt"), "--data", path(tmp.path() / "d"),
               "--out", path(tmp.path() / "e")})
              .code == 0);
  const EvalReport report = read_report(tmp.path() / "e");
  REQUIRE(report.windows() > 0);
  for (double mape : report.mape) CHECK(mape < 1e-9);
  CHECK(report.level == Level::grid);
}

TEST_CASE("evaluate lists one row per complete test day") {
  TempDir tmp("cli");
  REQUIRE(synth(tmp.path() / "d", 2, 40, 1).code == 0);
  REQUIRE(invoke({"train", "--data", path(tmp.path() / "d"), "--model", "naive", "--out", path(tmp.path() / "t")})
              .code == 0);
  REQUIRE(invoke({"evaluate", "--checkpoint", path(tmp.path() / "t" / "model.ckpt"), "--data", path(tmp.path() / "d"),
               "--out", path(tmp.path() / "e")})
              .code == 0);
  const EvalReport report = read_report(tmp.path() / "e");
  // Split at 0.8 of 960 hours is hour 768 = midnight of day 32; days 32..39 are complete.
  REQUIRE(report.windows() == 8);
  for (std::size_t w = 0; w < report.windows(); ++w) {
    CHECK(report.starts[w].time_since_epoch().count() % 24 == 0);
    if (w > 0) CHECK(report.starts[w] - report.starts[w - 1] == std::chrono::hours(24));
  }
}

TEST_CASE("--aggregate on a substation checkpoint labels the report hierarchical") {
  TempDir tmp("cli");
  REQUIRE(synth(tmp.path() / "d").code == 0);
  REQUIRE(invoke({"train", "--data", path(tmp.path() / "d"), "--model", "naive", "--level", "substation", "--out",
               path(tmp.path() / "t")})
              .code == 0);
  const CliRun run = invoke({"evaluate", "--checkpoint", path(tmp.path() / "t" / "model.ckpt"), "--data",
                          path(tmp.path() / "d"), "--aggregate", "--out", path(tmp.path() / "e")});
  REQUIRE(run.code == cli::kExitOk);
  CHECK(read_json(tmp.path() / "e" / "summary.json")["level"] == "hierarchical");
  const EvalReport report = read_report(tmp.path() / "e");
  for (const auto& series : report.series) CHECK(series == "grid");

  // Without --aggregate the same checkpoint scores each substation.
  REQUIRE(invoke({"evaluate", "--checkpoint", path(tmp.path() / "t" / "model.ckpt"), "--data", path(tmp.path() / "d"),
               "--out", path(tmp.path() / "s")})
              .code == 0);
  CHECK(read_json(tmp.path() / "s" / "summary.json")["level"] == "substation");
}

TEST_CASE("--aggregate on a grid checkpoint is rejected") {
  TempDir tmp("cli");
  REQUIRE(synth(tmp.path() / "d").code == 0);
  REQUIRE(invoke({"train", "--data", path(tmp.path() / "d"), "--model", "naive", "--out", path(tmp.path() / "t")})
              .code == 0);
  const CliRun run = invoke({"evaluate", "--checkpoint", path(tmp.path() / "t" / "model.ckpt"), "--data",
                          path(tmp.path() / "d"), "--aggregate", "--out", path(tmp.path() / "e")});
  CHECK(run.code == cli::kExitValidation);
}

TEST_CASE("evaluate against a dataset with a different schema is SchemaMismatch") {
  TempDir tmp("cli");
  REQUIRE(synth(tmp.path() / "a").code == 0);
  // The same dataset with an extra past-known incidence column.
  fs::copy(tmp.path() / "a", tmp.path() / "b", fs::copy_options::recursive);
  std::string incidence = "date,incidence\n";
  for (int day = 4; day <= 31; ++day) incidence += "2021-01-" + std::string(day < 10 ? "0" : "") + std::to_string(day) + ",1.5\n";
  for (int day = 1; day <= 12; ++day) incidence += "2021-02-" + std::string(day < 10 ? "0" : "") + std::to_string(day) + ",2\n";
  write_file(tmp.path() / "b" / "incidence.csv", incidence);
  auto spec = read_json(tmp.path() / "b" / "dataset.json");
  spec["incidence"] = "incidence.csv";
  write_file(tmp.path() / "b" / "dataset.json", spec.dump(2));

  REQUIRE(invoke({"train", "--data", path(tmp.path() / "a"), "--config", path(tiny_lstm_config(tmp.path())), "--out",
                  path(tmp.path() / "t")})
              .code == 0);
  const CliRun run = invoke({"evaluate", "--checkpoint", path(tmp.path() / "t" / "model.ckpt"), "--data",
                             path(tmp.path() / "b"), "--out", path(tmp.path() / "e")});
  CHECK(run.code == cli::kExitValidation);
  CHECK(run.err.find("SchemaMismatch") != std::string::npos);
  CHECK(run.err.find("incidence") != std::string::npos);
}

TEST_CASE("a missing checkpoint is an I/O failure") {
  TempDir tmp("cli");
  REQUIRE(synth(tmp.path() / "d").code == 0);
  const CliRun run = invoke({"evaluate", "--checkpoint", path(tmp.path() / "none.ckpt"), "--data",
                          path(tmp.path() / "d"), "--out", path(tmp.path() / "e")});
  CHECK(run.code == cli::kExitIo);
}

TEST_CASE("single-threaded synth, train and evaluate reruns are byte-identical") {
  TempDir tmp("cli");
  const fs::path config = tiny_tft_config(tmp.path());
  for (const char* tag : {"1", "2"}) {
    const fs::path base = tmp.path() / tag;
    REQUIRE(synth(base / "d").code == 0);
    REQUIRE(invoke({"train", "--data", path(base / "d"), "--config", path(config), "--seed", "11", "--threads", "1",
                 "--out", path(base / "t")})
                .code == 0);
    REQUIRE(invoke({"evaluate", "--checkpoint", path(base / "t" / "model.ckpt"), "--data", path(base / "d"),
                 "--threads", "1", "--out", path(base / "e")})
                .code == 0);
  }
  check_identical_trees(tmp.path() / "1" / "d", tmp.path() / "2" / "d");
  check_identical_trees(tmp.path() / "1" / "t", tmp.path() / "2" / "t");
  check_identical_trees(tmp.path() / "1" / "e", tmp.path() / "2" / "e");
}

TEST_CASE("evaluation with several threads matches one thread") {
  TempDir tmp("cli");
  REQUIRE(synth(tmp.path() / "d").code == 0);
  REQUIRE(invoke({"train", "--data", path(tmp.path() / "d"), "--config", path(tiny_lstm_config(tmp.path())), "--level",
               "substation", "--out", path(tmp.path() / "t")})
              .code == 0);
  for (const char* threads : {"1", "3"}) {
    REQUIRE(invoke({"evaluate", "--checkpoint", path(tmp.path() / "t" / "model.ckpt"), "--data",
                 path(tmp.path() / "d"), "--aggregate", "--threads", threads, "--out",
                 path(tmp.path() / (std::string("e") + threads))})
                .code == 0);
  }
  check_identical_trees(tmp.path() / "e1", tmp.path() / "e3");
}

TEST_CASE("manifests record input and output digests") {
  TempDir tmp("cli");
  REQUIRE(synth(tmp.path() / "d").code == 0);
  REQUIRE(invoke({"train", "--data", path(tmp.path() / "d"), "--model", "naive", "--out", path(tmp.path() / "t")})
              .code == 0);
  const auto manifest = cli::read_manifest(tmp.path() / "t" / "manifest.json");
  CHECK_FALSE(manifest.inputs.empty());
  CHECK_FALSE(manifest.started.empty());
  CHECK(manifest.tool_version == std::string(cli::tool_version()));
  for (const auto& digest : manifest.outputs) {
    CHECK(digest.sha256 == cli::sha256_hex(digest.path));
  }
}

TEST_CASE("compare of a report with itself gives t = 0 and p = 1") {
  TempDir tmp("cli");
  REQUIRE(synth(tmp.path() / "d").code == 0);
  REQUIRE(invoke({"train", "--data", path(tmp.path() / "d"), "--model", "naive", "--out", path(tmp.path() / "t")})
              .code == 0);
  REQUIRE(invoke({"evaluate", "--checkpoint", path(tmp.path() / "t" / "model.ckpt"), "--data", path(tmp.path() / "d"),
               "--out", path(tmp.path() / "e")})
              .code == 0);
  const CliRun run = invoke({"compare", path(tmp.path() / "e"), path(tmp.path() / "e"), "--out", path(tmp.path() / "c")});
  REQUIRE(run.code == cli::kExitOk);
  const auto j = read_json(tmp.path() / "c" / "comparison.json");
  CHECK(j["t"] == 0.0);
  CHECK(j["p"] == 1.0);
  CHECK(j["metric"] == "mape");
}

TEST_CASE("compare of reports over different window sets is WindowSetMismatch") {
  TempDir tmp("cli");
  REQUIRE(synth(tmp.path() / "d").code == 0);
  REQUIRE(invoke({"train", "--data", path(tmp.path() / "d"), "--model", "naive", "--out", path(tmp.path() / "t")})
              .code == 0);
  REQUIRE(invoke({"evaluate", "--checkpoint", path(tmp.path() / "t" / "model.ckpt"), "--data", path(tmp.path() / "d"),
               "--out", path(tmp.path() / "e")})
              .code == 0);
  // Dropping the last window leaves a shorter report over a different window set.
  std::istringstream in(read_file(tmp.path() / "e" / "windows.csv"));
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  fs::copy(tmp.path() / "e", tmp.path() / "short");
  std::string shortened;
  for (std::size_t i = 0; i + 1 < lines.size(); ++i) shortened += lines[i] + "\n";
  write_file(tmp.path() / "short" / "windows.csv", shortened);
  auto summary = read_json(tmp.path() / "short" / "summary.json");
  summary["windows"] = summary["windows"].get<int>() - 1;
  write_file(tmp.path() / "short" / "summary.json", summary.dump(2));

  const CliRun run =
      invoke({"compare", path(tmp.path() / "e"), path(tmp.path() / "short"), "--out", path(tmp.path() / "c")});
  CHECK(run.code == cli::kExitValidation);
  CHECK(run.err.find("WindowSetMismatch") != std::string::npos);
}

TEST_CASE("search --emit-space prints the default space") {
  const CliRun run = invoke({"search", "--model", "tft", "--emit-space"});
  REQUIRE(run.code == cli::kExitOk);
  const SearchSpace space = cli::parse_search_space(run.out);
  const SearchSpace defaults = default_search_space(ModelKind::tft, WindowKind::day);
  CHECK(space.values == defaults.values);
  CHECK(space.budget == defaults.budget);
  const CliRun week = invoke({"search", "--model", "lstm", "--horizon", "week", "--emit-space"});
  REQUIRE(week.code == cli::kExitOk);
  CHECK(cli::parse_search_space(week.out).values == default_search_space(ModelKind::lstm, WindowKind::week).values);
}

TEST_CASE("search space files reject unknown keys and hyperparameters") {
  CHECK_ERROR_CODE(cli::parse_search_space(R"({"schema_version":1,"model":"tft","values":{"x":[1]}})"),
                   ErrorCode::ConfigError);
  CHECK_ERROR_CODE(
      cli::parse_search_space(R"({"schema_version":1,"model":"tft","extra":1,"values":{"dropout":[0.1]}})"),
      ErrorCode::ConfigError);
  CHECK_ERROR_CODE(cli::parse_search_space(R"({"model":"tft","values":{"dropout":[0.1]}})"), ErrorCode::ConfigError);
}

TEST_CASE("search with budget 3 writes 3 ranked rows and reruns identically") {
  TempDir tmp("cli");
  REQUIRE(synth(tmp.path() / "d", 2, 40, 9).code == 0);
  write_file(tmp.path() / "space.json",
             R"({"schema_version": 1, "model": "lstm", "budget": 3, "seed": 4,
                 "values": {"learning_rate": [0.001, 0.01, 0.05], "hidden_size": [2, 4]}})");
  const fs::path config = tiny_lstm_config(tmp.path());
  for (const char* tag : {"s1", "s2"}) {
    const CliRun run = invoke({"search", "--data", path(tmp.path() / "d"), "--model", "lstm", "--config", path(config),
                            "--space", path(tmp.path() / "space.json"), "--threads", "1", "--out",
                            path(tmp.path() / tag)});
    REQUIRE(run.code == cli::kExitOk);
    CHECK(run.out.find("3 trials") != std::string::npos);
  }
  const std::string trials = read_file(tmp.path() / "s1" / "trials.csv");
  std::istringstream in(trials);
  std::string header;
  std::getline(in, header);
  CHECK(header == "rank,trial,seed,learning_rate,hidden_size,validation_mape,seconds,error");
  std::size_t rows = 0;
  std::vector<std::string> order_1;
  for (std::string line; std::getline(in, line);) {
    ++rows;
    order_1.push_back(line.substr(0, line.find(",", line.find(",") + 1)));
  }
  CHECK(rows == 3);
  CHECK(fs::exists(tmp.path() / "s1" / "best_config.json"));
  CHECK(read_file(tmp.path() / "s1" / "best_config.json") == read_file(tmp.path() / "s2" / "best_config.json"));

  // Ranking (rank, trial) pairs match across reruns; runtimes may differ.
  std::istringstream again(read_file(tmp.path() / "s2" / "trials.csv"));
  std::getline(again, header);
  std::vector<std::string> order_2;
  for (std::string line; std::getline(again, line);) order_2.push_back(line.substr(0, line.find(",", line.find(",") + 1)));
  CHECK(order_1 == order_2);
}

TEST_CASE("search --strict fails when the budget exceeds the space") {
  TempDir tmp("cli");
  REQUIRE(synth(tmp.path() / "d", 2, 40, 9).code == 0);
  write_file(tmp.path() / "space.json",
             R"({"schema_version": 1, "model": "lstm", "budget": 3, "seed": 4, "values": {"hidden_size": [2]}})");
  const CliRun run = invoke({"search", "--data", path(tmp.path() / "d"), "--model", "lstm", "--config",
                          path(tiny_lstm_config(tmp.path())), "--space", path(tmp.path() / "space.json"), "--strict",
                          "--out", path(tmp.path() / "s")});
  CHECK(run.code == cli::kExitValidation);
  CHECK(run.err.find("BudgetExceedsSpace") != std::string::npos);
}
