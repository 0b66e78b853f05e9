#include "gridcast/eval/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <thread>

#include "gridcast/error.hpp"
#include "gridcast/models/windows.hpp"

namespace gridcast {

double SearchSpace::size() const {
  double n = 1.0;
  for (const auto& [name, list] : values) n *= double(list.size());
  return n;
}

SearchSpace default_search_space(ModelKind kind, WindowKind horizon) {
  SearchSpace s;
  s.kind = kind;
  const std::vector<double> day_windows{24, 48, 72, 168, 336, 672};
  const std::vector<double> week_windows{168, 336, 504, 672};
  const auto& windows = horizon == WindowKind::day ? day_windows : week_windows;
  if (kind == ModelKind::tft) {
    s.values = {{"attention_heads", {1, 4}},
                {"hidden_size", {16, 32, 64}},
                {"dropout", {0.1, 0.3}},
                {"batch_size", {32, 128}},
                {"lstm_layers", {1, 2, 4}},
                {"input_window", windows}};
  } else if (kind == ModelKind::lstm) {
    s.values = {{"batch_size", {50, 10, 120, 150}},
                {"learning_rate", {0.001, 0.01, 0.1}},
                {"dropout", {0.1, 0.2, 0.3}},
                {"num_layers", {1, 2, 4}},
                {"hidden_size", {64, 128, 248, 496}},
                {"input_window", windows}};
  } else {
    fail(ErrorCode::ConfigError, "no search space for model '" + std::string(to_string(kind)) + "'");
  }
  return s;
}

namespace {

const std::set<std::string>& accepted_names(ModelKind kind) {
  static const std::set<std::string> tft{"attention_heads", "hidden_size", "dropout",      "batch_size",
                                         "lstm_layers",     "input_window", "learning_rate"};
  static const std::set<std::string> lstm{"batch_size", "learning_rate", "dropout",
                                          "num_layers", "hidden_size",   "input_window"};
  if (kind == ModelKind::tft) return tft;
  if (kind == ModelKind::lstm) return lstm;
  fail(ErrorCode::ConfigError, "random search supports tft and lstm");
}

std::size_t as_count(const std::string& name, double v) {
  if (!(v >= 0.0) || std::round(v) != v) fail(ErrorCode::ConfigError, name + " takes whole numbers, got " + std::to_string(v));
  return static_cast<std::size_t>(v);
}

}  // namespace

void validate(const SearchSpace& space) {
  const auto& names = accepted_names(space.kind);
  if (space.values.empty()) fail(ErrorCode::ConfigError, "search space lists no hyperparameters");
  if (space.budget == 0) fail(ErrorCode::ConfigError, "budget must be >= 1");
  std::set<std::string> seen;
  for (const auto& [name, list] : space.values) {
    if (!names.contains(name)) fail(ErrorCode::ConfigError, "search space: unknown hyperparameter '" + name + "'");
    if (!seen.insert(name).second) fail(ErrorCode::ConfigError, "search space: '" + name + "' listed twice");
    if (list.empty()) fail(ErrorCode::ConfigError, "search space: '" + name + "' has an empty value list");
  }
}

std::vector<Assignment> sample_assignments(const SearchSpace& space, Warnings* warnings, bool strict) {
  validate(space);
  const bool repeats = double(space.budget) > space.size();
  if (repeats) {
    const std::string msg = "BudgetExceedsSpace: budget " + std::to_string(space.budget) + " exceeds the " +
                            std::to_string(static_cast<long long>(space.size())) +
                            " distinct configurations; repeats allowed";
    if (strict) fail(ErrorCode::BudgetExceedsSpace, msg);
    if (warnings) warnings->push_back(msg);
  }
  std::mt19937_64 rng(space.seed);
  std::set<std::vector<std::size_t>> drawn;
  std::vector<Assignment> out;
  while (out.size() < space.budget) {
    std::vector<std::size_t> pick;
    for (const auto& [name, list] : space.values) pick.push_back(static_cast<std::size_t>(rng() % list.size()));
    if (!drawn.insert(pick).second && !repeats) continue;
    Assignment a;
    for (std::size_t i = 0; i < pick.size(); ++i) a.emplace_back(space.values[i].first, space.values[i].second[pick[i]]);
    out.push_back(std::move(a));
  }
  return out;
}

ModelConfig apply_assignment(const ModelConfig& base, const Assignment& assignment) {
  ModelConfig config = base;
  for (const auto& [name, v] : assignment) {
    if (auto* c = std::get_if<TFTConfig>(&config)) {
      if (name == "attention_heads") c->attention_heads = as_count(name, v);
      else if (name == "hidden_size") c->hidden_size = as_count(name, v);
      else if (name == "dropout") c->dropout = v;
      else if (name == "batch_size") c->batch_size = as_count(name, v);
      else if (name == "lstm_layers") c->lstm_layers = as_count(name, v);
      else if (name == "input_window") c->input_window = as_count(name, v);
      else if (name == "learning_rate") c->learning_rate = v;
      else fail(ErrorCode::ConfigError, "tft has no hyperparameter '" + name + "'");
    } else if (auto* c = std::get_if<LSTMConfig>(&config)) {
      if (name == "batch_size") c->batch_size = as_count(name, v);
      else if (name == "learning_rate") c->learning_rate = v;
      else if (name == "dropout") c->dropout = v;
      else if (name == "num_layers") c->num_layers = as_count(name, v);
      else if (name == "hidden_size") c->hidden_size = as_count(name, v);
      else if (name == "input_window") c->input_window = as_count(name, v);
      else fail(ErrorCode::ConfigError, "lstm has no hyperparameter '" + name + "'");
    } else {
      fail(ErrorCode::ConfigError, "random search supports tft and lstm");
    }
  }
  validate(config);
  return config;
}

std::vector<Trial> random_search(const SearchSpace& space, const ModelConfig& base, const TrialFn& run,
                                 std::size_t threads, Warnings* warnings) {
  if (kind_of(base) != space.kind) fail(ErrorCode::ConfigError, "base config kind differs from the search space");
  const auto assignments = sample_assignments(space, warnings);
  std::vector<Trial> trials(assignments.size());
  for (std::size_t i = 0; i < trials.size(); ++i) {
    trials[i].index = i;
    trials[i].seed = derive_seed(space.seed, i);
    trials[i].assignment = assignments[i];
    trials[i].config = apply_assignment(base, assignments[i]);
  }
  auto run_one = [&](Trial& t) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      t.validation_mape = run(t.config, t.seed);
    } catch (const Error& e) {
      t.error = e.what();
      t.validation_mape = std::numeric_limits<double>::infinity();
    }
    t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  threads = std::clamp<std::size_t>(threads, 1, trials.size());
  if (threads == 1) {
    for (auto& t : trials) run_one(t);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (std::size_t w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < trials.size(); i += threads) run_one(trials[i]);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  std::stable_sort(trials.begin(), trials.end(), [](const Trial& a, const Trial& b) {
    if (a.error.empty() != b.error.empty()) return a.error.empty();
    return a.validation_mape < b.validation_mape;
  });
  return trials;
}

}  // namespace gridcast
