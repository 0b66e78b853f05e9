#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "gridcast/ingest.hpp"
#include "gridcast/models/config.hpp"
#include "gridcast/series.hpp"

namespace gridcast {

// Named discrete value lists; each trial draws one value per name.
struct SearchSpace {
  ModelKind kind = ModelKind::tft;
  std::vector<std::pair<std::string, std::vector<double>>> values;
  std::size_t budget = 10;
  std::uint64_t seed = 0;

  // Product of the list sizes.
  double size() const;
};

// Tuning ranges per model kind, including the input window lists for the
// day-ahead and week-ahead horizons.
SearchSpace default_search_space(ModelKind kind, WindowKind horizon);

// Throws ConfigError for empty lists or names the model does not accept.
void validate(const SearchSpace& space);

using Assignment = std::vector<std::pair<std::string, double>>;

// Draws `budget` assignments, rejecting duplicates. When the budget exceeds
// the space, repeats are allowed and a BudgetExceedsSpace warning is added
// (or, with strict, the error is thrown).
std::vector<Assignment> sample_assignments(const SearchSpace& space, Warnings* warnings = nullptr,
                                           bool strict = false);

// Applies an assignment to a base config; integers are rounded.
ModelConfig apply_assignment(const ModelConfig& base, const Assignment& assignment);

struct Trial {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  Assignment assignment;
  ModelConfig config;
  double validation_mape = 0.0;
  double seconds = 0.0;
  std::string error;  // non-empty when the trial failed
};

// Trains and scores one configuration; returns the validation MAPE.
using TrialFn = std::function<double(const ModelConfig& config, std::uint64_t trial_seed)>;

// Runs every sampled trial (trial_seed = derive_seed(seed, index)) and ranks
// them by validation MAPE, failed trials last, ties by index. Results do not
// depend on `threads`.
std::vector<Trial> random_search(const SearchSpace& space, const ModelConfig& base, const TrialFn& run,
                                 std::size_t threads = 1, Warnings* warnings = nullptr);

}  // namespace gridcast
