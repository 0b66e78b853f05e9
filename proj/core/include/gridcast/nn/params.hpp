#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "gridcast/nn/tensor.hpp"

namespace gridcast::nn {

struct Parameter {
  Tensor value;
  Tensor grad;
};

// Named parameters with same-shaped gradient slots. Initialization draws
// from an RNG seeded once at construction, so creation order fixes values.
class ParameterStore {
 public:
  explicit ParameterStore(std::uint64_t seed = 0);

  // uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)); fan_in = rows when omitted.
  Parameter& create(const std::string& name, std::size_t rows, std::size_t cols, std::size_t fan_in = 0);
  Parameter& create_constant(const std::string& name, std::size_t rows, std::size_t cols, double value);
  // Inserts (or replaces) a parameter with a given value; used by checkpoint loading.
  Parameter& assign(const std::string& name, Tensor value);

  bool contains(const std::string& name) const { return params_.contains(name); }
  Parameter& at(const std::string& name);
  const Parameter& at(const std::string& name) const;

  std::vector<std::string> names() const;
  const std::map<std::string, Parameter>& all() const noexcept { return params_; }
  std::map<std::string, Parameter>& all() noexcept { return params_; }

  void zero_grad();
  std::size_t scalar_count() const;
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 rng_;
  std::map<std::string, Parameter> params_;
};

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Rescale the global gradient norm to at most this value; <= 0 disables.
  double clip_norm = 0.0;
};

// Adam with bias correction; moment buffers keyed by parameter name.
class Adam {
 public:
  explicit Adam(AdamConfig config = {});

  void step(ParameterStore& store);
  std::size_t steps() const noexcept { return t_; }
  const AdamConfig& config() const noexcept { return config_; }

 private:
  AdamConfig config_;
  std::size_t t_ = 0;
  std::map<std::string, std::pair<Tensor, Tensor>> moments_;
};

void adam_step(ParameterStore& store, Adam& state);

}  // namespace gridcast::nn
