#include "gridcast/nn/params.hpp"

#include <cmath>

#include "gridcast/error.hpp"

namespace gridcast::nn {

ParameterStore::ParameterStore(std::uint64_t seed) : seed_(seed), rng_(seed) {}

Parameter& ParameterStore::create(const std::string& name, std::size_t rows, std::size_t cols, std::size_t fan_in) {
  if (params_.contains(name)) fail(ErrorCode::InvalidArgument, "duplicate parameter name '" + name + "'");
  const double bound = 1.0 / std::sqrt(double(fan_in == 0 ? rows : fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Parameter p{Tensor(rows, cols), Tensor(rows, cols)};
  for (auto& v : p.value.values()) v = dist(rng_);
  return params_.emplace(name, std::move(p)).first->second;
}

Parameter& ParameterStore::create_constant(const std::string& name, std::size_t rows, std::size_t cols,
                                           double value) {
  if (params_.contains(name)) fail(ErrorCode::InvalidArgument, "duplicate parameter name '" + name + "'");
  return params_.emplace(name, Parameter{Tensor(rows, cols, value), Tensor(rows, cols)}).first->second;
}

Parameter& ParameterStore::assign(const std::string& name, Tensor value) {
  Tensor grad(value.shape(), std::vector<double>(value.size(), 0.0));
  auto& p = params_[name];
  p.value = std::move(value);
  p.grad = std::move(grad);
  return p;
}

Parameter& ParameterStore::at(const std::string& name) {
  auto it = params_.find(name);
  if (it == params_.end()) fail(ErrorCode::InvalidArgument, "unknown parameter '" + name + "'");
  return it->second;
}

const Parameter& ParameterStore::at(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) fail(ErrorCode::InvalidArgument, "unknown parameter '" + name + "'");
  return it->second;
}

std::vector<std::string> ParameterStore::names() const {
  std::vector<std::string> out;
  out.reserve(params_.size());
  for (const auto& [name, p] : params_) out.push_back(name);
  return out;
}

void ParameterStore::zero_grad() {
  for (auto& [name, p] : params_) p.grad.fill(0.0);
}

std::size_t ParameterStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& [name, p] : params_) n += p.value.size();
  return n;
}

Adam::Adam(AdamConfig config) : config_(config) {
  if (!(config_.learning_rate > 0.0)) fail(ErrorCode::InvalidArgument, "learning rate must be > 0");
}

void Adam::step(ParameterStore& store) {
  ++t_;
  double scale = 1.0;
  if (config_.clip_norm > 0.0) {
    double sq = 0.0;
    for (const auto& [name, p] : store.all()) {
      for (double g : p.grad.values()) sq += g * g;
    }
    const double norm = std::sqrt(sq);
    if (norm > config_.clip_norm) scale = config_.clip_norm / norm;
  }
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, double(t_));
  const double c2 = 1.0 - std::pow(b2, double(t_));
  for (auto& [name, p] : store.all()) {
    auto [it, inserted] = moments_.try_emplace(name);
    auto& [m, v] = it->second;
    if (inserted || m.size() != p.value.size()) {
      m = Tensor(p.value.shape(), std::vector<double>(p.value.size(), 0.0));
      v = m;
    }
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double g = p.grad[i] * scale;
      m[i] = b1 * m[i] + (1.0 - b1) * g;
      v[i] = b2 * v[i] + (1.0 - b2) * g * g;
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      p.value[i] -= config_.learning_rate * m_hat / (std::sqrt(v_hat) + config_.epsilon);
    }
  }
}

void adam_step(ParameterStore& store, Adam& state) { state.step(store); }

}  // namespace gridcast::nn
