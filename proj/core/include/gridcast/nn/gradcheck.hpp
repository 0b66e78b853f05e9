#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gridcast/nn/params.hpp"
#include "gridcast/nn/tape.hpp"

namespace gridcast::nn {

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t coordinates = 0;
};

// Builds a scalar loss on the supplied tape from the store's parameters.
using LossBuilder = std::function<Var(Tape&, ParameterStore&)>;

// Compares backward() against central differences (f(p+eps)-f(p-eps))/(2 eps)
// for every parameter coordinate, or every `stride`-th one when stride > 1.
// The relative error denominator is max(1e-8, |analytic| + |numeric|).
// The store's values are restored; its gradients hold the analytic result.
GradCheckResult grad_check(const LossBuilder& loss, ParameterStore& store, double eps = 1e-5,
                           std::size_t stride = 1);

// Same check on a loss of plain tensors: gradients w.r.t. `inputs`.
GradCheckResult grad_check_inputs(const std::function<Var(Tape&, const std::vector<Var>&)>& loss,
                                  std::vector<Tensor>& inputs, double eps = 1e-5);

double relative_error(double analytic, double numeric) noexcept;

}  // namespace gridcast::nn
