#include "gridcast/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "gridcast/error.hpp"

namespace gridcast::nn {

double relative_error(double analytic, double numeric) noexcept {
  return std::abs(analytic - numeric) / std::max(1e-8, std::abs(analytic) + std::abs(numeric));
}

namespace {

void check_eps(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) fail(ErrorCode::InvalidArgument, "finite-difference step must be > 0");
}

void note(GradCheckResult& r, const std::string& name, std::size_t i, double analytic, double numeric) {
  ++r.coordinates;
  const double err = relative_error(analytic, numeric);
  if (err > r.max_relative_error || r.coordinates == 1) {
    r.max_relative_error = err;
    r.worst_parameter = name;
    r.worst_index = i;
    r.worst_analytic = analytic;
    r.worst_numeric = numeric;
  }
}

}  // namespace

GradCheckResult grad_check(const LossBuilder& loss, ParameterStore& store, double eps, std::size_t stride) {
  check_eps(eps);
  stride = std::max<std::size_t>(stride, 1);
  store.zero_grad();
  {
    Tape tape;
    tape.backward(loss(tape, store));
  }
  auto eval = [&] {
    Tape tape;
    return loss(tape, store).value()[0];
  };
  GradCheckResult r;
  std::size_t counter = 0;
  for (auto& [name, p] : store.all()) {
    for (std::size_t i = 0; i < p.value.size(); ++i, ++counter) {
      if (counter % stride != 0) continue;
      const double saved = p.value[i];
      p.value[i] = saved + eps;
      const double up = eval();
      p.value[i] = saved - eps;
      const double down = eval();
      p.value[i] = saved;
      note(r, name, i, p.grad[i], (up - down) / (2.0 * eps));
    }
  }
  return r;
}

GradCheckResult grad_check_inputs(const std::function<Var(Tape&, const std::vector<Var>&)>& loss,
                                  std::vector<Tensor>& inputs, double eps) {
  check_eps(eps);
  auto run = [&](bool grads) {
    Tape tape;
    std::vector<Var> vars;
    for (const auto& t : inputs) vars.push_back(tape.constant(t));
    Var l = loss(tape, vars);
    std::vector<Tensor> out;
    if (grads) {
      tape.backward(l);
      for (const auto& v : vars) {
        const Tensor* g = tape.grad_if_any(v);
        out.push_back(g ? *g : Tensor(v.rows(), v.cols()));
      }
    }
    return std::make_pair(l.value()[0], out);
  };
  const auto analytic = run(true).second;
  GradCheckResult r;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    for (std::size_t i = 0; i < inputs[k].size(); ++i) {
      const double saved = inputs[k][i];
      inputs[k][i] = saved + eps;
      const double up = run(false).first;
      inputs[k][i] = saved - eps;
      const double down = run(false).first;
      inputs[k][i] = saved;
      note(r, "input" + std::to_string(k), i, analytic[k][i], (up - down) / (2.0 * eps));
    }
  }
  return r;
}

}  // namespace gridcast::nn
