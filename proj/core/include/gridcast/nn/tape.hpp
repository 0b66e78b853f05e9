#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gridcast/nn/params.hpp"
#include "gridcast/nn/tensor.hpp"

namespace gridcast::nn {

class Tape;

// Handle to a value recorded on a Tape.
class Var {
 public:
  Var() = default;

  bool valid() const noexcept { return tape_ != nullptr; }
  Tape& tape() const noexcept { return *tape_; }
  std::size_t id() const noexcept { return id_; }
  const Tensor& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}
  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

// Records operations in creation order (a topological order) and replays
// them in reverse for reverse-mode differentiation.
class Tape {
 public:
  using Backward = std::function<void(Tape&, std::size_t self)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  // Leaf bound to a store entry; repeated calls return the same Var. After
  // backward() its gradient is added into the store's gradient slot.
  Var parameter(ParameterStore& store, const std::string& name);

  Var record(Tensor value, Backward backward);

  const Tensor& value(std::size_t id) const { return nodes_[id].value; }
  const Tensor& value(Var v) const { return nodes_[v.id()].value; }
  // Gradient slot of node `id`, zero-allocated on first access.
  Tensor& grad(std::size_t id);
  bool has_grad(std::size_t id) const { return !nodes_[id].grad.empty(); }
  const Tensor* grad_if_any(Var v) const;

  // Seeds d(loss)/d(loss) = 1; loss must be 1x1.
  void backward(Var loss);

  std::size_t size() const noexcept { return nodes_.size(); }
  std::size_t last_backward_visits() const noexcept { return visits_; }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    Backward backward;
    Parameter* param = nullptr;
  };
  std::vector<Node> nodes_;
  std::map<std::pair<const ParameterStore*, std::string>, std::size_t> param_cache_;
  std::size_t visits_ = 0;
};

// ---- differentiable kernels ------------------------------------------------

Var matmul(Var a, Var b);     // [n x k] * [k x m]
Var matmul_nt(Var a, Var b);  // [n x k] * [m x k]^T
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);        // elementwise
Var add_row(Var a, Var row);  // row [1 x m] broadcast over rows of a
Var mul_col(Var a, Var col);  // col [n x 1] broadcast over columns of a
Var scale(Var a, double s);
Var add_scalar(Var a, double s);

Var sigmoid(Var a);
Var tanh(Var a);
Var elu(Var a);

Var softmax_rows(Var a);
// Masked positions (mask[r*cols+c] == 0) get probability exactly 0. Throws
// MaskAllBlocked if a row has no open position.
Var masked_softmax_rows(Var a, std::vector<std::uint8_t> mask);

// (x - mean) / sqrt(var + eps) * gamma + beta, per row.
Var layer_norm(Var x, Var gamma, Var beta, double eps = 1e-5);

Var concat_cols(std::span<const Var> parts);
Var slice_cols(Var a, std::size_t begin, std::size_t count);
Var concat_rows(std::span<const Var> parts);
Var slice_rows(Var a, std::size_t begin, std::size_t count);
Var gather_rows(Var a, std::vector<std::size_t> rows);
// [n x m] -> [times*n x m], row r copies a[r % n].
Var tile_rows(Var a, std::size_t times);
Var mean_of(std::span<const Var> parts);
// Same row-major values viewed as [rows x cols].
Var reshape(Var a, std::size_t rows, std::size_t cols);

Var sum(Var a);
Var mean(Var a);
Var mse_loss(Var pred, Var target);

// Inverted dropout: identity when !training or rate == 0.
Var dropout(Var a, double rate, std::mt19937_64& rng, bool training);

}  // namespace gridcast::nn
