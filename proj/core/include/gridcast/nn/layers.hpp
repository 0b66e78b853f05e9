#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "gridcast/nn/params.hpp"
#include "gridcast/nn/tape.hpp"

namespace gridcast::nn {

// Everything a forward pass needs besides its inputs. Dropout is active only
// when training is true and dropout > 0.
struct Forward {
  Tape& tape;
  ParameterStore& store;
  bool training = false;
  double dropout = 0.0;
  std::mt19937_64* rng = nullptr;

  Var param(const std::string& name) const { return tape.parameter(store, name); }
  Var drop(Var x) const;
};

// y = xW + b.
Var dense_forward(Var x, Var weight, Var bias);

class Dense {
 public:
  Dense() = default;
  Dense(ParameterStore& store, std::string prefix, std::size_t in, std::size_t out, bool bias = true);

  Var operator()(const Forward& fw, Var x) const;
  std::size_t in() const noexcept { return in_; }
  std::size_t out() const noexcept { return out_; }
  const std::string& prefix() const noexcept { return prefix_; }

 private:
  std::string prefix_;
  std::size_t in_ = 0;
  std::size_t out_ = 0;
  bool bias_ = true;
};

// GLU(x) = sigmoid(x Wg + bg) * (x Wl + bl).
class GatedLinearUnit {
 public:
  GatedLinearUnit() = default;
  GatedLinearUnit(ParameterStore& store, const std::string& prefix, std::size_t in, std::size_t out);

  struct Result {
    Var output;
    Var gate;
  };
  Result operator()(const Forward& fw, Var x) const;

 private:
  Dense linear_;
  Dense gate_;
};

// LayerNorm(skip(a) + GLU(dropout(W2 ELU(W1 a + Wc c + b1) + b2))).
class GatedResidualNetwork {
 public:
  GatedResidualNetwork() = default;
  GatedResidualNetwork(ParameterStore& store, const std::string& prefix, std::size_t in, std::size_t hidden,
                       std::size_t out, std::size_t context_width = 0);

  struct Result {
    Var output;
    Var gate;
  };
  // context, when valid, must have the same row count as a.
  Result operator()(const Forward& fw, Var a, Var context = {}) const;
  std::size_t out() const noexcept { return out_; }

 private:
  std::string prefix_;
  std::size_t in_ = 0;
  std::size_t out_ = 0;
  std::size_t context_width_ = 0;
  bool has_skip_ = false;
  Dense skip_;
  Dense fc1_;
  Dense context_;
  Dense fc2_;
  GatedLinearUnit glu_;
};

// Softmax-weighted combination of per-variable GRN outputs.
class VariableSelectionNetwork {
 public:
  VariableSelectionNetwork() = default;
  VariableSelectionNetwork(ParameterStore& store, const std::string& prefix, std::size_t n_vars, std::size_t width,
                           std::size_t context_width = 0);

  struct Result {
    Var combined;  // [rows x width]
    Var weights;   // [rows x n_vars], rows are simplex vectors
  };
  Result operator()(const Forward& fw, const std::vector<Var>& embeddings, Var context = {}) const;
  std::size_t variables() const noexcept { return per_var_.size(); }

 private:
  std::size_t width_ = 0;
  GatedResidualNetwork flat_;
  std::vector<GatedResidualNetwork> per_var_;
};

// Gate order in the packed weights: input, forget, candidate, output.
class LSTMCell {
 public:
  LSTMCell() = default;
  LSTMCell(ParameterStore& store, std::string prefix, std::size_t in, std::size_t hidden);

  struct State {
    Var h;
    Var c;
  };
  State operator()(const Forward& fw, Var x, State prev) const;
  // Runs the cell over xs with shared parameters; returns every hidden state.
  std::vector<State> unroll(const Forward& fw, const std::vector<Var>& xs, State init) const;

  std::size_t hidden() const noexcept { return hidden_; }
  const std::string& prefix() const noexcept { return prefix_; }

 private:
  std::string prefix_;
  std::size_t in_ = 0;
  std::size_t hidden_ = 0;
};

// Stacked LSTM over a time-major sequence; dropout between layers.
class StackedLSTM {
 public:
  StackedLSTM() = default;
  StackedLSTM(ParameterStore& store, const std::string& prefix, std::size_t in, std::size_t hidden,
              std::size_t layers);

  struct Result {
    std::vector<Var> outputs;             // top-layer h per step
    std::vector<LSTMCell::State> finals;  // per layer
  };
  Result operator()(const Forward& fw, const std::vector<Var>& xs, const std::vector<LSTMCell::State>& init) const;
  std::size_t layers() const noexcept { return cells_.size(); }
  std::size_t hidden() const noexcept { return cells_.empty() ? 0 : cells_.front().hidden(); }

 private:
  std::vector<LSTMCell> cells_;
};

// Multi-head attention whose value projection is shared by all heads; head
// outputs are averaged, then projected back to the model width.
class InterpretableAttention {
 public:
  InterpretableAttention() = default;
  InterpretableAttention(ParameterStore& store, std::string prefix, std::size_t width, std::size_t heads);

  struct Result {
    Var output;                    // [n_query x width]
    std::vector<Tensor> per_head;  // [n_query x n_key] each
    Tensor weights;                // head mean, rows are simplex vectors
  };
  // mask[r * n_key + c] == 0 blocks key c for query r; an empty mask opens all.
  Result operator()(const Forward& fw, Var query, Var key, Var value, const std::vector<std::uint8_t>& mask) const;

  std::size_t heads() const noexcept { return heads_; }
  std::size_t head_width() const noexcept { return head_width_; }

 private:
  std::string prefix_;
  std::size_t width_ = 0;
  std::size_t heads_ = 0;
  std::size_t head_width_ = 0;
};

// mask[r * n_key + c] = 1 iff key c is at or before query r's position, with
// query r sitting at key position offset + r.
std::vector<std::uint8_t> causal_mask(std::size_t n_query, std::size_t n_key, std::size_t offset);

// LayerNorm(residual + GLU(dropout(x))).
class GateAddNorm {
 public:
  GateAddNorm() = default;
  GateAddNorm(ParameterStore& store, const std::string& prefix, std::size_t in, std::size_t out);

  GatedLinearUnit::Result operator()(const Forward& fw, Var x, Var residual) const;

 private:
  std::string prefix_;
  GatedLinearUnit glu_;
};

// Layer norm with learned affine parameters named prefix.gamma / prefix.beta.
void create_layer_norm(ParameterStore& store, const std::string& prefix, std::size_t width);
Var apply_layer_norm(const Forward& fw, const std::string& prefix, Var x);

}  // namespace gridcast::nn
