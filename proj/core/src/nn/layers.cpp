#include "gridcast/nn/layers.hpp"

#include <cmath>

#include "gridcast/error.hpp"

namespace gridcast::nn {

Var Forward::drop(Var x) const {
  if (!training || dropout <= 0.0) return x;
  if (rng == nullptr) fail(ErrorCode::InvalidArgument, "training-mode dropout needs an rng");
  return nn::dropout(x, dropout, *rng, true);
}

Var dense_forward(Var x, Var weight, Var bias) {
  if (x.cols() != weight.rows()) {
    fail(ErrorCode::ShapeMismatch,
         "dense input " + x.value().shape_string() + " vs weight " + weight.value().shape_string());
  }
  return add_row(matmul(x, weight), bias);
}

Dense::Dense(ParameterStore& store, std::string prefix, std::size_t in, std::size_t out, bool bias)
    : prefix_(std::move(prefix)), in_(in), out_(out), bias_(bias) {
  if (in == 0 || out == 0) fail(ErrorCode::ShapeMismatch, prefix_ + ": zero-width dense layer");
  store.create(prefix_ + ".W", in, out, in);
  if (bias_) store.create(prefix_ + ".b", 1, out, in);
}

Var Dense::operator()(const Forward& fw, Var x) const {
  Var w = fw.param(prefix_ + ".W");
  if (!bias_) {
    if (x.cols() != in_) fail(ErrorCode::ShapeMismatch, prefix_ + ": input " + x.value().shape_string());
    return matmul(x, w);
  }
  return dense_forward(x, w, fw.param(prefix_ + ".b"));
}

GatedLinearUnit::GatedLinearUnit(ParameterStore& store, const std::string& prefix, std::size_t in, std::size_t out)
    : linear_(store, prefix + ".lin", in, out), gate_(store, prefix + ".gate", in, out) {}

GatedLinearUnit::Result GatedLinearUnit::operator()(const Forward& fw, Var x) const {
  Var g = sigmoid(gate_(fw, x));
  return {mul(g, linear_(fw, x)), g};
}

void create_layer_norm(ParameterStore& store, const std::string& prefix, std::size_t width) {
  store.create_constant(prefix + ".gamma", 1, width, 1.0);
  store.create_constant(prefix + ".beta", 1, width, 0.0);
}

Var apply_layer_norm(const Forward& fw, const std::string& prefix, Var x) {
  return layer_norm(x, fw.param(prefix + ".gamma"), fw.param(prefix + ".beta"));
}

GatedResidualNetwork::GatedResidualNetwork(ParameterStore& store, const std::string& prefix, std::size_t in,
                                           std::size_t hidden, std::size_t out, std::size_t context_width)
    : prefix_(prefix), in_(in), out_(out), context_width_(context_width), has_skip_(in != out) {
  if (has_skip_) skip_ = Dense(store, prefix + ".skip", in, out);
  fc1_ = Dense(store, prefix + ".fc1", in, hidden);
  if (context_width > 0) context_ = Dense(store, prefix + ".ctx", context_width, hidden, false);
  fc2_ = Dense(store, prefix + ".fc2", hidden, hidden);
  glu_ = GatedLinearUnit(store, prefix + ".glu", hidden, out);
  create_layer_norm(store, prefix + ".norm", out);
}

GatedResidualNetwork::Result GatedResidualNetwork::operator()(const Forward& fw, Var a, Var context) const {
  if (a.cols() != in_) fail(ErrorCode::ShapeMismatch, prefix_ + ": input " + a.value().shape_string());
  Var hidden = fc1_(fw, a);
  if (context.valid()) {
    if (context_width_ == 0) fail(ErrorCode::ShapeMismatch, prefix_ + ": context given to a context-free GRN");
    if (context.rows() != a.rows() || context.cols() != context_width_) {
      fail(ErrorCode::ShapeMismatch, prefix_ + ": context " + context.value().shape_string());
    }
    hidden = add(hidden, context_(fw, context));
  }
  hidden = fc2_(fw, elu(hidden));
  auto gated = glu_(fw, fw.drop(hidden));
  Var residual = has_skip_ ? skip_(fw, a) : a;
  return {apply_layer_norm(fw, prefix_ + ".norm", add(residual, gated.output)), gated.gate};
}

VariableSelectionNetwork::VariableSelectionNetwork(ParameterStore& store, const std::string& prefix,
                                                   std::size_t n_vars, std::size_t width, std::size_t context_width)
    : width_(width) {
  if (n_vars == 0) fail(ErrorCode::EmptyVariableList, prefix + ": no variables");
  flat_ = GatedResidualNetwork(store, prefix + ".flat", n_vars * width, width, n_vars, context_width);
  per_var_.reserve(n_vars);
  for (std::size_t v = 0; v < n_vars; ++v) {
    per_var_.emplace_back(store, prefix + ".var" + std::to_string(v), width, width, width);
  }
}

VariableSelectionNetwork::Result VariableSelectionNetwork::operator()(const Forward& fw,
                                                                      const std::vector<Var>& embeddings,
                                                                      Var context) const {
  if (embeddings.empty()) fail(ErrorCode::EmptyVariableList, "variable selection over no variables");
  if (embeddings.size() != per_var_.size()) {
    fail(ErrorCode::ShapeMismatch, "expected " + std::to_string(per_var_.size()) + " variables, got " +
                                       std::to_string(embeddings.size()));
  }
  for (const auto& e : embeddings) {
    if (e.cols() != width_ || e.rows() != embeddings.front().rows()) {
      fail(ErrorCode::ShapeMismatch, "variable embedding " + e.value().shape_string());
    }
  }
  Var weights = softmax_rows(flat_(fw, concat_cols(embeddings), context).output);
  std::vector<Var> parts;
  parts.reserve(embeddings.size());
  for (std::size_t v = 0; v < embeddings.size(); ++v) {
    Var processed = per_var_[v](fw, embeddings[v]).output;
    parts.push_back(mul_col(processed, slice_cols(weights, v, 1)));
  }
  Var combined = parts.front();
  for (std::size_t v = 1; v < parts.size(); ++v) combined = add(combined, parts[v]);
  return {combined, weights};
}

LSTMCell::LSTMCell(ParameterStore& store, std::string prefix, std::size_t in, std::size_t hidden)
    : prefix_(std::move(prefix)), in_(in), hidden_(hidden) {
  if (in == 0 || hidden == 0) fail(ErrorCode::ShapeMismatch, prefix_ + ": zero-width LSTM");
  store.create(prefix_ + ".Wx", in, 4 * hidden, hidden);
  store.create(prefix_ + ".Wh", hidden, 4 * hidden, hidden);
  store.create(prefix_ + ".b", 1, 4 * hidden, hidden);
}

LSTMCell::State LSTMCell::operator()(const Forward& fw, Var x, State prev) const {
  if (x.cols() != in_ || prev.h.cols() != hidden_ || prev.c.cols() != hidden_ || prev.h.rows() != x.rows()) {
    fail(ErrorCode::ShapeMismatch, prefix_ + ": input " + x.value().shape_string() + " state " +
                                       prev.h.value().shape_string());
  }
  Var z = add_row(add(matmul(x, fw.param(prefix_ + ".Wx")), matmul(prev.h, fw.param(prefix_ + ".Wh"))),
                  fw.param(prefix_ + ".b"));
  const std::size_t h = hidden_;
  Var i = sigmoid(slice_cols(z, 0, h));
  Var f = sigmoid(slice_cols(z, h, h));
  Var g = tanh(slice_cols(z, 2 * h, h));
  Var o = sigmoid(slice_cols(z, 3 * h, h));
  Var c = add(mul(f, prev.c), mul(i, g));
  return {mul(o, tanh(c)), c};
}

std::vector<LSTMCell::State> LSTMCell::unroll(const Forward& fw, const std::vector<Var>& xs, State init) const {
  std::vector<State> out;
  out.reserve(xs.size());
  State s = init;
  for (const auto& x : xs) {
    s = (*this)(fw, x, s);
    out.push_back(s);
  }
  return out;
}

StackedLSTM::StackedLSTM(ParameterStore& store, const std::string& prefix, std::size_t in, std::size_t hidden,
                         std::size_t layers) {
  if (layers == 0) fail(ErrorCode::ShapeMismatch, prefix + ": zero LSTM layers");
  for (std::size_t l = 0; l < layers; ++l) {
    cells_.emplace_back(store, prefix + ".l" + std::to_string(l), l == 0 ? in : hidden, hidden);
  }
}

StackedLSTM::Result StackedLSTM::operator()(const Forward& fw, const std::vector<Var>& xs,
                                            const std::vector<LSTMCell::State>& init) const {
  if (init.size() != cells_.size()) fail(ErrorCode::ShapeMismatch, "LSTM init state count differs from layers");
  Result r;
  std::vector<Var> seq = xs;
  for (std::size_t l = 0; l < cells_.size(); ++l) {
    if (l > 0) {
      for (auto& v : seq) v = fw.drop(v);
    }
    auto states = cells_[l].unroll(fw, seq, init[l]);
    for (std::size_t t = 0; t < seq.size(); ++t) seq[t] = states[t].h;
    r.finals.push_back(states.empty() ? init[l] : states.back());
  }
  r.outputs = std::move(seq);
  return r;
}

InterpretableAttention::InterpretableAttention(ParameterStore& store, std::string prefix, std::size_t width,
                                               std::size_t heads)
    : prefix_(std::move(prefix)), width_(width), heads_(heads) {
  if (heads == 0 || width % heads != 0) {
    fail(ErrorCode::ShapeMismatch, prefix_ + ": width " + std::to_string(width) + " not divisible by " +
                                       std::to_string(heads) + " heads");
  }
  head_width_ = width / heads;
  for (std::size_t h = 0; h < heads; ++h) {
    store.create(prefix_ + ".q" + std::to_string(h), width, head_width_, width);
    store.create(prefix_ + ".k" + std::to_string(h), width, head_width_, width);
  }
  store.create(prefix_ + ".v", width, head_width_, width);
  store.create(prefix_ + ".o", head_width_, width, head_width_);
}

std::vector<std::uint8_t> causal_mask(std::size_t n_query, std::size_t n_key, std::size_t offset) {
  std::vector<std::uint8_t> mask(n_query * n_key, 0);
  for (std::size_t r = 0; r < n_query; ++r) {
    for (std::size_t c = 0; c < n_key && c <= offset + r; ++c) mask[r * n_key + c] = 1;
  }
  return mask;
}

InterpretableAttention::Result InterpretableAttention::operator()(const Forward& fw, Var query, Var key, Var value,
                                                                  const std::vector<std::uint8_t>& mask) const {
  if (query.cols() != width_ || key.cols() != width_ || value.cols() != width_ || key.rows() != value.rows()) {
    fail(ErrorCode::ShapeMismatch, prefix_ + ": q " + query.value().shape_string() + " k " +
                                       key.value().shape_string() + " v " + value.value().shape_string());
  }
  const std::size_t nq = query.rows(), nk = key.rows();
  if (!mask.empty() && mask.size() != nq * nk) fail(ErrorCode::ShapeMismatch, prefix_ + ": mask shape");
  const double inv_sqrt = 1.0 / std::sqrt(double(head_width_));
  Var v = matmul(value, fw.param(prefix_ + ".v"));
  Result r;
  std::vector<Var> heads;
  for (std::size_t h = 0; h < heads_; ++h) {
    Var q = matmul(query, fw.param(prefix_ + ".q" + std::to_string(h)));
    Var k = matmul(key, fw.param(prefix_ + ".k" + std::to_string(h)));
    Var scores = scale(matmul_nt(q, k), inv_sqrt);
    Var attn = mask.empty() ? softmax_rows(scores) : masked_softmax_rows(scores, mask);
    r.per_head.push_back(attn.value());
    heads.push_back(matmul(fw.drop(attn), v));
  }
  Var mixed = heads.size() == 1 ? heads.front() : mean_of(heads);
  r.output = matmul(mixed, fw.param(prefix_ + ".o"));
  r.weights = Tensor(nq, nk);
  for (const auto& w : r.per_head) {
    for (std::size_t i = 0; i < w.size(); ++i) r.weights[i] += w[i] / double(heads_);
  }
  return r;
}

GateAddNorm::GateAddNorm(ParameterStore& store, const std::string& prefix, std::size_t in, std::size_t out)
    : prefix_(prefix), glu_(store, prefix + ".glu", in, out) {
  create_layer_norm(store, prefix + ".norm", out);
}

GatedLinearUnit::Result GateAddNorm::operator()(const Forward& fw, Var x, Var residual) const {
  auto gated = glu_(fw, fw.drop(x));
  return {apply_layer_norm(fw, prefix_ + ".norm", add(residual, gated.output)), gated.gate};
}

}  // namespace gridcast::nn
