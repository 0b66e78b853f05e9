#include "gridcast/nn/tape.hpp"

#include <algorithm>
#include <cmath>

#include "gridcast/error.hpp"

namespace gridcast::nn {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::ShapeMismatch, what);
}

void require_same_tape(Var a, Var b) {
  if (!a.valid() || !b.valid() || &a.tape() != &b.tape()) {
    fail(ErrorCode::InvalidArgument, "operands live on different tapes");
  }
}

Tensor zeros_like(const Tensor& t) { return Tensor(t.rows(), t.cols()); }

}  // namespace

const Tensor& Var::value() const { return tape_->value(id_); }

Var Tape::constant(Tensor value) {
  nodes_.push_back(Node{std::move(value), {}, nullptr, nullptr});
  return Var(this, nodes_.size() - 1);
}

Var Tape::parameter(ParameterStore& store, const std::string& name) {
  const auto key = std::make_pair(static_cast<const ParameterStore*>(&store), name);
  if (auto it = param_cache_.find(key); it != param_cache_.end()) return Var(this, it->second);
  Parameter& p = store.at(name);
  nodes_.push_back(Node{p.value, {}, nullptr, &p});
  param_cache_.emplace(key, nodes_.size() - 1);
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(Tensor value, Backward backward) {
  nodes_.push_back(Node{std::move(value), {}, std::move(backward), nullptr});
  return Var(this, nodes_.size() - 1);
}

Tensor& Tape::grad(std::size_t id) {
  Node& n = nodes_[id];
  if (n.grad.empty()) n.grad = zeros_like(n.value);
  return n.grad;
}

const Tensor* Tape::grad_if_any(Var v) const {
  const Node& n = nodes_[v.id()];
  return n.grad.empty() ? nullptr : &n.grad;
}

void Tape::backward(Var loss) {
  if (!loss.valid() || &loss.tape() != this) fail(ErrorCode::InvalidArgument, "loss not on this tape");
  if (value(loss).size() != 1) fail(ErrorCode::ShapeMismatch, "backward needs a scalar loss");
  for (auto& n : nodes_) {
    if (!n.grad.empty()) n.grad.fill(0.0);
  }
  grad(loss.id()).fill(1.0);
  visits_ = 0;
  for (std::size_t i = loss.id() + 1; i-- > 0;) {
    ++visits_;
    if (nodes_[i].grad.empty()) continue;
    if (nodes_[i].backward) nodes_[i].backward(*this, i);
    if (nodes_[i].param != nullptr) {
      Tensor& dst = nodes_[i].param->grad;
      const Tensor& src = nodes_[i].grad;
      for (std::size_t k = 0; k < src.size(); ++k) dst[k] += src[k];
    }
  }
}

// ---- kernels ---------------------------------------------------------------

Var matmul(Var a, Var b) {
  require_same_tape(a, b);
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  require(A.cols() == B.rows(), "matmul " + A.shape_string() + " x " + B.shape_string());
  Tensor out(A.rows(), B.cols());
  gemm_accumulate(A, B, out);
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(std::move(out), [ia, ib](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    gemm_nt_accumulate(g, t.value(ib), t.grad(ia));
    gemm_tn_accumulate(t.value(ia), g, t.grad(ib));
  });
}

Var matmul_nt(Var a, Var b) {
  require_same_tape(a, b);
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  require(A.cols() == B.cols(), "matmul_nt " + A.shape_string() + " x " + B.shape_string() + "^T");
  Tensor out(A.rows(), B.rows());
  gemm_nt_accumulate(A, B, out);
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(std::move(out), [ia, ib](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);  // [n x m]
    gemm_accumulate(g, t.value(ib), t.grad(ia));
    gemm_tn_accumulate(g, t.value(ia), t.grad(ib));
  });
}

Var add(Var a, Var b) {
  require_same_tape(a, b);
  require(a.value().same_shape(b.value()), "add " + a.value().shape_string() + " + " + b.value().shape_string());
  Tensor out = a.value();
  const Tensor& B = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += B[i];
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(std::move(out), [ia, ib](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    Tensor& ga = t.grad(ia);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    Tensor& gb = t.grad(ib);
    for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i];
  });
}

Var sub(Var a, Var b) {
  require_same_tape(a, b);
  require(a.value().same_shape(b.value()), "sub " + a.value().shape_string() + " - " + b.value().shape_string());
  Tensor out = a.value();
  const Tensor& B = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= B[i];
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(std::move(out), [ia, ib](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    Tensor& ga = t.grad(ia);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    Tensor& gb = t.grad(ib);
    for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
  });
}

Var mul(Var a, Var b) {
  require_same_tape(a, b);
  require(a.value().same_shape(b.value()), "mul " + a.value().shape_string() + " * " + b.value().shape_string());
  Tensor out = a.value();
  const Tensor& B = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= B[i];
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(std::move(out), [ia, ib](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    {
      Tensor& ga = t.grad(ia);
      const Tensor& vb = t.value(ib);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * vb[i];
    }
    Tensor& gb = t.grad(ib);
    const Tensor& va = t.value(ia);
    for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * va[i];
  });
}

Var add_row(Var a, Var row) {
  require_same_tape(a, row);
  const Tensor& A = a.value();
  const Tensor& R = row.value();
  require(R.rows() == 1 && R.cols() == A.cols(), "add_row " + A.shape_string() + " + " + R.shape_string());
  Tensor out = A;
  const std::size_t n = A.rows(), m = A.cols();
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < m; ++c) out[r * m + c] += R[c];
  }
  const std::size_t ia = a.id(), ir = row.id();
  return a.tape().record(std::move(out), [ia, ir, n, m](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    Tensor& ga = t.grad(ia);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    Tensor& gr = t.grad(ir);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < m; ++c) gr[c] += g[r * m + c];
    }
  });
}

Var mul_col(Var a, Var col) {
  require_same_tape(a, col);
  const Tensor& A = a.value();
  const Tensor& C = col.value();
  require(C.cols() == 1 && C.rows() == A.rows(), "mul_col " + A.shape_string() + " * " + C.shape_string());
  const std::size_t n = A.rows(), m = A.cols();
  Tensor out = A;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < m; ++c) out[r * m + c] *= C[r];
  }
  const std::size_t ia = a.id(), ic = col.id();
  return a.tape().record(std::move(out), [ia, ic, n, m](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    {
      Tensor& ga = t.grad(ia);
      const Tensor& vc = t.value(ic);
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < m; ++c) ga[r * m + c] += g[r * m + c] * vc[r];
      }
    }
    Tensor& gc = t.grad(ic);
    const Tensor& va = t.value(ia);
    for (std::size_t r = 0; r < n; ++r) {
      double acc = 0.0;
      for (std::size_t c = 0; c < m; ++c) acc += g[r * m + c] * va[r * m + c];
      gc[r] += acc;
    }
  });
}

Var scale(Var a, double s) {
  Tensor out = a.value();
  for (auto& v : out.values()) v *= s;
  const std::size_t ia = a.id();
  return a.tape().record(std::move(out), [ia, s](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    Tensor& ga = t.grad(ia);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += s * g[i];
  });
}

Var add_scalar(Var a, double s) {
  Tensor out = a.value();
  for (auto& v : out.values()) v += s;
  const std::size_t ia = a.id();
  return a.tape().record(std::move(out), [ia](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    Tensor& ga = t.grad(ia);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
  });
}

Var sigmoid(Var a) {
  Tensor out = a.value();
  for (auto& v : out.values()) v = v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
  const std::size_t ia = a.id();
  return a.tape().record(std::move(out), [ia](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    const Tensor& y = t.value(self);
    Tensor& ga = t.grad(ia);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * y[i] * (1.0 - y[i]);
  });
}

Var tanh(Var a) {
  Tensor out = a.value();
  for (auto& v : out.values()) v = std::tanh(v);
  const std::size_t ia = a.id();
  return a.tape().record(std::move(out), [ia](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    const Tensor& y = t.value(self);
    Tensor& ga = t.grad(ia);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * (1.0 - y[i] * y[i]);
  });
}

Var elu(Var a) {
  Tensor out = a.value();
  for (auto& v : out.values()) v = v > 0.0 ? v : std::expm1(v);
  const std::size_t ia = a.id();
  return a.tape().record(std::move(out), [ia](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    const Tensor& x = t.value(ia);
    const Tensor& y = t.value(self);
    Tensor& ga = t.grad(ia);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * (x[i] > 0.0 ? 1.0 : y[i] + 1.0);
  });
}

namespace {

Var softmax_impl(Var a, const std::vector<std::uint8_t>* mask) {
  const Tensor& A = a.value();
  const std::size_t n = A.rows(), m = A.cols();
  if (mask != nullptr) require(mask->size() == n * m, "mask shape differs from logits");
  Tensor out(n, m);
  for (std::size_t r = 0; r < n; ++r) {
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < m; ++c) {
      if (mask == nullptr || (*mask)[r * m + c]) hi = std::max(hi, A[r * m + c]);
    }
    if (!std::isfinite(hi)) {
      fail(mask != nullptr ? ErrorCode::MaskAllBlocked : ErrorCode::ShapeMismatch,
           "softmax row " + std::to_string(r) + " has no open position");
    }
    double z = 0.0;
    for (std::size_t c = 0; c < m; ++c) {
      const bool open = mask == nullptr || (*mask)[r * m + c];
      const double e = open ? std::exp(A[r * m + c] - hi) : 0.0;
      out[r * m + c] = e;
      z += e;
    }
    for (std::size_t c = 0; c < m; ++c) out[r * m + c] /= z;
  }
  const std::size_t ia = a.id();
  return a.tape().record(std::move(out), [ia, n, m](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    const Tensor& y = t.value(self);
    Tensor& ga = t.grad(ia);
    for (std::size_t r = 0; r < n; ++r) {
      double dot = 0.0;
      for (std::size_t c = 0; c < m; ++c) dot += g[r * m + c] * y[r * m + c];
      for (std::size_t c = 0; c < m; ++c) ga[r * m + c] += y[r * m + c] * (g[r * m + c] - dot);
    }
  });
}

}  // namespace

Var softmax_rows(Var a) { return softmax_impl(a, nullptr); }

Var masked_softmax_rows(Var a, std::vector<std::uint8_t> mask) { return softmax_impl(a, &mask); }

Var layer_norm(Var x, Var gamma, Var beta, double eps) {
  require_same_tape(x, gamma);
  require_same_tape(x, beta);
  const Tensor& X = x.value();
  const std::size_t n = X.rows(), m = X.cols();
  require(gamma.value().size() == m && beta.value().size() == m, "layer_norm affine width differs");
  Tensor xhat(n, m);
  std::vector<double> inv_std(n);
  Tensor out(n, m);
  const Tensor& G = gamma.value();
  const Tensor& B = beta.value();
  for (std::size_t r = 0; r < n; ++r) {
    double mu = 0.0;
    for (std::size_t c = 0; c < m; ++c) mu += X[r * m + c];
    mu /= double(m);
    double var = 0.0;
    for (std::size_t c = 0; c < m; ++c) {
      const double d = X[r * m + c] - mu;
      var += d * d;
    }
    var /= double(m);
    inv_std[r] = 1.0 / std::sqrt(var + eps);
    for (std::size_t c = 0; c < m; ++c) {
      xhat[r * m + c] = (X[r * m + c] - mu) * inv_std[r];
      out[r * m + c] = xhat[r * m + c] * G[c] + B[c];
    }
  }
  const std::size_t ix = x.id(), ig = gamma.id(), ib = beta.id();
  return x.tape().record(std::move(out), [ix, ig, ib, n, m, xhat = std::move(xhat),
                                          inv_std = std::move(inv_std)](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    const Tensor& G = t.value(ig);
    {
      Tensor& gg = t.grad(ig);
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < m; ++c) gg[c] += g[r * m + c] * xhat[r * m + c];
      }
    }
    {
      Tensor& gb = t.grad(ib);
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < m; ++c) gb[c] += g[r * m + c];
      }
    }
    Tensor& gx = t.grad(ix);
    std::vector<double> dxhat(m);
    for (std::size_t r = 0; r < n; ++r) {
      double mean_d = 0.0;
      double mean_dx = 0.0;
      for (std::size_t c = 0; c < m; ++c) {
        dxhat[c] = g[r * m + c] * G[c];
        mean_d += dxhat[c];
        mean_dx += dxhat[c] * xhat[r * m + c];
      }
      mean_d /= double(m);
      mean_dx /= double(m);
      for (std::size_t c = 0; c < m; ++c) {
        gx[r * m + c] += inv_std[r] * (dxhat[c] - mean_d - xhat[r * m + c] * mean_dx);
      }
    }
  });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) fail(ErrorCode::ShapeMismatch, "concat_cols of nothing");
  const std::size_t n = parts.front().rows();
  std::size_t m = 0;
  for (const auto& p : parts) {
    require_same_tape(parts.front(), p);
    require(p.rows() == n, "concat_cols row counts differ");
    m += p.cols();
  }
  Tensor out(n, m);
  std::vector<std::size_t> ids, widths;
  std::size_t off = 0;
  for (const auto& p : parts) {
    const Tensor& v = p.value();
    const std::size_t w = v.cols();
    for (std::size_t r = 0; r < n; ++r) std::copy_n(v.data() + r * w, w, out.data() + r * m + off);
    ids.push_back(p.id());
    widths.push_back(w);
    off += w;
  }
  return parts.front().tape().record(std::move(out), [ids, widths, n, m](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    std::size_t off = 0;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      Tensor& gp = t.grad(ids[k]);
      const std::size_t w = widths[k];
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < w; ++c) gp[r * w + c] += g[r * m + off + c];
      }
      off += w;
    }
  });
}

Var slice_cols(Var a, std::size_t begin, std::size_t count) {
  const Tensor& A = a.value();
  const std::size_t n = A.rows(), m = A.cols();
  require(begin + count <= m, "slice_cols beyond " + A.shape_string());
  Tensor out(n, count);
  for (std::size_t r = 0; r < n; ++r) std::copy_n(A.data() + r * m + begin, count, out.data() + r * count);
  const std::size_t ia = a.id();
  return a.tape().record(std::move(out), [ia, begin, count, n, m](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    Tensor& ga = t.grad(ia);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < count; ++c) ga[r * m + begin + c] += g[r * count + c];
    }
  });
}

Var concat_rows(std::span<const Var> parts) {
  if (parts.empty()) fail(ErrorCode::ShapeMismatch, "concat_rows of nothing");
  const std::size_t m = parts.front().cols();
  std::size_t n = 0;
  for (const auto& p : parts) {
    require_same_tape(parts.front(), p);
    require(p.cols() == m, "concat_rows column counts differ");
    n += p.rows();
  }
  Tensor out(n, m);
  std::vector<std::size_t> ids, sizes;
  std::size_t off = 0;
  for (const auto& p : parts) {
    const Tensor& v = p.value();
    std::copy_n(v.data(), v.size(), out.data() + off);
    ids.push_back(p.id());
    sizes.push_back(v.size());
    off += v.size();
  }
  return parts.front().tape().record(std::move(out), [ids, sizes](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    std::size_t off = 0;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      Tensor& gp = t.grad(ids[k]);
      for (std::size_t i = 0; i < sizes[k]; ++i) gp[i] += g[off + i];
      off += sizes[k];
    }
  });
}

Var slice_rows(Var a, std::size_t begin, std::size_t count) {
  const Tensor& A = a.value();
  const std::size_t m = A.cols();
  require(begin + count <= A.rows(), "slice_rows beyond " + A.shape_string());
  Tensor out(count, m);
  std::copy_n(A.data() + begin * m, count * m, out.data());
  const std::size_t ia = a.id();
  return a.tape().record(std::move(out), [ia, begin, count, m](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    Tensor& ga = t.grad(ia);
    for (std::size_t i = 0; i < count * m; ++i) ga[begin * m + i] += g[i];
  });
}

Var gather_rows(Var a, std::vector<std::size_t> rows) {
  const Tensor& A = a.value();
  const std::size_t m = A.cols();
  Tensor out(rows.size(), m);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i] < A.rows(), "gather_rows index out of range");
    std::copy_n(A.data() + rows[i] * m, m, out.data() + i * m);
  }
  const std::size_t ia = a.id();
  return a.tape().record(std::move(out), [ia, rows = std::move(rows), m](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    Tensor& ga = t.grad(ia);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t c = 0; c < m; ++c) ga[rows[i] * m + c] += g[i * m + c];
    }
  });
}

Var tile_rows(Var a, std::size_t times) {
  const Tensor& A = a.value();
  const std::size_t block = A.size();
  Tensor out(A.rows() * times, A.cols());
  for (std::size_t k = 0; k < times; ++k) std::copy_n(A.data(), block, out.data() + k * block);
  const std::size_t ia = a.id();
  return a.tape().record(std::move(out), [ia, times, block](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    Tensor& ga = t.grad(ia);
    for (std::size_t k = 0; k < times; ++k) {
      for (std::size_t i = 0; i < block; ++i) ga[i] += g[k * block + i];
    }
  });
}

Var mean_of(std::span<const Var> parts) {
  if (parts.empty()) fail(ErrorCode::ShapeMismatch, "mean_of nothing");
  Tensor out = parts.front().value();
  for (std::size_t k = 1; k < parts.size(); ++k) {
    require_same_tape(parts.front(), parts[k]);
    require(parts[k].value().same_shape(out), "mean_of shapes differ");
    const Tensor& v = parts[k].value();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += v[i];
  }
  const double w = 1.0 / double(parts.size());
  for (auto& v : out.values()) v *= w;
  std::vector<std::size_t> ids;
  for (const auto& p : parts) ids.push_back(p.id());
  return parts.front().tape().record(std::move(out), [ids, w](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    for (auto id : ids) {
      Tensor& gp = t.grad(id);
      for (std::size_t i = 0; i < g.size(); ++i) gp[i] += w * g[i];
    }
  });
}

Var reshape(Var a, std::size_t rows, std::size_t cols) {
  const Tensor& A = a.value();
  require(rows * cols == A.size(), "reshape " + A.shape_string() + " to " + std::to_string(rows) + "x" +
                                       std::to_string(cols));
  Tensor out({rows, cols}, std::vector<double>(A.values().begin(), A.values().end()));
  const std::size_t ia = a.id();
  return a.tape().record(std::move(out), [ia](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    Tensor& ga = t.grad(ia);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
  });
}

Var sum(Var a) {
  double s = 0.0;
  for (double v : a.value().values()) s += v;
  const std::size_t ia = a.id();
  return a.tape().record(Tensor(1, 1, s), [ia](Tape& t, std::size_t self) {
    const double g = t.grad(self)[0];
    Tensor& ga = t.grad(ia);
    for (auto& v : ga.values()) v += g;
  });
}

Var mean(Var a) {
  const double n = double(a.value().size());
  return scale(sum(a), 1.0 / n);
}

Var mse_loss(Var pred, Var target) {
  require_same_tape(pred, target);
  const Tensor& P = pred.value();
  const Tensor& T = target.value();
  require(P.same_shape(T) && P.size() > 0, "mse_loss " + P.shape_string() + " vs " + T.shape_string());
  double acc = 0.0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    const double d = P[i] - T[i];
    acc += d * d;
  }
  const double n = double(P.size());
  const std::size_t ip = pred.id(), it = target.id();
  return pred.tape().record(Tensor(1, 1, acc / n), [ip, it, n](Tape& t, std::size_t self) {
    const double g = t.grad(self)[0];
    const Tensor& P = t.value(ip);
    const Tensor& T = t.value(it);
    {
      Tensor& gp = t.grad(ip);
      for (std::size_t i = 0; i < P.size(); ++i) gp[i] += g * 2.0 * (P[i] - T[i]) / n;
    }
    Tensor& gt = t.grad(it);
    for (std::size_t i = 0; i < P.size(); ++i) gt[i] -= g * 2.0 * (P[i] - T[i]) / n;
  });
}

Var dropout(Var a, double rate, std::mt19937_64& rng, bool training) {
  if (!training || rate <= 0.0) return a;
  if (rate >= 1.0) fail(ErrorCode::InvalidArgument, "dropout rate must be < 1");
  const Tensor& A = a.value();
  std::vector<double> keep(A.size());
  std::bernoulli_distribution coin(1.0 - rate);
  const double s = 1.0 / (1.0 - rate);
  Tensor out = A;
  for (std::size_t i = 0; i < A.size(); ++i) {
    keep[i] = coin(rng) ? s : 0.0;
    out[i] *= keep[i];
  }
  const std::size_t ia = a.id();
  return a.tape().record(std::move(out), [ia, keep = std::move(keep)](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    Tensor& ga = t.grad(ia);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * keep[i];
  });
}

}  // namespace gridcast::nn
