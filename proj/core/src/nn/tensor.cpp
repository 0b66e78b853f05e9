#include "gridcast/nn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "gridcast/error.hpp"

namespace gridcast::nn {

Tensor::Tensor(std::size_t rows, std::size_t cols, double fill) : shape_{rows, cols}, values_(rows * cols, fill) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  const std::size_t n = std::accumulate(shape_.begin(), shape_.end(), std::size_t{1}, std::multiplies<>());
  if (shape_.empty() || n != values_.size()) {
    fail(ErrorCode::ShapeMismatch, "value count does not match shape " + shape_string());
  }
}

Tensor Tensor::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  Tensor t(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) fail(ErrorCode::ShapeMismatch, "ragged initializer");
    for (double v : row) t.values_[i++] = v;
  }
  return t;
}

Tensor Tensor::row(std::vector<double> values) {
  const std::size_t n = values.size();
  return Tensor({1, n}, std::move(values));
}

Tensor Tensor::column(std::vector<double> values) {
  const std::size_t n = values.size();
  return Tensor({n, 1}, std::move(values));
}

std::size_t Tensor::rows() const noexcept {
  if (shape_.empty()) return 0;
  return shape_.size() == 1 ? 1 : shape_[0];
}

std::size_t Tensor::cols() const noexcept {
  if (shape_.empty()) return 0;
  if (shape_.size() == 1) return shape_[0];
  std::size_t c = 1;
  for (std::size_t i = 1; i < shape_.size(); ++i) c *= shape_[i];
  return c;
}

void Tensor::fill(double v) { std::fill(values_.begin(), values_.end(), v); }

bool Tensor::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

std::string Tensor::shape_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape_[i]);
  }
  return s + "]";
}

void gemm_accumulate(const Tensor& a, const Tensor& b, Tensor& out) {
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  const double* pa = a.data();
  const double* pb = b.data();
  double* po = out.data();
  for (std::size_t i = 0; i < n; ++i) {
    double* orow = po + i * m;
    const double* arow = pa + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = arow[p];
      if (av == 0.0) continue;
      const double* brow = pb + p * m;
      for (std::size_t j = 0; j < m; ++j) orow[j] += av * brow[j];
    }
  }
}

void gemm_tn_accumulate(const Tensor& a, const Tensor& b, Tensor& out) {
  const std::size_t k = a.rows(), n = a.cols(), m = b.cols();
  const double* pa = a.data();
  const double* pb = b.data();
  double* po = out.data();
  for (std::size_t p = 0; p < k; ++p) {
    const double* arow = pa + p * n;
    const double* brow = pb + p * m;
    for (std::size_t i = 0; i < n; ++i) {
      const double av = arow[i];
      if (av == 0.0) continue;
      double* orow = po + i * m;
      for (std::size_t j = 0; j < m; ++j) orow[j] += av * brow[j];
    }
  }
}

void gemm_nt_accumulate(const Tensor& a, const Tensor& b, Tensor& out) {
  const std::size_t n = a.rows(), k = a.cols(), m = b.rows();
  const double* pa = a.data();
  const double* pb = b.data();
  double* po = out.data();
  for (std::size_t i = 0; i < n; ++i) {
    const double* arow = pa + i * k;
    for (std::size_t j = 0; j < m; ++j) {
      const double* brow = pb + j * k;
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += arow[p] * brow[p];
      po[i * m + j] += acc;
    }
  }
}

}  // namespace gridcast::nn
