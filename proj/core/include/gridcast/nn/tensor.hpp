#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace gridcast::nn {

// Dense row-major array of 64-bit values. Kernels treat rank-1 tensors as a
// single row; rank > 2 is storage only (checkpoints).
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t rows, std::size_t cols, double fill = 0.0);
  Tensor(std::vector<std::size_t> shape, std::vector<double> values);

  static Tensor from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Tensor row(std::vector<double> values);
  static Tensor column(std::vector<double> values);

  const std::vector<std::size_t>& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t rows() const noexcept;
  std::size_t cols() const noexcept;
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double* data() noexcept { return values_.data(); }
  const double* data() const noexcept { return values_.data(); }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  double& operator()(std::size_t r, std::size_t c) noexcept { return values_[r * cols() + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return values_[r * cols() + c]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  void fill(double v);
  bool same_shape(const Tensor& other) const noexcept { return rows() == other.rows() && cols() == other.cols(); }
  bool all_finite() const noexcept;
  std::string shape_string() const;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> values_;
};

// out += a * b, with a [n x k], b [k x m].
void gemm_accumulate(const Tensor& a, const Tensor& b, Tensor& out);
// out += a^T * b, with a [k x n], b [k x m].
void gemm_tn_accumulate(const Tensor& a, const Tensor& b, Tensor& out);
// out += a * b^T, with a [n x k], b [m x k].
void gemm_nt_accumulate(const Tensor& a, const Tensor& b, Tensor& out);

}  // namespace gridcast::nn
