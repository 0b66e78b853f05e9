#include "gridcast/eval/metrics.hpp"

#include <cmath>
#include <string>

#include "gridcast/error.hpp"

namespace gridcast {

namespace {

void check(std::span<const double> y, std::span<const double> p) {
  if (y.empty() || y.size() != p.size()) {
    fail(ErrorCode::InvalidArgument, "metric inputs need equal non-zero lengths (got " + std::to_string(y.size()) +
                                         " and " + std::to_string(p.size()) + ")");
  }
}

}  // namespace

double rmse(std::span<const double> y, std::span<const double> p) {
  check(y, p);
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) acc += (p[i] - y[i]) * (p[i] - y[i]);
  return std::sqrt(acc / double(y.size()));
}

double mape(std::span<const double> y, std::span<const double> p) {
  check(y, p);
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] == 0.0) fail(ErrorCode::ZeroActual, "actual value at position " + std::to_string(i) + " is 0");
    acc += std::abs(p[i] - y[i]) / std::abs(y[i]);
  }
  return 100.0 * acc / double(y.size());
}

double smape(std::span<const double> y, std::span<const double> p) {
  check(y, p);
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double denom = (std::abs(y[i]) + std::abs(p[i])) / 2.0;
    if (denom > 0.0) acc += std::abs(p[i] - y[i]) / denom;
  }
  return 100.0 * acc / double(y.size());
}

}  // namespace gridcast
