#pragma once

#include <span>

namespace gridcast {

// sqrt(mean (p - y)^2)
double rmse(std::span<const double> actual, std::span<const double> forecast);
// 100 * mean |p - y| / |y|; throws ZeroActual if some y is 0.
double mape(std::span<const double> actual, std::span<const double> forecast);
// 100 * mean |p - y| / ((|y| + |p|) / 2), in [0, 200]; a 0/0 term counts as 0.
double smape(std::span<const double> actual, std::span<const double> forecast);

}  // namespace gridcast
