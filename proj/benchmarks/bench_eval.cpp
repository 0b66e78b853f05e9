#include <benchmark/benchmark.h>

#include <random>

#include "gridcast/eval/metrics.hpp"
#include "gridcast/eval/stats.hpp"

using namespace gridcast;

namespace {

std::vector<double> positive_values(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(50.0, 500.0);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

}  // namespace

static void BM_Metrics(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto actual = positive_values(n, 1);
  const auto forecast = positive_values(n, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rmse(actual, forecast));
    benchmark::DoNotOptimize(mape(actual, forecast));
    benchmark::DoNotOptimize(smape(actual, forecast));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_Metrics)->Arg(24)->Arg(168)->Arg(24 * 365);

static void BM_WelchTTest(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = positive_values(n, 3);
  const auto b = positive_values(n, 4);
  for (auto _ : state) benchmark::DoNotOptimize(welch_ttest(a, b));
}
BENCHMARK(BM_WelchTTest)->Arg(31)->Arg(291);

static void BM_StudentTCdf(benchmark::State& state) {
  const double df = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(student_t_cdf(-2.5, df));
}
BENCHMARK(BM_StudentTCdf)->Arg(4)->Arg(364)->Arg(5000);

BENCHMARK_MAIN();
