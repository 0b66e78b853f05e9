#include <benchmark/benchmark.h>

#include <random>

#include "gridcast/nn/layers.hpp"
#include "gridcast/nn/tape.hpp"
#include "gridcast/nn/tensor.hpp"

using namespace gridcast::nn;

namespace {

Tensor random_tensor(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Tensor t(rows, cols);
  for (auto& v : t.values()) v = normal(rng);
  return t;
}

}  // namespace

static void BM_Gemm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Tensor a = random_tensor(n, n, 1);
  const Tensor b = random_tensor(n, n, 2);
  Tensor out(n, n);
  for (auto _ : state) {
    gemm_accumulate(a, b, out);
    benchmark::DoNotOptimize(out.values().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(2 * n * n * n));
}
BENCHMARK(BM_Gemm)->RangeMultiplier(2)->Range(16, 256);

// Backward-pass kernels: A^T B and A B^T.
static void BM_GemmTransposed(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Tensor a = random_tensor(n, n, 3);
  const Tensor b = random_tensor(n, n, 4);
  Tensor out(n, n);
  for (auto _ : state) {
    gemm_tn_accumulate(a, b, out);
    gemm_nt_accumulate(a, b, out);
    benchmark::DoNotOptimize(out.values().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(4 * n * n * n));
}
BENCHMARK(BM_GemmTransposed)->RangeMultiplier(4)->Range(16, 256);

static void BM_DenseForwardBackward(benchmark::State& state) {
  const auto batch = static_cast<std::size_t>(state.range(0));
  ParameterStore store(5);
  Dense layer(store, "dense", 64, 64);
  const Tensor x = random_tensor(batch, 64, 6);
  for (auto _ : state) {
    Tape tape;
    Forward fw{tape, store};
    store.zero_grad();
    tape.backward(sum(layer(fw, tape.constant(x))));
  }
}
BENCHMARK(BM_DenseForwardBackward)->Arg(32)->Arg(256);

static void BM_LstmUnroll(benchmark::State& state) {
  const auto steps = static_cast<std::size_t>(state.range(0));
  ParameterStore store(7);
  LSTMCell cell(store, "lstm", 16, 32);
  std::vector<Tensor> inputs;
  for (std::size_t t = 0; t < steps; ++t) inputs.push_back(random_tensor(32, 16, 8 + t));
  for (auto _ : state) {
    Tape tape;
    Forward fw{tape, store};
    std::vector<Var> xs;
    for (const auto& x : inputs) xs.push_back(tape.constant(x));
    auto states = cell.unroll(fw, xs, {tape.constant(Tensor(32, 32)), tape.constant(Tensor(32, 32))});
    store.zero_grad();
    tape.backward(sum(states.back().h));
  }
}
BENCHMARK(BM_LstmUnroll)->Arg(24)->Arg(168);

BENCHMARK_MAIN();
