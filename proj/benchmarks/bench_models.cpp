#include <benchmark/benchmark.h>

#include <random>

#include "gridcast/ingest.hpp"
#include "gridcast/models/arima.hpp"
#include "gridcast/models/tft.hpp"
#include "gridcast/models/trained_model.hpp"
#include "tiny_tft.hpp"

using namespace gridcast;

namespace {

TFTConfig bench_tft(std::size_t hidden) {
  TFTConfig config;
  config.hidden_size = hidden;
  config.attention_heads = 1;
  config.lstm_layers = 1;
  config.input_window = 48;
  config.horizon = 24;
  config.dropout = 0.0;
  return config;
}

}  // namespace

// Grid layout: one past and eight future variables, 32 samples.
static void BM_TftForward(benchmark::State& state) {
  const TFTConfig config = bench_tft(static_cast<std::size_t>(state.range(0)));
  nn::ParameterStore store(1);
  TFTNetwork network(store, config, 1, 8, 0);
  const Batch batch = testing::random_tft_batch(32, config.input_window, config.horizon, 1, 8, 0, 2);
  for (auto _ : state) {
    nn::Tape tape;
    nn::Forward fw{tape, store};
    benchmark::DoNotOptimize(network.forward(fw, batch).prediction.value().values().data());
  }
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_TftForward)->Arg(8)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_TftTrainStep(benchmark::State& state) {
  const TFTConfig config = bench_tft(static_cast<std::size_t>(state.range(0)));
  nn::ParameterStore store(3);
  TFTNetwork network(store, config, 1, 8, 0);
  const Batch batch = testing::random_tft_batch(32, config.input_window, config.horizon, 1, 8, 0, 4);
  for (auto _ : state) {
    nn::Tape tape;
    nn::Forward fw{tape, store};
    store.zero_grad();
    tape.backward(nn::mse_loss(network.forward(fw, batch).prediction, tape.constant(batch.target)));
  }
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_TftTrainStep)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_ArimaFit(benchmark::State& state) {
  SyntheticConfig generator;
  generator.n_substations = 1;
  generator.n_days = static_cast<std::size_t>(state.range(0));
  const SyntheticDataset data = generate_synthetic(generator);
  ArimaConfig config;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_arima(data.hierarchy.grid.values(), config));
  }
}
BENCHMARK(BM_ArimaFit)->Arg(28)->Arg(90)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
