#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "pwvcast/forecast.hpp"
#include "pwvcast/lstm.hpp"
#include "pwvcast/windows.hpp"

using namespace pwvcast;

namespace {

std::vector<double> sample_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = std::sin(0.1 * static_cast<double>(i));
  return w;
}

void BM_Forward(benchmark::State& state) {
  const LstmModel model = init_model(std::vector<std::size_t>{static_cast<std::size_t>(state.range(0))}, 1);
  const auto w = sample_window(48);
  for (auto _ : state) benchmark::DoNotOptimize(model_predict(model, w));
}
BENCHMARK(BM_Forward)->Arg(8)->Arg(32)->Arg(64);

void BM_ForwardBackward(benchmark::State& state) {
  const LstmModel model = init_model(std::vector<std::size_t>{static_cast<std::size_t>(state.range(0))}, 1);
  const auto w = sample_window(48);
  for (auto _ : state) {
    const ForwardResult fr = model_forward(model, w);
    benchmark::DoNotOptimize(backward(model, fr.cache, 1.0));
  }
}
BENCHMARK(BM_ForwardBackward)->Arg(8)->Arg(32)->Arg(64);

void BM_MakeWindows(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::vector<std::optional<double>> samples(static_cast<std::size_t>(state.range(0)));
  for (auto& s : samples) {
    if (rng() % 50 != 0) s = 30.0;
  }
  const TimeSeries series(1640995200, samples);
  for (auto _ : state) benchmark::DoNotOptimize(make_windows(series));
}
BENCHMARK(BM_MakeWindows)->Arg(8640)->Arg(105120);

void BM_PredictIterative(benchmark::State& state) {
  const LstmModel model = init_model(std::vector<std::size_t>{64}, 1);
  const auto w = sample_window(48);
  for (auto _ : state) benchmark::DoNotOptimize(predict_iterative(model, w, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_PredictIterative)->Arg(1)->Arg(12);

}  // namespace

BENCHMARK_MAIN();
