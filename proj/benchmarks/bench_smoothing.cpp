#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "tsad/smoothing.hpp"

namespace {

tsad::LabelSequence random_labels(std::size_t n) {
  std::mt19937_64 rng(n);
  std::string codes(n, 'N');
  for (auto& c : codes) c = rng() % 3 == 0 ? 'A' : 'N';
  return tsad::labels_from_string(codes);
}

void BM_Smooth(benchmark::State& state) {
  const auto labels = random_labels(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(tsad::smooth(labels));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Smooth)->RangeMultiplier(10)->Range(100, 100000)->Unit(benchmark::kMicrosecond);

void BM_SmoothFast(benchmark::State& state) {
  const auto labels = random_labels(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(tsad::smooth_fast(labels));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SmoothFast)->RangeMultiplier(10)->Range(100, 100000)->Unit(benchmark::kMicrosecond);

}  // namespace
