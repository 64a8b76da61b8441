#include <benchmark/benchmark.h>

#include <random>

#include "tsad/background.hpp"
#include "tsad/simgen.hpp"

namespace {

std::vector<tsad::Frame> random_stack(int channels) {
  std::mt19937_64 rng(1);
  std::vector<tsad::Frame> frames;
  for (int i = 0; i < 20; ++i) {
    std::vector<std::uint8_t> px(static_cast<std::size_t>(768 * 384 * channels));
    for (auto& v : px) v = static_cast<std::uint8_t>(rng());
    frames.emplace_back(768, 384, channels, std::move(px));
  }
  return frames;
}

void BM_TemporalMedian(benchmark::State& state) {
  const auto frames = random_stack(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(tsad::temporal_median(frames));
}
BENCHMARK(BM_TemporalMedian)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_PatchRoundTrip(benchmark::State& state) {
  const auto frame = random_stack(3).front();
  for (auto _ : state) benchmark::DoNotOptimize(tsad::stitch_patches(tsad::split_patches(frame, 128)));
}
BENCHMARK(BM_PatchRoundTrip)->Unit(benchmark::kMicrosecond);

void BM_EstimateBackgrounds(benchmark::State& state) {
  tsad::VideoScenario s;
  s.duration_frames = 1000;
  s.actors.push_back({1, 0.0, 180.0});
  const auto video = tsad::scenario_video(s);
  for (auto _ : state) benchmark::DoNotOptimize(tsad::estimate_backgrounds(video, {}));
}
BENCHMARK(BM_EstimateBackgrounds)->Unit(benchmark::kMillisecond);

}  // namespace
