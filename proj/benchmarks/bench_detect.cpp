#include <benchmark/benchmark.h>

#include "tsad/detect.hpp"

namespace {

void BM_DetectStaticObjects(benchmark::State& state) {
  tsad::Frame bg = tsad::Frame::filled(768, 384, 1, 100);
  for (int k = 0; k < 20; ++k) {
    for (int y = 10 + (k % 4) * 90; y < 40 + (k % 4) * 90; ++y) {
      for (int x = 20 + (k / 4) * 150; x < 70 + (k / 4) * 150; ++x) bg.at(x, y) = 200;
    }
  }
  const tsad::BackgroundImage image{"b", 0, {0, 95}, bg};
  const tsad::ReferenceBackground ref{"b", tsad::Frame::filled(768, 384, 1, 100), 300};
  tsad::DetectorConfig cfg;
  cfg.denoise = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(tsad::detect_static_objects(image, ref, cfg));
}
BENCHMARK(BM_DetectStaticObjects)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
