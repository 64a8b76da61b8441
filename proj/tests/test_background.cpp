#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "test_util.hpp"
#include "tsad/background.hpp"
#include "tsad/error.hpp"

namespace tsad {
namespace {

// Frame i is a 2x2 gray frame filled with i mod 256.
VideoSource counting_video(std::size_t n, int w = 2, int h = 2) {
  return VideoSource("v", 30.0, n, FrameShape{w, h, 1}, [w, h](std::size_t i) {
    return Frame::filled(w, h, 1, static_cast<std::uint8_t>(i % 256));
  });
}

VideoSource constant_video(std::size_t n, const Frame& f) {
  return VideoSource("static", 30.0, n, FrameShape{f.width(), f.height(), f.channels()},
                     [f](std::size_t) { return f; });
}

TEST(SampleStack, EveryFifthFrameOfTheFirstHundred) {
  const FrameStack s = sample_stack(counting_video(300), 0, 5, 20);
  ASSERT_EQ(s.frames.size(), 20u);
  for (std::size_t k = 0; k < 20; ++k) {
    EXPECT_EQ(s.source_index(k), 5 * k);
    EXPECT_EQ(s.frames[k].at(0, 0), 5 * k);
  }
  EXPECT_EQ(s.source_index(19), 95u);
}

TEST(SampleStack, DegenerateSingleFrame) {
  const FrameStack s = sample_stack(counting_video(300), 42, 1, 1);
  ASSERT_EQ(s.frames.size(), 1u);
  EXPECT_EQ(s.frames[0].at(1, 1), 42);
}

TEST(SampleStack, RunsPastTheEnd) {
  EXPECT_THROW(sample_stack(counting_video(300), 250, 5, 20), DataError);  // needs 345
  EXPECT_NO_THROW(sample_stack(counting_video(300), 204, 5, 20));         // last is 299
}

TEST(Patches, CanonicalFrameGivesEighteenPatches) {
  std::mt19937_64 rng(1);
  const Frame f = testing::random_frame(rng, 768, 384, 3);
  const PatchGrid g = split_patches(f, 128);
  EXPECT_EQ(g.rows, 3);
  EXPECT_EQ(g.cols, 6);
  ASSERT_EQ(g.patches.size(), 18u);
  // Patch (r,c) holds pixels [r*128, (r+1)*128) x [c*128, (c+1)*128).
  const Patch& p = g.patches[1 * 6 + 4];
  EXPECT_EQ(p.row, 1);
  EXPECT_EQ(p.col, 4);
  for (int y : {0, 77, 127}) {
    for (int x : {0, 5, 127}) {
      for (int c = 0; c < 3; ++c) EXPECT_EQ(p.image.at(x, y, c), f.at(4 * 128 + x, 128 + y, c));
    }
  }
}

TEST(Patches, SinglePatchEqualsFrame) {
  std::mt19937_64 rng(2);
  const Frame f = testing::random_frame(rng, 128, 128, 1);
  const PatchGrid g = split_patches(f, 128);
  ASSERT_EQ(g.patches.size(), 1u);
  EXPECT_EQ(g.patches[0].image, f);
}

TEST(Patches, NonDivisibleDimensions) {
  EXPECT_THROW(split_patches(Frame::filled(768, 384, 1, 0), 100), DataError);
}

TEST(Patches, RoundTripOnAssortedShapes) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 30; ++k) {
    const int ps = 1 + static_cast<int>(rng() % 16);
    const int rows = 1 + static_cast<int>(rng() % 5);
    const int cols = 1 + static_cast<int>(rng() % 5);
    const Frame f = testing::random_frame(rng, cols * ps, rows * ps, k % 2 ? 3 : 1);
    EXPECT_EQ(stitch_patches(split_patches(f, ps)), f);
  }
}

TEST(Patches, StitchRejectsIncompleteOrInconsistentGrid) {
  PatchGrid g = split_patches(Frame::filled(384, 256, 1, 7), 128);
  PatchGrid missing = g;
  missing.patches.pop_back();
  EXPECT_THROW(stitch_patches(missing), DataError);

  PatchGrid wrong = g;
  wrong.patches[2].image = Frame::filled(64, 64, 1, 0);
  EXPECT_THROW(stitch_patches(wrong), DataError);

  PatchGrid dup = g;
  dup.patches[1].col = 0;
  EXPECT_THROW(stitch_patches(dup), DataError);
}

TEST(Patches, UniformPatchesStitchToTheirOrdinals) {
  PatchGrid g{128, 3, 6, {}};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 6; ++c) {
      g.patches.push_back({r, c, Frame::filled(128, 128, 1, static_cast<std::uint8_t>(r * 6 + c))});
    }
  }
  const Frame f = stitch_patches(g);
  ASSERT_EQ(f.width(), 768);
  ASSERT_EQ(f.height(), 384);
  for (int y = 0; y < 384; ++y) {
    for (int x = 0; x < 768; ++x) ASSERT_EQ(f.at(x, y), (y / 128) * 6 + x / 128);
  }
}

TEST(TemporalMedian, ConstantStack) {
  std::mt19937_64 rng(4);
  const Frame f = testing::random_frame(rng, 31, 17, 3);
  const std::vector<Frame> stack(20, f);
  EXPECT_EQ(temporal_median(stack), f);
}

TEST(TemporalMedian, EvenCountTakesLowerMiddle) {
  std::vector<Frame> stack;
  for (int v = 20; v >= 1; --v) stack.push_back(Frame::filled(1, 1, 1, static_cast<std::uint8_t>(v)));
  EXPECT_EQ(temporal_median(stack).at(0, 0), 10);
}

TEST(TemporalMedian, MovingBlobDisappears) {
  std::vector<Frame> stack;
  for (int k = 0; k < 20; ++k) {
    Frame f = Frame::filled(64, 64, 1, 100);
    const int bx = (k % 8) * 8;
    const int by = (k / 8) * 8;
    for (int y = by; y < by + 8; ++y) {
      for (int x = bx; x < bx + 8; ++x) f.at(x, y) = 50;
    }
    stack.push_back(std::move(f));
  }
  EXPECT_EQ(temporal_median(stack), Frame::filled(64, 64, 1, 100));
}

TEST(TemporalMedian, MatchesSortOracleAndIsPermutationInvariant) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 25);
    const int w = 1 + static_cast<int>(rng() % 24);
    const int h = 1 + static_cast<int>(rng() % 24);
    const int c = trial % 3 == 0 ? 3 : 1;
    std::vector<Frame> stack;
    for (int k = 0; k < n; ++k) stack.push_back(testing::random_frame(rng, w, h, c));
    const Frame expected = oracle::sort_median(stack);
    const Frame got = temporal_median(stack);
    ASSERT_EQ(got, expected);
    std::shuffle(stack.begin(), stack.end(), rng);
    ASSERT_EQ(temporal_median(stack), got);
    // Every output sample occurs at its position in the input.
    for (std::size_t s = 0; s < got.sample_count(); ++s) {
      const bool found = std::any_of(stack.begin(), stack.end(),
                                     [&](const Frame& f) { return f.pixels()[s] == got.pixels()[s]; });
      ASSERT_TRUE(found);
    }
  }
}

TEST(TemporalMedian, LongStacksMatchSortOracle) {
  std::mt19937_64 rng(77);
  for (std::size_t n : {254u, 255u, 256u, 300u}) {
    std::vector<Frame> frames;
    for (std::size_t i = 0; i < n; ++i) frames.push_back(testing::random_frame(rng, 9, 7, 1));
    ASSERT_EQ(temporal_median(frames), oracle::sort_median(frames)) << n;
  }
}

TEST(TemporalMedian, Errors) {
  EXPECT_THROW(temporal_median(std::vector<Frame>{}), DataError);
  const std::vector<Frame> mixed{Frame::filled(2, 2, 1, 0), Frame::filled(2, 3, 1, 0)};
  EXPECT_THROW(temporal_median(mixed), DataError);
}

TEST(EstimateBackgrounds, FifteenMinutesAtThirtyFps) {
  const auto bgs = estimate_backgrounds(constant_video(27000, Frame::filled(128, 128, 1, 9)), {});
  ASSERT_EQ(bgs.size(), 270u);
  for (std::size_t i = 0; i < bgs.size(); ++i) {
    EXPECT_EQ(bgs[i].label_index, i);
    EXPECT_EQ(bgs[i].source_span.first, 100 * i);
    EXPECT_EQ(bgs[i].source_span.second, 100 * i + 95);
  }
}

TEST(EstimateBackgrounds, ExactlyOnePeriod) {
  const auto bgs = estimate_backgrounds(constant_video(100, Frame::filled(128, 128, 1, 1)), {});
  ASSERT_EQ(bgs.size(), 1u);
  EXPECT_EQ(bgs[0].label_index, 0u);
}

TEST(EstimateBackgrounds, StaticVideoReproducesTheFrame) {
  std::mt19937_64 rng(6);
  const Frame f = testing::random_frame(rng, 256, 128, 3);
  for (const auto& bg : estimate_backgrounds(constant_video(450, f), {})) EXPECT_EQ(bg.image, f);
}

TEST(EstimateBackgrounds, CadenceIsFloorOfLengthOverPeriod) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t len = 100 + rng() % 900;
    BackgroundConfig cfg;
    cfg.period = 50 + static_cast<int>(rng() % 60);
    cfg.stack_len = 5;
    cfg.stride = 9;
    cfg.patch_size = 2;
    const auto bgs = estimate_backgrounds(counting_video(len), cfg);
    ASSERT_EQ(bgs.size(), len / static_cast<std::size_t>(cfg.period));
    for (std::size_t i = 0; i < bgs.size(); ++i) {
      ASSERT_EQ(bgs[i].label_index, i);
      ASSERT_EQ(bgs[i].source_span.second - bgs[i].source_span.first, 36u);
      // Samples start, start+9, ..., start+36 (values mod 256): median is the third smallest.
      std::vector<std::size_t> values;
      for (std::size_t k = 0; k < 5; ++k) values.push_back((bgs[i].source_span.first + 9 * k) % 256);
      std::sort(values.begin(), values.end());
      ASSERT_EQ(bgs[i].image.at(0, 0), values[2]);
    }
  }
}

TEST(EstimateBackgrounds, WorkerThreadsKeepLabelOrder) {
  std::mt19937_64 rng(8);
  std::vector<Frame> frames;
  for (int i = 0; i < 700; ++i) frames.push_back(testing::random_frame(rng, 8, 8, 1));
  const VideoSource v = VideoSource::from_frames("r", 30.0, frames);
  BackgroundConfig cfg;
  cfg.patch_size = 4;
  const auto serial = estimate_backgrounds(v, cfg, MedianEstimator{}, 1);
  const auto parallel = estimate_backgrounds(v, cfg, MedianEstimator{}, 4);
  ASSERT_EQ(serial.size(), parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(parallel[i].label_index, i);
    EXPECT_EQ(parallel[i].image, serial[i].image);
  }
}

TEST(EstimateBackgrounds, ErrorsOnShortVideoOrBadConfig) {
  EXPECT_THROW(estimate_backgrounds(constant_video(99, Frame::filled(128, 128, 1, 0)), {}), DataError);
  BackgroundConfig too_wide;
  too_wide.stride = 6;  // 19 * 6 = 114 > period
  EXPECT_THROW(estimate_backgrounds(constant_video(500, Frame::filled(128, 128, 1, 0)), too_wide),
               UsageError);
  EXPECT_THROW(estimate_backgrounds(constant_video(500, Frame::filled(100, 100, 1, 0)), {}), DataError);
}

// Replaces the median to show the estimator sees one patch position at a time.
class CountingMaxEstimator final : public BackgroundEstimator {
 public:
  Frame estimate_patch(std::span<const Frame> stack) const override {
    ++calls;
    Frame out = stack.front();
    for (const Frame& f : stack) {
      for (std::size_t s = 0; s < out.sample_count(); ++s) {
        out.pixels()[s] = std::max(out.pixels()[s], f.pixels()[s]);
      }
    }
    return out;
  }
  mutable std::atomic<int> calls{0};
};

TEST(EstimateBackgrounds, PluggableEstimatorRunsPerPatch) {
  CountingMaxEstimator est;
  const auto bgs = estimate_backgrounds(counting_video(200, 768, 384), {}, est);
  ASSERT_EQ(bgs.size(), 2u);
  EXPECT_EQ(est.calls.load(), 36);
  EXPECT_EQ(bgs[1].image.at(700, 300), 195);
}

TEST(ReferenceBackground, StaticVideo) {
  const Frame f = Frame::filled(16, 8, 1, 77);
  const ReferenceBackground ref = reference_background(constant_video(300, f));
  EXPECT_EQ(ref.image, f);
  EXPECT_EQ(ref.horizon, 300u);
}

TEST(ReferenceBackground, AlternatingPixelTakesLowerMiddle) {
  const VideoSource v("alt", 30.0, 300, FrameShape{2, 1, 1}, [](std::size_t i) {
    Frame f = Frame::filled(2, 1, 1, 60);
    f.at(1, 0) = i % 2 == 0 ? 0 : 255;
    return f;
  });
  const ReferenceBackground ref = reference_background(v, 300);
  EXPECT_EQ(ref.image.at(0, 0), 60);
  EXPECT_EQ(ref.image.at(1, 0), 0);
}

TEST(ReferenceBackground, HorizonLongerThanVideo) {
  EXPECT_THROW(reference_background(counting_video(300), 301), DataError);
}

TEST(BackgroundFileName, EncodesVideoAndIndex) {
  BackgroundImage bg{"cam3", 12, {1200, 1295}, Frame::filled(1, 1, 1, 0)};
  EXPECT_EQ(background_file_name(bg), "bg_cam3_12.pgm");
  bg.image = Frame::filled(1, 1, 3, 0);
  EXPECT_EQ(background_file_name(bg), "bg_cam3_12.ppm");
}

}  // namespace
}  // namespace tsad
