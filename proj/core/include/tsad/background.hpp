#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tsad/media.hpp"

namespace tsad {

struct BackgroundConfig {
  int stack_len = 20;
  int stride = 5;
  int period = 100;
  int patch_size = 128;
  int reference_horizon = 300;

  /// Frames spanned by one stack, first to last sample inclusive.
  int stack_span() const noexcept { return (stack_len - 1) * stride; }

  /// Throws UsageError on non-positive values or a stack that does not fit
  /// inside one period.
  void validate() const;

  friend bool operator==(const BackgroundConfig&, const BackgroundConfig&) = default;
};

/// `stack_len` frames sampled every `stride` source frames from `start_index`.
struct FrameStack {
  std::string video_id;
  std::size_t start_index = 0;
  int stride = 1;
  std::vector<Frame> frames;

  std::size_t source_index(std::size_t k) const noexcept {
    return start_index + k * static_cast<std::size_t>(stride);
  }
};

struct Patch {
  int row = 0;
  int col = 0;
  Frame image;
};

struct PatchGrid {
  int patch_size = 0;
  int rows = 0;
  int cols = 0;
  std::vector<Patch> patches;  // row-major
};

struct BackgroundImage {
  std::string video_id;
  std::size_t label_index = 0;
  std::pair<std::size_t, std::size_t> source_span;  // first and last sampled frame
  Frame image;
};

struct ReferenceBackground {
  std::string video_id;
  Frame image;
  std::size_t horizon = 0;
};

FrameStack sample_stack(const VideoSource& video, std::size_t start_index, int stride,
                        int stack_len);

PatchGrid split_patches(const Frame& frame, int patch_size);
Frame stitch_patches(const PatchGrid& grid);

/// Per-sample median across frames. Even counts take the lower of the two
/// middle order statistics, so every output value occurs in the input.
Frame temporal_median(std::span<const Frame> frames);
Frame temporal_median(const FrameStack& stack);

/// Maps a temporal stack of co-located patches to one background patch.
/// Estimators see one patch position at a time, the unit a learned
/// patch-wise model would consume.
class BackgroundEstimator {
 public:
  virtual ~BackgroundEstimator() = default;
  virtual Frame estimate_patch(std::span<const Frame> patch_stack) const = 0;
};

class MedianEstimator final : public BackgroundEstimator {
 public:
  Frame estimate_patch(std::span<const Frame> patch_stack) const override;
};

/// Splits every frame of the stack into patches, runs the estimator per patch
/// position and stitches the results.
Frame estimate_background(const FrameStack& stack, int patch_size,
                          const BackgroundEstimator& estimator);

/// One background per non-overlapping period of `cfg.period` frames; tail
/// frames that do not fill a period are dropped. `jobs` > 1 estimates periods
/// on worker threads; the result is always in label_index order.
std::vector<BackgroundImage> estimate_backgrounds(const VideoSource& video,
                                                  const BackgroundConfig& cfg,
                                                  const BackgroundEstimator& estimator,
                                                  unsigned jobs = 1);
std::vector<BackgroundImage> estimate_backgrounds(const VideoSource& video,
                                                  const BackgroundConfig& cfg);

/// Median over the first `horizon` frames at stride 1.
ReferenceBackground reference_background(const VideoSource& video, std::size_t horizon = 300);

/// `bg_<video_id>_<label_index>.pgm` (or `.ppm` for colour backgrounds).
std::string background_file_name(const BackgroundImage& bg);

}  // namespace tsad
