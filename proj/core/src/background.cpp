#include "tsad/background.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "tsad/error.hpp"

namespace tsad {

void BackgroundConfig::validate() const {
  if (stack_len <= 0) throw UsageError("stack_len must be positive");
  if (stride <= 0) throw UsageError("stride must be positive");
  if (period <= 0) throw UsageError("period must be positive");
  if (patch_size <= 0) throw UsageError("patch_size must be positive");
  if (reference_horizon <= 0) throw UsageError("reference_horizon must be positive");
  if (stack_span() >= period) {
    throw UsageError("a stack of " + std::to_string(stack_len) + " frames at stride " +
                     std::to_string(stride) + " does not fit in a period of " +
                     std::to_string(period) + " frames");
  }
}

FrameStack sample_stack(const VideoSource& video, std::size_t start_index, int stride,
                        int stack_len) {
  if (stride <= 0 || stack_len <= 0) {
    throw UsageError("stack stride and length must be positive");
  }
  const std::size_t last = start_index + static_cast<std::size_t>(stack_len - 1) *
                                             static_cast<std::size_t>(stride);
  if (last >= video.size()) {
    throw DataError("stack starting at frame " + std::to_string(start_index) + " needs frame " +
                    std::to_string(last) + " but video '" + video.video_id() + "' has " +
                    std::to_string(video.size()) + " frames");
  }
  FrameStack stack{video.video_id(), start_index, stride, {}};
  stack.frames.reserve(static_cast<std::size_t>(stack_len));
  for (int k = 0; k < stack_len; ++k) {
    stack.frames.push_back(video.frame(stack.source_index(static_cast<std::size_t>(k))));
  }
  return stack;
}

PatchGrid split_patches(const Frame& frame, int patch_size) {
  if (patch_size <= 0) throw UsageError("patch size must be positive");
  if (frame.width() % patch_size != 0 || frame.height() % patch_size != 0) {
    throw DataError("frame " + std::to_string(frame.width()) + "x" +
                    std::to_string(frame.height()) + " does not tile into " +
                    std::to_string(patch_size) + "-pixel patches");
  }
  PatchGrid grid;
  grid.patch_size = patch_size;
  grid.rows = frame.height() / patch_size;
  grid.cols = frame.width() / patch_size;
  grid.patches.reserve(static_cast<std::size_t>(grid.rows * grid.cols));

  const int ch = frame.channels();
  const std::size_t row_bytes = static_cast<std::size_t>(patch_size * ch);
  const auto src = frame.pixels();
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      std::vector<std::uint8_t> px(row_bytes * static_cast<std::size_t>(patch_size));
      for (int y = 0; y < patch_size; ++y) {
        const std::size_t offset =
            (static_cast<std::size_t>(r * patch_size + y) * static_cast<std::size_t>(frame.width()) +
             static_cast<std::size_t>(c * patch_size)) *
            static_cast<std::size_t>(ch);
        std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(offset), row_bytes,
                    px.begin() + static_cast<std::ptrdiff_t>(row_bytes * static_cast<std::size_t>(y)));
      }
      grid.patches.push_back({r, c, Frame(patch_size, patch_size, ch, std::move(px))});
    }
  }
  return grid;
}

Frame stitch_patches(const PatchGrid& grid) {
  if (grid.patch_size <= 0 || grid.rows <= 0 || grid.cols <= 0) {
    throw DataError("patch grid has no extent");
  }
  const std::size_t expected = static_cast<std::size_t>(grid.rows) * static_cast<std::size_t>(grid.cols);
  if (grid.patches.size() != expected) {
    throw DataError("patch grid is incomplete: " + std::to_string(grid.patches.size()) + " of " +
                    std::to_string(expected) + " patches present");
  }
  const int ps = grid.patch_size;
  const int ch = grid.patches.front().image.channels();
  Frame out = Frame::filled(grid.cols * ps, grid.rows * ps, ch, 0);
  std::vector<bool> seen(expected, false);
  auto dst = out.pixels();
  const std::size_t row_bytes = static_cast<std::size_t>(ps * ch);

  for (const Patch& p : grid.patches) {
    if (p.row < 0 || p.row >= grid.rows || p.col < 0 || p.col >= grid.cols) {
      throw DataError("patch (" + std::to_string(p.row) + "," + std::to_string(p.col) +
                      ") lies outside the grid");
    }
    if (p.image.width() != ps || p.image.height() != ps || p.image.channels() != ch) {
      throw DataError("patch (" + std::to_string(p.row) + "," + std::to_string(p.col) +
                      ") has inconsistent dimensions");
    }
    const std::size_t slot = static_cast<std::size_t>(p.row * grid.cols + p.col);
    if (seen[slot]) {
      throw DataError("patch (" + std::to_string(p.row) + "," + std::to_string(p.col) +
                      ") appears twice");
    }
    seen[slot] = true;
    const auto src = p.image.pixels();
    for (int y = 0; y < ps; ++y) {
      const std::size_t offset =
          (static_cast<std::size_t>(p.row * ps + y) * static_cast<std::size_t>(out.width()) +
           static_cast<std::size_t>(p.col * ps)) *
          static_cast<std::size_t>(ch);
      std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(row_bytes * static_cast<std::size_t>(y)),
                  row_bytes, dst.begin() + static_cast<std::ptrdiff_t>(offset));
    }
  }
  return out;
}

Frame temporal_median(std::span<const Frame> frames) {
  if (frames.empty()) throw DataError("temporal median of an empty stack");
  const Frame& first = frames.front();
  for (const Frame& f : frames) {
    if (!f.same_shape(first)) throw DataError("temporal median over frames of mixed dimensions");
  }
  const std::size_t n = frames.size();
  if (n == 1) return first;

  std::vector<const std::uint8_t*> src(n);
  for (std::size_t k = 0; k < n; ++k) src[k] = frames[k].pixels().data();

  const std::size_t mid = (n - 1) / 2;
  const std::size_t count = first.sample_count();
  std::vector<std::uint8_t> out(count);

  if (n > 255) {
    std::vector<std::uint8_t> buf(n);
    const auto nth = buf.begin() + static_cast<std::ptrdiff_t>(mid);
    for (std::size_t s = 0; s < count; ++s) {
      for (std::size_t k = 0; k < n; ++k) buf[k] = src[k][s];
      std::nth_element(buf.begin(), nth, buf.end());
      out[s] = *nth;
    }
    return Frame(first.width(), first.height(), first.channels(), std::move(out));
  }

  // The lower median m is the largest v with #{x < v} <= mid. Build it bit by
  // bit from the top over a block of samples; the inner loops are branch-free
  // byte compares that vectorise.
  constexpr std::size_t block = 512;
  const auto limit = static_cast<std::uint8_t>(mid);
  alignas(64) std::array<std::uint8_t, block> ans{};
  alignas(64) std::array<std::uint8_t, block> cand{};
  alignas(64) std::array<std::uint8_t, block> below{};
  for (std::size_t base = 0; base < count; base += block) {
    const std::size_t len = std::min(block, count - base);
    std::fill_n(ans.begin(), len, std::uint8_t{0});
    for (int bit = 7; bit >= 0; --bit) {
      const auto b = static_cast<std::uint8_t>(1u << bit);
      for (std::size_t j = 0; j < len; ++j) cand[j] = ans[j] | b;
      std::fill_n(below.begin(), len, std::uint8_t{0});
      for (std::size_t k = 0; k < n; ++k) {
        const std::uint8_t* row = src[k] + base;
        for (std::size_t j = 0; j < len; ++j) below[j] += row[j] < cand[j];
      }
      for (std::size_t j = 0; j < len; ++j) ans[j] = below[j] <= limit ? cand[j] : ans[j];
    }
    std::copy_n(ans.begin(), len, out.begin() + static_cast<std::ptrdiff_t>(base));
  }
  return Frame(first.width(), first.height(), first.channels(), std::move(out));
}

Frame temporal_median(const FrameStack& stack) { return temporal_median(stack.frames); }

Frame MedianEstimator::estimate_patch(std::span<const Frame> patch_stack) const {
  return temporal_median(patch_stack);
}

Frame estimate_background(const FrameStack& stack, int patch_size,
                          const BackgroundEstimator& estimator) {
  if (stack.frames.empty()) throw DataError("cannot estimate a background from an empty stack");
  std::vector<PatchGrid> grids;
  grids.reserve(stack.frames.size());
  for (const Frame& f : stack.frames) grids.push_back(split_patches(f, patch_size));

  PatchGrid result;
  result.patch_size = patch_size;
  result.rows = grids.front().rows;
  result.cols = grids.front().cols;
  const std::size_t positions = grids.front().patches.size();
  result.patches.reserve(positions);

  std::vector<Frame> column(grids.size());
  for (std::size_t p = 0; p < positions; ++p) {
    for (std::size_t k = 0; k < grids.size(); ++k) column[k] = std::move(grids[k].patches[p].image);
    const Patch& pos = grids.front().patches[p];
    result.patches.push_back({pos.row, pos.col, estimator.estimate_patch(column)});
  }
  return stitch_patches(result);
}

std::vector<BackgroundImage> estimate_backgrounds(const VideoSource& video,
                                                  const BackgroundConfig& cfg,
                                                  const BackgroundEstimator& estimator,
                                                  unsigned jobs) {
  cfg.validate();
  const std::size_t period = static_cast<std::size_t>(cfg.period);
  const std::size_t count = video.size() / period;
  if (count == 0) {
    throw DataError("video '" + video.video_id() + "' has " + std::to_string(video.size()) +
                    " frames, shorter than one period of " + std::to_string(cfg.period) +
                    " frames");
  }

  std::vector<BackgroundImage> out(count);
  auto estimate_one = [&](std::size_t i) {
    const std::size_t start = i * period;
    const FrameStack stack = sample_stack(video, start, cfg.stride, cfg.stack_len);
    out[i] = BackgroundImage{video.video_id(), i,
                             {start, start + static_cast<std::size_t>(cfg.stack_span())},
                             estimate_background(stack, cfg.patch_size, estimator)};
  };

  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) estimate_one(i);
    return out;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> workers;
  for (unsigned w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          estimate_one(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  workers.clear();
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<BackgroundImage> estimate_backgrounds(const VideoSource& video,
                                                  const BackgroundConfig& cfg) {
  return estimate_backgrounds(video, cfg, MedianEstimator{});
}

ReferenceBackground reference_background(const VideoSource& video, std::size_t horizon) {
  if (horizon == 0) throw UsageError("reference horizon must be positive");
  if (video.size() < horizon) {
    throw DataError("video '" + video.video_id() + "' has " + std::to_string(video.size()) +
                    " frames, fewer than the reference horizon of " + std::to_string(horizon));
  }
  std::vector<Frame> frames;
  frames.reserve(horizon);
  for (std::size_t i = 0; i < horizon; ++i) frames.push_back(video.frame(i));
  return {video.video_id(), temporal_median(frames), horizon};
}

std::string background_file_name(const BackgroundImage& bg) {
  return "bg_" + bg.video_id + "_" + std::to_string(bg.label_index) +
         (bg.image.channels() == 1 ? ".pgm" : ".ppm");
}

}  // namespace tsad
