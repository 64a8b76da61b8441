#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace tsad {

/// Row-major 8-bit raster with 1 (gray) or 3 (RGB, interleaved) channels.
class Frame {
 public:
  Frame() = default;
  /// Throws InvariantError unless `pixels.size() == width*height*channels`.
  Frame(int width, int height, int channels, std::vector<std::uint8_t> pixels);

  static Frame filled(int width, int height, int channels, std::uint8_t value);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  bool empty() const noexcept { return pixels_.empty(); }
  std::size_t sample_count() const noexcept { return pixels_.size(); }

  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  std::span<std::uint8_t> pixels() noexcept { return pixels_; }

  std::uint8_t at(int x, int y, int c = 0) const {
    return pixels_[index(x, y, c)];
  }
  std::uint8_t& at(int x, int y, int c = 0) { return pixels_[index(x, y, c)]; }

  bool same_shape(const Frame& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_ &&
           channels_ == other.channels_;
  }

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  std::size_t index(int x, int y, int c) const noexcept {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(channels_) +
           static_cast<std::size_t>(c);
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<std::uint8_t> pixels_;
};

struct FrameShape {
  int width = 0;
  int height = 0;
  int channels = 0;

  friend bool operator==(const FrameShape&, const FrameShape&) = default;
};

/// Dense, index-addressable sequence of equally shaped frames. Frames are
/// produced on demand by the backing store (a directory of PGM/PPM files, an
/// in-memory vector, or a generator), so long videos are never held in memory.
class VideoSource {
 public:
  using FrameFn = std::function<Frame(std::size_t)>;

  VideoSource(std::string video_id, double frame_rate, std::size_t frame_count,
              FrameShape shape, FrameFn fetch);

  static VideoSource from_frames(std::string video_id, double frame_rate,
                                 std::vector<Frame> frames);

  const std::string& video_id() const noexcept { return video_id_; }
  double frame_rate() const noexcept { return frame_rate_; }
  std::size_t size() const noexcept { return frame_count_; }
  const FrameShape& shape() const noexcept { return shape_; }

  /// Throws DataError when `index` is out of range or the backing frame does
  /// not match the video's shape.
  Frame frame(std::size_t index) const;

 private:
  std::string video_id_;
  double frame_rate_;
  std::size_t frame_count_;
  FrameShape shape_;
  FrameFn fetch_;
};

/// Decodes a binary PGM (P5) or PPM (P6) file with maxval 255.
Frame load_frame(const std::filesystem::path& path);

/// Reads only the header of a P5/P6 file and checks that the payload length
/// matches it.
FrameShape probe_frame(const std::filesystem::path& path);

/// Writes P5 for 1-channel frames and P6 for 3-channel frames. The file is
/// written to a temporary sibling and renamed into place.
void write_frame(const Frame& frame, const std::filesystem::path& path);

std::vector<std::uint8_t> encode_pnm(const Frame& frame);
Frame decode_pnm(std::span<const std::uint8_t> bytes, const std::string& origin = "<memory>");

/// Collects files in `directory` whose names match a printf-style `pattern`
/// (one `%d` / `%0Nd` conversion). Indices must be dense from zero and all
/// frames must share the first frame's shape; frames are decoded lazily.
VideoSource load_frame_sequence(const std::filesystem::path& directory,
                                const std::string& pattern = "f_%06d.pgm",
                                double frame_rate = 30.0,
                                std::string video_id = {});

/// Formats `pattern` for a frame index (the inverse of the filename match
/// used by load_frame_sequence).
std::string format_frame_name(const std::string& pattern, std::size_t index);

/// BT.601 luma, round half up. Gray input is returned unchanged.
Frame to_grayscale(const Frame& frame);

}  // namespace tsad
