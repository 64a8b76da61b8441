#include "tsad/media.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include "tsad/error.hpp"
#include "tsad/io.hpp"

namespace tsad {
namespace fs = std::filesystem;

Frame::Frame(int width, int height, int channels, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), channels_(channels), pixels_(std::move(pixels)) {
  if (width <= 0 || height <= 0) {
    throw InvariantError("frame dimensions must be positive");
  }
  if (channels != 1 && channels != 3) {
    throw InvariantError("frame must have 1 or 3 channels, got " + std::to_string(channels));
  }
  const std::size_t expected = static_cast<std::size_t>(width) *
                               static_cast<std::size_t>(height) *
                               static_cast<std::size_t>(channels);
  if (pixels_.size() != expected) {
    throw InvariantError("frame pixel buffer has " + std::to_string(pixels_.size()) +
                         " samples, expected " + std::to_string(expected));
  }
}

Frame Frame::filled(int width, int height, int channels, std::uint8_t value) {
  if (width <= 0 || height <= 0) {
    throw InvariantError("frame dimensions must be positive");
  }
  std::vector<std::uint8_t> px(static_cast<std::size_t>(width) *
                                   static_cast<std::size_t>(height) *
                                   static_cast<std::size_t>(channels),
                               value);
  return Frame(width, height, channels, std::move(px));
}

// ---------------------------------------------------------------------------
// VideoSource

VideoSource::VideoSource(std::string video_id, double frame_rate, std::size_t frame_count,
                         FrameShape shape, FrameFn fetch)
    : video_id_(std::move(video_id)),
      frame_rate_(frame_rate),
      frame_count_(frame_count),
      shape_(shape),
      fetch_(std::move(fetch)) {
  if (!(frame_rate_ > 0.0)) {
    throw InvariantError("frame rate must be positive");
  }
  if (frame_count_ > 0 && (shape_.width <= 0 || shape_.height <= 0 ||
                           (shape_.channels != 1 && shape_.channels != 3))) {
    throw InvariantError("video frame shape is invalid");
  }
}

VideoSource VideoSource::from_frames(std::string video_id, double frame_rate,
                                     std::vector<Frame> frames) {
  FrameShape shape;
  if (!frames.empty()) {
    shape = {frames.front().width(), frames.front().height(), frames.front().channels()};
    for (std::size_t i = 1; i < frames.size(); ++i) {
      if (!frames[i].same_shape(frames.front())) {
        throw DataError("frame " + std::to_string(i) + " has mixed dimensions");
      }
    }
  }
  auto store = std::make_shared<const std::vector<Frame>>(std::move(frames));
  const std::size_t count = store->size();
  return VideoSource(std::move(video_id), frame_rate, count, shape,
                     [store](std::size_t i) { return (*store)[i]; });
}

Frame VideoSource::frame(std::size_t index) const {
  if (index >= frame_count_) {
    throw DataError("frame index " + std::to_string(index) + " out of range for video '" +
                    video_id_ + "' with " + std::to_string(frame_count_) + " frames");
  }
  Frame f = fetch_(index);
  if (f.width() != shape_.width || f.height() != shape_.height ||
      f.channels() != shape_.channels) {
    throw DataError("frame " + std::to_string(index) + " of video '" + video_id_ +
                    "' has mixed dimensions");
  }
  return f;
}

// ---------------------------------------------------------------------------
// PGM / PPM

namespace {

struct PnmHeader {
  FrameShape shape;
  std::size_t data_offset = 0;
};

PnmHeader parse_pnm_header(std::span<const std::uint8_t> bytes, const std::string& origin) {
  auto fail = [&](const std::string& why) -> DataError {
    return DataError("malformed PGM/PPM header in '" + origin + "': " + why);
  };
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    throw fail("expected magic P5 or P6");
  }
  const int channels = bytes[1] == '5' ? 1 : 3;
  std::size_t pos = 2;

  auto skip_space_and_comments = [&] {
    while (pos < bytes.size()) {
      if (std::isspace(bytes[pos])) {
        ++pos;
      } else if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
  };
  auto read_uint = [&](const char* what) -> long {
    if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
      throw fail(std::string("missing whitespace before ") + what);
    }
    skip_space_and_comments();
    if (pos >= bytes.size() || !std::isdigit(bytes[pos])) {
      throw fail(std::string("expected ") + what);
    }
    long value = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      value = value * 10 + (bytes[pos] - '0');
      if (value > 1'000'000) throw fail(std::string(what) + " too large");
      ++pos;
    }
    return value;
  };

  const long width = read_uint("width");
  const long height = read_uint("height");
  const long maxval = read_uint("maxval");
  if (width <= 0 || height <= 0) throw fail("dimensions must be positive");
  if (maxval != 255) throw fail("maxval must be 255, got " + std::to_string(maxval));
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
    throw fail("missing whitespace after maxval");
  }
  ++pos;
  return {{static_cast<int>(width), static_cast<int>(height), channels}, pos};
}

std::size_t payload_size(const FrameShape& s) {
  return static_cast<std::size_t>(s.width) * static_cast<std::size_t>(s.height) *
         static_cast<std::size_t>(s.channels);
}

}  // namespace

Frame decode_pnm(std::span<const std::uint8_t> bytes, const std::string& origin) {
  const PnmHeader header = parse_pnm_header(bytes, origin);
  const std::size_t need = payload_size(header.shape);
  if (bytes.size() - header.data_offset != need) {
    throw DataError("PGM/PPM payload in '" + origin + "' has " +
                    std::to_string(bytes.size() - header.data_offset) + " bytes, expected " +
                    std::to_string(need));
  }
  std::vector<std::uint8_t> px(bytes.begin() + static_cast<std::ptrdiff_t>(header.data_offset),
                               bytes.end());
  return Frame(header.shape.width, header.shape.height, header.shape.channels, std::move(px));
}

std::vector<std::uint8_t> encode_pnm(const Frame& frame) {
  if (frame.empty()) {
    throw InvariantError("cannot encode an empty frame");
  }
  std::ostringstream head;
  head << (frame.channels() == 1 ? "P5" : "P6") << '\n'
       << frame.width() << ' ' << frame.height() << '\n'
       << 255 << '\n';
  const std::string h = head.str();
  std::vector<std::uint8_t> out;
  out.reserve(h.size() + frame.sample_count());
  out.insert(out.end(), h.begin(), h.end());
  out.insert(out.end(), frame.pixels().begin(), frame.pixels().end());
  return out;
}

Frame load_frame(const fs::path& path) {
  return decode_pnm(read_binary_file(path), path.string());
}

FrameShape probe_frame(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open '" + path.string() + "'");
  }
  std::vector<std::uint8_t> head(512);
  in.read(reinterpret_cast<char*>(head.data()), static_cast<std::streamsize>(head.size()));
  head.resize(static_cast<std::size_t>(in.gcount()));
  const PnmHeader header = parse_pnm_header(head, path.string());
  std::error_code ec;
  const auto file_size = fs::file_size(path, ec);
  if (ec) {
    throw DataError("cannot stat '" + path.string() + "'");
  }
  if (file_size != header.data_offset + payload_size(header.shape)) {
    throw DataError("PGM/PPM payload in '" + path.string() + "' does not match its header");
  }
  return header.shape;
}

void write_frame(const Frame& frame, const fs::path& path) {
  write_file_atomic(path, std::span<const std::uint8_t>(encode_pnm(frame)));
}

// ---------------------------------------------------------------------------
// Frame sequences

namespace {

struct FramePattern {
  std::string prefix;
  std::string suffix;
  int width = 0;  // zero-pad width; 0 means no padding
};

FramePattern parse_pattern(const std::string& pattern) {
  static const std::regex conv(R"(%(0(\d+))?d)");
  std::smatch m;
  if (!std::regex_search(pattern, m, conv)) {
    throw UsageError("frame pattern '" + pattern + "' has no %d conversion");
  }
  FramePattern fp;
  fp.prefix = m.prefix().str();
  fp.suffix = m.suffix().str();
  if (m[2].matched) fp.width = std::stoi(m[2].str());
  if (fp.suffix.find('%') != std::string::npos || fp.prefix.find('%') != std::string::npos) {
    throw UsageError("frame pattern '" + pattern + "' must have exactly one conversion");
  }
  return fp;
}

}  // namespace

std::string format_frame_name(const std::string& pattern, std::size_t index) {
  const FramePattern fp = parse_pattern(pattern);
  std::string digits = std::to_string(index);
  if (static_cast<int>(digits.size()) < fp.width) {
    digits.insert(0, static_cast<std::size_t>(fp.width) - digits.size(), '0');
  }
  return fp.prefix + digits + fp.suffix;
}

VideoSource load_frame_sequence(const fs::path& directory, const std::string& pattern,
                                double frame_rate, std::string video_id) {
  std::error_code ec;
  if (!fs::is_directory(directory, ec)) {
    throw DataError("frames directory '" + directory.string() + "' does not exist");
  }
  const FramePattern fp = parse_pattern(pattern);

  std::map<std::size_t, fs::path> by_index;
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.size() <= fp.prefix.size() + fp.suffix.size()) continue;
    if (name.compare(0, fp.prefix.size(), fp.prefix) != 0) continue;
    if (name.compare(name.size() - fp.suffix.size(), fp.suffix.size(), fp.suffix) != 0) continue;
    const std::string digits =
        name.substr(fp.prefix.size(), name.size() - fp.prefix.size() - fp.suffix.size());
    if (!std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c); })) {
      continue;
    }
    const std::size_t index = std::stoull(digits);
    if (format_frame_name(pattern, index) != name) {
      throw DataError("frame file '" + name + "' is not canonically numbered for pattern '" +
                      pattern + "'");
    }
    by_index.emplace(index, entry.path());
  }

  if (by_index.empty()) {
    throw DataError("no frames matching '" + pattern + "' in '" + directory.string() + "'");
  }
  std::vector<fs::path> paths;
  paths.reserve(by_index.size());
  std::size_t expected = 0;
  for (auto& [index, path] : by_index) {
    if (index != expected) {
      throw DataError("frame indices are not dense: expected index " + std::to_string(expected) +
                      ", found " + std::to_string(index));
    }
    paths.push_back(std::move(path));
    ++expected;
  }

  const FrameShape shape = probe_frame(paths.front());
  for (std::size_t i = 1; i < paths.size(); ++i) {
    if (probe_frame(paths[i]) != shape) {
      throw DataError("mixed frame dimensions: '" + paths[i].filename().string() +
                      "' differs from '" + paths.front().filename().string() + "'");
    }
  }

  if (video_id.empty()) {
    video_id = fs::absolute(directory).lexically_normal().filename().string();
    if (video_id.empty()) video_id = fs::absolute(directory).parent_path().filename().string();
  }
  auto shared = std::make_shared<const std::vector<fs::path>>(std::move(paths));
  const std::size_t count = shared->size();
  return VideoSource(std::move(video_id), frame_rate, count, shape,
                     [shared](std::size_t i) { return load_frame((*shared)[i]); });
}

Frame to_grayscale(const Frame& frame) {
  if (frame.channels() == 1) return frame;
  if (frame.channels() != 3) {
    throw InvariantError("unsupported channel count " + std::to_string(frame.channels()));
  }
  const auto src = frame.pixels();
  const std::size_t n = static_cast<std::size_t>(frame.width()) *
                        static_cast<std::size_t>(frame.height());
  std::vector<std::uint8_t> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned r = src[3 * i];
    const unsigned g = src[3 * i + 1];
    const unsigned b = src[3 * i + 2];
    // Weights scaled by 1000 so rounding half up is exact; max is 255000+500.
    out[i] = static_cast<std::uint8_t>((299 * r + 587 * g + 114 * b + 500) / 1000);
  }
  return Frame(frame.width(), frame.height(), 1, std::move(out));
}

}  // namespace tsad
