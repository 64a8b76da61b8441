#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tsad/background.hpp"
#include "tsad/labels.hpp"
#include "tsad/media.hpp"

namespace tsad {

enum class ObjectClass { vehicle, traffic_light };

std::string_view to_string(ObjectClass c) noexcept;
std::optional<ObjectClass> parse_object_class(std::string_view s) noexcept;

struct BBox {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  friend bool operator==(const BBox&, const BBox&) = default;
};

struct Detection {
  std::string video_id;
  std::size_t label_index = 0;
  ObjectClass cls = ObjectClass::vehicle;
  BBox bbox;
  double score = 0.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

struct DetectorConfig {
  int diff_threshold = 25;
  int min_area = 64;
  int max_area = 40000;
  int connectivity = 8;
  bool denoise = true;

  void validate() const;
  friend bool operator==(const DetectorConfig&, const DetectorConfig&) = default;
};

/// Binary image, one byte per pixel (0 or 1).
struct Mask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  bool at(int x, int y) const {
    return bits[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                static_cast<std::size_t>(x)] != 0;
  }
};

struct Component {
  BBox bbox;
  std::size_t area = 0;
  double mean_difference = 0.0;  // mean |bg - ref| over the component, 0..255
  int top = 0;                   // y, x of the first pixel in raster order
  int left = 0;
};

/// |gray(a) - gray(b)| per pixel.
Frame absolute_difference(const Frame& a, const Frame& b);

/// Pixels whose difference exceeds `threshold`.
Mask threshold_mask(const Frame& difference, int threshold);

/// 3x3 majority vote with edge clamping: a pixel is foreground iff at least
/// 5 of the 9 samples in its neighbourhood are.
Mask majority_filter(const Mask& mask);

/// Connected components (4- or 8-connectivity) in raster order of their first
/// pixel. `difference` supplies per-component mean intensities.
std::vector<Component> connected_components(const Mask& mask, const Frame& difference,
                                            int connectivity = 8);

/// Static-object baseline: differences the short-horizon background against
/// the long-horizon reference and reports each foreground blob within the
/// area bounds as a `vehicle`. Sorted by score descending, then y, then x.
std::vector<Detection> detect_static_objects(const BackgroundImage& bg,
                                             const ReferenceBackground& ref,
                                             const DetectorConfig& cfg);

/// Bounds used when validating bboxes from external detectors.
struct FrameBounds {
  int width = 0;
  int height = 0;
};

/// One JSON object per line; blank lines are skipped. When `bounds` is given
/// every bbox must lie inside it.
std::vector<Detection> parse_detections(std::string_view text,
                                        std::optional<FrameBounds> bounds = std::nullopt);
std::vector<Detection> load_detections(const std::filesystem::path& path,
                                       std::optional<FrameBounds> bounds = std::nullopt);

std::string detection_to_json_line(const Detection& d);
std::string write_detections(const std::vector<Detection>& detections);

/// labels[i] is Abnormal iff some vehicle detection has label_index i.
/// Traffic-light detections are accepted but never affect the label.
LabelSequence derive_labels(const std::vector<Detection>& detections, std::size_t num_labels,
                            const std::string& video_id, double period_seconds = 3.3);

}  // namespace tsad
