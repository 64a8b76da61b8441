#include "tsad/detect.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "tsad/error.hpp"
#include "tsad/io.hpp"

namespace tsad {

using nlohmann::json;

std::string_view to_string(ObjectClass c) noexcept {
  return c == ObjectClass::vehicle ? "vehicle" : "traffic_light";
}

std::optional<ObjectClass> parse_object_class(std::string_view s) noexcept {
  if (s == "vehicle") return ObjectClass::vehicle;
  if (s == "traffic_light") return ObjectClass::traffic_light;
  return std::nullopt;
}

void DetectorConfig::validate() const {
  if (diff_threshold <= 0 || diff_threshold > 255) {
    throw UsageError("diff_threshold must be in (0, 255]");
  }
  if (min_area <= 0 || min_area > max_area) {
    throw UsageError("area bounds must satisfy 0 < min_area <= max_area");
  }
  if (connectivity != 4 && connectivity != 8) {
    throw UsageError("connectivity must be 4 or 8");
  }
}

Frame absolute_difference(const Frame& a, const Frame& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw DataError("cannot difference a " + std::to_string(a.width()) + "x" +
                    std::to_string(a.height()) + " image against a " +
                    std::to_string(b.width()) + "x" + std::to_string(b.height()) + " image");
  }
  const Frame ga = to_grayscale(a);
  const Frame gb = to_grayscale(b);
  std::vector<std::uint8_t> out(ga.sample_count());
  const auto pa = ga.pixels();
  const auto pb = gb.pixels();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(pa[i] > pb[i] ? pa[i] - pb[i] : pb[i] - pa[i]);
  }
  return Frame(ga.width(), ga.height(), 1, std::move(out));
}

Mask threshold_mask(const Frame& difference, int threshold) {
  if (difference.channels() != 1) throw InvariantError("difference image must be single-channel");
  Mask m{difference.width(), difference.height(), std::vector<std::uint8_t>(difference.sample_count())};
  const auto px = difference.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) m.bits[i] = px[i] > threshold ? 1 : 0;
  return m;
}

Mask majority_filter(const Mask& mask) {
  Mask out{mask.width, mask.height, std::vector<std::uint8_t>(mask.bits.size())};
  const int w = mask.width;
  const int h = mask.height;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int votes = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        const int yy = std::clamp(y + dy, 0, h - 1);
        for (int dx = -1; dx <= 1; ++dx) {
          votes += mask.at(std::clamp(x + dx, 0, w - 1), yy) ? 1 : 0;
        }
      }
      out.bits[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) +
               static_cast<std::size_t>(x)] = votes >= 5 ? 1 : 0;
    }
  }
  return out;
}

std::vector<Component> connected_components(const Mask& mask, const Frame& difference,
                                            int connectivity) {
  if (connectivity != 4 && connectivity != 8) throw UsageError("connectivity must be 4 or 8");
  const int w = mask.width;
  const int h = mask.height;
  const auto diff = difference.pixels();
  std::vector<std::uint8_t> visited(mask.bits.size(), 0);
  std::vector<std::pair<int, int>> todo;
  std::vector<Component> out;

  auto idx = [w](int x, int y) {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x);
  };

  for (int y0 = 0; y0 < h; ++y0) {
    for (int x0 = 0; x0 < w; ++x0) {
      if (!mask.bits[idx(x0, y0)] || visited[idx(x0, y0)]) continue;
      int min_x = x0, max_x = x0, min_y = y0, max_y = y0;
      std::size_t area = 0;
      double diff_sum = 0.0;
      visited[idx(x0, y0)] = 1;
      todo.assign(1, {x0, y0});
      while (!todo.empty()) {
        const auto [x, y] = todo.back();
        todo.pop_back();
        ++area;
        diff_sum += diff[idx(x, y)];
        min_x = std::min(min_x, x);
        max_x = std::max(max_x, x);
        min_y = std::min(min_y, y);
        max_y = std::max(max_y, y);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            if (connectivity == 4 && dx != 0 && dy != 0) continue;
            const int nx = x + dx;
            const int ny = y + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const std::size_t n = idx(nx, ny);
            if (mask.bits[n] && !visited[n]) {
              visited[n] = 1;
              todo.emplace_back(nx, ny);
            }
          }
        }
      }
      out.push_back({{min_x, min_y, max_x - min_x + 1, max_y - min_y + 1},
                     area,
                     diff_sum / static_cast<double>(area),
                     y0,
                     x0});
    }
  }
  return out;
}

std::vector<Detection> detect_static_objects(const BackgroundImage& bg,
                                             const ReferenceBackground& ref,
                                             const DetectorConfig& cfg) {
  cfg.validate();
  const Frame diff = absolute_difference(bg.image, ref.image);
  Mask mask = threshold_mask(diff, cfg.diff_threshold);
  if (cfg.denoise) mask = majority_filter(mask);

  std::vector<Detection> out;
  for (const Component& c : connected_components(mask, diff, cfg.connectivity)) {
    if (c.area < static_cast<std::size_t>(cfg.min_area) ||
        c.area > static_cast<std::size_t>(cfg.max_area)) {
      continue;
    }
    out.push_back({bg.video_id, bg.label_index, ObjectClass::vehicle, c.bbox,
                   std::clamp(c.mean_difference / 255.0, 0.0, 1.0)});
  }
  std::stable_sort(out.begin(), out.end(), [](const Detection& a, const Detection& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.bbox.y != b.bbox.y) return a.bbox.y < b.bbox.y;
    return a.bbox.x < b.bbox.x;
  });
  return out;
}

// ---------------------------------------------------------------------------
// JSON Lines

namespace {

Detection detection_from_json(const json& j, std::size_t line_no,
                              const std::optional<FrameBounds>& bounds) {
  auto fail = [&](const std::string& why) {
    return DataError("detections line " + std::to_string(line_no) + ": " + why);
  };
  if (!j.is_object()) throw fail("expected a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (key != "video_id" && key != "label_index" && key != "class" && key != "bbox" &&
        key != "score") {
      throw fail("unknown field '" + key + "'");
    }
  }
  auto require = [&](const char* key) -> const json& {
    const auto it = j.find(key);
    if (it == j.end()) throw fail(std::string("missing field '") + key + "'");
    return *it;
  };

  Detection d;
  const json& vid = require("video_id");
  if (!vid.is_string() || vid.get_ref<const std::string&>().empty()) {
    throw fail("'video_id' must be a non-empty string");
  }
  d.video_id = vid.get<std::string>();

  const json& li = require("label_index");
  if (!li.is_number_integer() || (!li.is_number_unsigned() && li.get<long long>() < 0)) {
    throw fail("'label_index' must be a non-negative integer");
  }
  d.label_index = li.get<std::size_t>();

  const json& cls = require("class");
  if (!cls.is_string()) throw fail("'class' must be a string");
  const auto parsed = parse_object_class(cls.get_ref<const std::string&>());
  if (!parsed) throw fail("unknown class '" + cls.get<std::string>() + "'");
  d.cls = *parsed;

  const json& bb = require("bbox");
  if (!bb.is_array() || bb.size() != 4) throw fail("'bbox' must be an array [x,y,w,h]");
  long long v[4];
  for (std::size_t k = 0; k < 4; ++k) {
    if (!bb[k].is_number_integer()) throw fail("'bbox' entries must be integers");
    v[k] = bb[k].get<long long>();
  }
  if (v[0] < 0 || v[1] < 0) throw fail("bbox origin lies outside the frame");
  if (v[2] < 1 || v[3] < 1) throw fail("bbox width and height must be at least 1");
  if (bounds && (v[0] + v[2] > bounds->width || v[1] + v[3] > bounds->height)) {
    throw fail("bbox extends beyond the " + std::to_string(bounds->width) + "x" +
               std::to_string(bounds->height) + " frame");
  }
  if (v[0] + v[2] > 1'000'000 || v[1] + v[3] > 1'000'000) throw fail("bbox is implausibly large");
  d.bbox = {static_cast<int>(v[0]), static_cast<int>(v[1]), static_cast<int>(v[2]),
            static_cast<int>(v[3])};

  const json& sc = require("score");
  if (!sc.is_number()) throw fail("'score' must be a number");
  d.score = sc.get<double>();
  if (!(d.score >= 0.0 && d.score <= 1.0)) throw fail("'score' must lie in [0,1]");
  return d;
}

}  // namespace

std::vector<Detection> parse_detections(std::string_view text,
                                        std::optional<FrameBounds> bounds) {
  std::vector<Detection> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError("detections line " + std::to_string(line_no) +
                      ": malformed JSON: " + e.what());
    }
    out.push_back(detection_from_json(j, line_no, bounds));
  }
  return out;
}

std::vector<Detection> load_detections(const std::filesystem::path& path,
                                       std::optional<FrameBounds> bounds) {
  return parse_detections(read_text_file(path), bounds);
}

std::string detection_to_json_line(const Detection& d) {
  nlohmann::ordered_json j;
  j["video_id"] = d.video_id;
  j["label_index"] = d.label_index;
  j["class"] = std::string(to_string(d.cls));
  j["bbox"] = {d.bbox.x, d.bbox.y, d.bbox.w, d.bbox.h};
  j["score"] = d.score;
  return j.dump();
}

std::string write_detections(const std::vector<Detection>& detections) {
  std::string out;
  for (const auto& d : detections) {
    out += detection_to_json_line(d);
    out += '\n';
  }
  return out;
}

LabelSequence derive_labels(const std::vector<Detection>& detections, std::size_t num_labels,
                            const std::string& video_id, double period_seconds) {
  LabelSequence seq{video_id, std::vector<Label>(num_labels, Label::normal), period_seconds};
  for (const Detection& d : detections) {
    if (d.video_id != video_id) {
      throw DataError("detection for video '" + d.video_id + "' passed while labelling '" +
                      video_id + "'");
    }
    if (d.label_index >= num_labels) {
      throw DataError("detection label_index " + std::to_string(d.label_index) +
                      " is out of range for " + std::to_string(num_labels) + " labels");
    }
    if (d.cls == ObjectClass::vehicle) seq.labels[d.label_index] = Label::abnormal;
  }
  return seq;
}

}  // namespace tsad
