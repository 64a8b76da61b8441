#include "tsad/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <json.hpp>

#include "tsad/error.hpp"
#include "tsad/io.hpp"

namespace tsad {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Uniform in [0, 1) from the top 53 bits; independent of the standard
// library's distribution implementations.
double unit_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int uniform_int(std::uint64_t key, int lo, int hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<int>(splitmix64(key) % span);
}

int wrap(long long v, int n) {
  const long long m = v % n;
  return static_cast<int>(m < 0 ? m + n : m);
}

}  // namespace

// ---------------------------------------------------------------------------
// Label streams

void LabelScenario::validate() const {
  if (!(flip_prob >= 0.0 && flip_prob < 1.0)) throw UsageError("flip_prob must lie in [0, 1)");
  if (!(period_seconds > 0.0)) throw UsageError("period_seconds must be positive");
  std::size_t prev_end = 0;
  for (std::size_t k = 0; k < anomaly_intervals.size(); ++k) {
    const auto [start, end] = anomaly_intervals[k];
    if (start >= end || end > length) {
      throw UsageError("anomaly interval [" + std::to_string(start) + ", " + std::to_string(end) +
                       ") is empty or exceeds length " + std::to_string(length));
    }
    if (k > 0 && start < prev_end) {
      throw UsageError("anomaly intervals must be sorted and non-overlapping");
    }
    prev_end = end;
  }
}

LabelStreams gen_label_stream(const LabelScenario& s) {
  s.validate();
  LabelStreams out;
  out.clean = LabelSequence{s.video_id, std::vector<Label>(s.length, Label::normal), s.period_seconds};
  for (const auto& [start, end] : s.anomaly_intervals) {
    std::fill(out.clean.labels.begin() + static_cast<std::ptrdiff_t>(start),
              out.clean.labels.begin() + static_cast<std::ptrdiff_t>(end), Label::abnormal);
  }
  out.noisy = out.clean;
  std::mt19937_64 rng(s.seed);
  for (auto& l : out.noisy.labels) {
    if (unit_double(rng) < s.flip_prob) {
      l = l == Label::abnormal ? Label::normal : Label::abnormal;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Videos

void VideoScenario::validate() const {
  if (video_id.empty()) throw UsageError("scenario video_id must not be empty");
  if (width <= 0 || height <= 0) throw UsageError("scenario dimensions must be positive");
  if (!(fps > 0.0)) throw UsageError("scenario fps must be positive");
  if (duration_frames == 0) throw UsageError("scenario duration_frames must be positive");
  auto check_intensity = [](int v, const char* what) {
    if (v < 0 || v > 255) throw UsageError(std::string(what) + " must lie in [0, 255]");
  };
  check_intensity(background_value, "background_value");
  if (texture_amplitude < 0 || illumination_amplitude < 0 || jitter_px < 0) {
    throw UsageError("texture, illumination and jitter amplitudes must be non-negative");
  }
  if (jitter_px * 2 >= std::min(width, height)) throw UsageError("jitter_px is too large for the frame");

  std::set<int> ids;
  for (const Actor& a : actors) {
    if (!ids.insert(a.id).second) throw UsageError("duplicate actor id " + std::to_string(a.id));
    if (a.w <= 0 || a.h <= 0 || a.w > width || a.h > height) {
      throw UsageError("actor " + std::to_string(a.id) + " does not fit in the frame");
    }
    if (!std::isfinite(a.x) || !std::isfinite(a.y) || !std::isfinite(a.vx) || !std::isfinite(a.vy)) {
      throw UsageError("actor " + std::to_string(a.id) + " has a non-finite position or velocity");
    }
    check_intensity(a.intensity, "actor intensity");
  }
  std::set<int> stopped;
  for (const StopEvent& e : stop_events) {
    if (!ids.contains(e.actor_id)) {
      throw UsageError("stop event names unknown actor " + std::to_string(e.actor_id));
    }
    if (!stopped.insert(e.actor_id).second) {
      throw UsageError("actor " + std::to_string(e.actor_id) + " has more than one stop event");
    }
    if (e.stop_frame >= duration_frames) {
      throw UsageError("stop_frame " + std::to_string(e.stop_frame) + " is not before duration_frames");
    }
  }
  for (const StaticPatch& p : patches) {
    if (p.w <= 0 || p.h <= 0 || p.x < 0 || p.y < 0 || p.x + p.w > width || p.y + p.h > height) {
      throw UsageError("static patch lies outside the frame");
    }
    check_intensity(p.intensity, "patch intensity");
  }
}

std::optional<std::size_t> VideoScenario::stop_frame_of(int actor_id) const {
  for (const StopEvent& e : stop_events) {
    if (e.actor_id == actor_id) return e.stop_frame;
  }
  return std::nullopt;
}

Frame render_frame(const VideoScenario& s, std::size_t index) {
  const int w = s.width;
  const int h = s.height;
  const std::uint64_t frame_key = splitmix64(s.seed ^ (0xA5A5A5A5ull + index * 0x100000001B3ull));

  int offset = 0;
  if (s.illumination_amplitude > 0) {
    offset = uniform_int(frame_key ^ 0x1111, -s.illumination_amplitude, s.illumination_amplitude);
  }

  std::vector<std::uint8_t> canvas(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  auto put = [&](int x, int y, int v) {
    canvas[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)] =
        static_cast<std::uint8_t>(std::clamp(v, 0, 255));
  };

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int v = s.background_value;
      if (s.texture_amplitude > 0) {
        const std::uint64_t key = s.seed * 0x9E3779B97F4A7C15ull +
                                  static_cast<std::uint64_t>(y) * 131071ull +
                                  static_cast<std::uint64_t>(x);
        v += uniform_int(key, -s.texture_amplitude, s.texture_amplitude);
      }
      put(x, y, v + offset);
    }
  }

  for (const StaticPatch& p : s.patches) {
    if (p.lifetime_frames != 0 && index >= p.lifetime_frames) continue;
    for (int y = p.y; y < p.y + p.h; ++y) {
      for (int x = p.x; x < p.x + p.w; ++x) put(x, y, p.intensity + offset);
    }
  }

  for (const Actor& a : s.actors) {
    std::size_t t = index;
    if (const auto stop = s.stop_frame_of(a.id)) t = std::min(t, *stop);
    const long long x0 = std::llround(std::floor(a.x + a.vx * static_cast<double>(t)));
    const long long y0 = std::llround(std::floor(a.y + a.vy * static_cast<double>(t)));
    for (int dy = 0; dy < a.h; ++dy) {
      const int y = wrap(y0 + dy, h);
      for (int dx = 0; dx < a.w; ++dx) put(wrap(x0 + dx, w), y, a.intensity + offset);
    }
  }

  if (s.jitter_px > 0) {
    const int sx = uniform_int(frame_key ^ 0x2222, -s.jitter_px, s.jitter_px);
    const int sy = uniform_int(frame_key ^ 0x3333, -s.jitter_px, s.jitter_px);
    std::vector<std::uint8_t> shifted(canvas.size());
    for (int y = 0; y < h; ++y) {
      const int src_y = std::clamp(y - sy, 0, h - 1);
      for (int x = 0; x < w; ++x) {
        const int src_x = std::clamp(x - sx, 0, w - 1);
        shifted[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)] =
            canvas[static_cast<std::size_t>(src_y) * static_cast<std::size_t>(w) +
                   static_cast<std::size_t>(src_x)];
      }
    }
    canvas.swap(shifted);
  }
  return Frame(w, h, 1, std::move(canvas));
}

VideoSource scenario_video(const VideoScenario& s) {
  s.validate();
  auto shared = std::make_shared<const VideoScenario>(s);
  return VideoSource(s.video_id, s.fps, s.duration_frames, FrameShape{s.width, s.height, 1},
                     [shared](std::size_t i) { return render_frame(*shared, i); });
}

Manifest make_manifest(const VideoScenario& s) {
  Manifest m{s.video_id, s.fps, s.duration_frames, {}};
  for (const Actor& a : s.actors) {
    ActorTruth t{a.id, s.stop_frame_of(a.id), std::nullopt};
    if (t.stop_frame) t.stop_seconds = static_cast<double>(*t.stop_frame) / s.fps;
    m.actors.push_back(t);
  }
  return m;
}

std::string manifest_to_json(const Manifest& m) {
  nlohmann::ordered_json j;
  j["video_id"] = m.video_id;
  j["fps"] = m.fps;
  j["duration_frames"] = m.duration_frames;
  auto actors = nlohmann::ordered_json::array();
  for (const auto& a : m.actors) {
    nlohmann::ordered_json e;
    e["actor_id"] = a.actor_id;
    e["stop_frame"] = a.stop_frame ? nlohmann::ordered_json(*a.stop_frame) : nullptr;
    e["stop_seconds"] = a.stop_seconds ? nlohmann::ordered_json(*a.stop_seconds) : nullptr;
    actors.push_back(std::move(e));
  }
  j["actors"] = std::move(actors);
  return j.dump(2) + "\n";
}

Manifest gen_video(const VideoScenario& s, const fs::path& out_dir) {
  s.validate();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) {
    throw DataError("cannot create output directory '" + out_dir.string() + "'");
  }
  for (std::size_t i = 0; i < s.duration_frames; ++i) {
    write_frame(render_frame(s, i), out_dir / format_frame_name("f_%06d.pgm", i));
  }
  Manifest m = make_manifest(s);
  write_file_atomic(out_dir / "manifest.json", manifest_to_json(m));
  return m;
}

VideoScenario gen_noise_patch_scenario(const VideoScenario& s, const NoisePatchSpec& spec) {
  if (spec.count < 0 || spec.size <= 0) throw UsageError("noise patch count/size are invalid");
  if (spec.count == 0) return s;
  if (spec.size > s.width || spec.size > s.height) throw UsageError("noise patch larger than frame");

  VideoScenario out = s;
  std::mt19937_64 rng(splitmix64(s.seed ^ 0x6E6F697365ull));
  const int gap = 2;
  int attempts = 0;
  while (static_cast<int>(out.patches.size() - s.patches.size()) < spec.count) {
    if (++attempts > 10000) throw UsageError("cannot place noise patches without overlap");
    const int x = static_cast<int>(rng() % static_cast<std::uint64_t>(s.width - spec.size + 1));
    const int y = static_cast<int>(rng() % static_cast<std::uint64_t>(s.height - spec.size + 1));
    const bool clash = std::any_of(out.patches.begin(), out.patches.end(), [&](const StaticPatch& p) {
      return x < p.x + p.w + gap && p.x < x + spec.size + gap && y < p.y + p.h + gap &&
             p.y < y + spec.size + gap;
    });
    if (clash) continue;
    out.patches.push_back({x, y, spec.size, spec.size, spec.intensity, spec.lifetime_frames});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scenario files

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
  if (!j.is_object()) throw DataError(where + ": expected a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
      throw DataError(where + ": unknown key '" + key + "'");
    }
  }
}

template <typename T>
void read_opt(const json& j, const char* key, T& out, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception& e) {
    throw DataError(where + ": key '" + key + "' has the wrong type");
  }
}

json parse_json(std::string_view text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(where + ": malformed JSON: " + e.what());
  }
}

}  // namespace

VideoScenario parse_video_scenario(std::string_view text) {
  const std::string where = "video scenario";
  const json j = parse_json(text, where);
  reject_unknown(j, {"video_id", "width", "height", "fps", "duration_frames", "background_value",
                     "texture_amplitude", "illumination_amplitude", "jitter_px", "actors",
                     "stop_events", "patches", "seed"},
                 where);
  VideoScenario s;
  read_opt(j, "video_id", s.video_id, where);
  read_opt(j, "width", s.width, where);
  read_opt(j, "height", s.height, where);
  read_opt(j, "fps", s.fps, where);
  read_opt(j, "duration_frames", s.duration_frames, where);
  read_opt(j, "background_value", s.background_value, where);
  read_opt(j, "texture_amplitude", s.texture_amplitude, where);
  read_opt(j, "illumination_amplitude", s.illumination_amplitude, where);
  read_opt(j, "jitter_px", s.jitter_px, where);
  read_opt(j, "seed", s.seed, where);
  if (const auto it = j.find("actors"); it != j.end()) {
    if (!it->is_array()) throw DataError(where + ": 'actors' must be an array");
    for (const auto& a : *it) {
      reject_unknown(a, {"id", "x", "y", "w", "h", "vx", "vy", "intensity"}, where + " actor");
      Actor actor;
      read_opt(a, "id", actor.id, where);
      read_opt(a, "x", actor.x, where);
      read_opt(a, "y", actor.y, where);
      read_opt(a, "w", actor.w, where);
      read_opt(a, "h", actor.h, where);
      read_opt(a, "vx", actor.vx, where);
      read_opt(a, "vy", actor.vy, where);
      read_opt(a, "intensity", actor.intensity, where);
      s.actors.push_back(actor);
    }
  }
  if (const auto it = j.find("stop_events"); it != j.end()) {
    if (!it->is_array()) throw DataError(where + ": 'stop_events' must be an array");
    for (const auto& e : *it) {
      reject_unknown(e, {"actor_id", "stop_frame"}, where + " stop event");
      if (!e.contains("actor_id") || !e.contains("stop_frame")) {
        throw DataError(where + ": stop events need 'actor_id' and 'stop_frame'");
      }
      StopEvent ev;
      read_opt(e, "actor_id", ev.actor_id, where);
      read_opt(e, "stop_frame", ev.stop_frame, where);
      s.stop_events.push_back(ev);
    }
  }
  if (const auto it = j.find("patches"); it != j.end()) {
    if (!it->is_array()) throw DataError(where + ": 'patches' must be an array");
    for (const auto& p : *it) {
      reject_unknown(p, {"x", "y", "w", "h", "intensity", "lifetime_frames"}, where + " patch");
      StaticPatch patch;
      read_opt(p, "x", patch.x, where);
      read_opt(p, "y", patch.y, where);
      read_opt(p, "w", patch.w, where);
      read_opt(p, "h", patch.h, where);
      read_opt(p, "intensity", patch.intensity, where);
      read_opt(p, "lifetime_frames", patch.lifetime_frames, where);
      s.patches.push_back(patch);
    }
  }
  s.validate();
  return s;
}

std::string video_scenario_to_json(const VideoScenario& s) {
  nlohmann::ordered_json j;
  j["video_id"] = s.video_id;
  j["width"] = s.width;
  j["height"] = s.height;
  j["fps"] = s.fps;
  j["duration_frames"] = s.duration_frames;
  j["background_value"] = s.background_value;
  j["texture_amplitude"] = s.texture_amplitude;
  j["illumination_amplitude"] = s.illumination_amplitude;
  j["jitter_px"] = s.jitter_px;
  j["actors"] = nlohmann::ordered_json::array();
  for (const Actor& a : s.actors) {
    j["actors"].push_back({{"id", a.id}, {"x", a.x}, {"y", a.y}, {"w", a.w}, {"h", a.h},
                           {"vx", a.vx}, {"vy", a.vy}, {"intensity", a.intensity}});
  }
  j["stop_events"] = nlohmann::ordered_json::array();
  for (const StopEvent& e : s.stop_events) {
    j["stop_events"].push_back({{"actor_id", e.actor_id}, {"stop_frame", e.stop_frame}});
  }
  j["patches"] = nlohmann::ordered_json::array();
  for (const StaticPatch& p : s.patches) {
    j["patches"].push_back({{"x", p.x}, {"y", p.y}, {"w", p.w}, {"h", p.h},
                            {"intensity", p.intensity}, {"lifetime_frames", p.lifetime_frames}});
  }
  j["seed"] = s.seed;
  return j.dump(2) + "\n";
}

LabelScenario parse_label_scenario(std::string_view text) {
  const std::string where = "label scenario";
  const json j = parse_json(text, where);
  reject_unknown(j, {"video_id", "length", "anomaly_intervals", "flip_prob", "seed", "period_seconds"},
                 where);
  LabelScenario s;
  read_opt(j, "video_id", s.video_id, where);
  read_opt(j, "length", s.length, where);
  read_opt(j, "flip_prob", s.flip_prob, where);
  read_opt(j, "seed", s.seed, where);
  read_opt(j, "period_seconds", s.period_seconds, where);
  if (const auto it = j.find("anomaly_intervals"); it != j.end()) {
    if (!it->is_array()) throw DataError(where + ": 'anomaly_intervals' must be an array");
    for (const auto& iv : *it) {
      if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number_unsigned() || !iv[1].is_number_unsigned()) {
        throw DataError(where + ": intervals must be [start, end] pairs of non-negative integers");
      }
      s.anomaly_intervals.emplace_back(iv[0].get<std::size_t>(), iv[1].get<std::size_t>());
    }
  }
  s.validate();
  return s;
}

std::string label_scenario_to_json(const LabelScenario& s) {
  nlohmann::ordered_json j;
  j["video_id"] = s.video_id;
  j["length"] = s.length;
  j["anomaly_intervals"] = nlohmann::ordered_json::array();
  for (const auto& [a, b] : s.anomaly_intervals) j["anomaly_intervals"].push_back({a, b});
  j["flip_prob"] = s.flip_prob;
  j["seed"] = s.seed;
  j["period_seconds"] = s.period_seconds;
  return j.dump(2) + "\n";
}

}  // namespace tsad
