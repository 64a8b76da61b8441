#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tsad/labels.hpp"
#include "tsad/media.hpp"

namespace tsad {

// ---------------------------------------------------------------------------
// Label streams

struct LabelScenario {
  std::size_t length = 0;
  std::vector<std::pair<std::size_t, std::size_t>> anomaly_intervals;  // half-open, sorted
  double flip_prob = 0.0;
  std::uint64_t seed = 0;
  std::string video_id = "sim";
  double period_seconds = 3.3;

  void validate() const;
};

struct LabelStreams {
  LabelSequence noisy;
  LabelSequence clean;
};

/// Clean labels mark the anomaly intervals; the noisy copy flips each label
/// independently with probability flip_prob, seeded by `seed`.
LabelStreams gen_label_stream(const LabelScenario& s);

// ---------------------------------------------------------------------------
// Videos

/// Flat rectangle moving with constant velocity (pixels per frame), wrapping
/// around the frame edges. Position is the top-left corner at frame 0.
struct Actor {
  int id = 0;
  double x = 0.0;
  double y = 0.0;
  int w = 40;
  int h = 20;
  double vx = 8.0;
  double vy = 0.0;
  int intensity = 220;
};

struct StopEvent {
  int actor_id = 0;
  std::size_t stop_frame = 0;
};

/// Static rectangle drawn from frame 0 until `lifetime_frames` (0 means for
/// the whole video).
struct StaticPatch {
  int x = 0;
  int y = 0;
  int w = 1;
  int h = 1;
  int intensity = 255;
  std::size_t lifetime_frames = 0;
};

struct VideoScenario {
  std::string video_id = "sim";
  int width = 768;
  int height = 384;
  double fps = 30.0;
  std::size_t duration_frames = 300;
  int background_value = 100;
  int texture_amplitude = 0;       // static per-pixel texture, +-amplitude
  int illumination_amplitude = 0;  // per-frame global offset, +-amplitude
  int jitter_px = 0;               // per-frame global shift, +-jitter_px on each axis
  std::vector<Actor> actors;
  std::vector<StopEvent> stop_events;
  std::vector<StaticPatch> patches;
  std::uint64_t seed = 0;

  void validate() const;
  std::optional<std::size_t> stop_frame_of(int actor_id) const;
};

/// Renders frame `index` (grayscale). Pure in (scenario, index).
Frame render_frame(const VideoScenario& s, std::size_t index);

/// In-memory video whose frames are rendered on demand.
VideoSource scenario_video(const VideoScenario& s);

struct ActorTruth {
  int actor_id = 0;
  std::optional<std::size_t> stop_frame;
  std::optional<double> stop_seconds;
};

struct Manifest {
  std::string video_id;
  double fps = 30.0;
  std::size_t duration_frames = 0;
  std::vector<ActorTruth> actors;
};

Manifest make_manifest(const VideoScenario& s);
std::string manifest_to_json(const Manifest& m);

/// Writes `f_%06d.pgm` frames and then `manifest.json` into out_dir.
Manifest gen_video(const VideoScenario& s, const std::filesystem::path& out_dir);

struct NoisePatchSpec {
  int count = 6;
  int size = 6;  // side length; 36 px is below the detector's default min_area
  int intensity = 255;
  std::size_t lifetime_frames = 100;
};

/// Adds `spec.count` small high-contrast static rectangles at seeded,
/// non-overlapping positions. count == 0 returns the scenario unchanged.
VideoScenario gen_noise_patch_scenario(const VideoScenario& s, const NoisePatchSpec& spec = {});

// Scenario files. Unknown keys are rejected.
VideoScenario parse_video_scenario(std::string_view json_text);
std::string video_scenario_to_json(const VideoScenario& s);
LabelScenario parse_label_scenario(std::string_view json_text);
std::string label_scenario_to_json(const LabelScenario& s);

}  // namespace tsad
