#include "cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "tsad/tsad.hpp"

namespace tsad::cli {
namespace fs = std::filesystem;

namespace {

// Flag values that override the config file when given.
struct Overrides {
  std::string config_path;
  std::optional<int> stack_len, stride, period, patch_size, reference_horizon;
  std::optional<int> diff_threshold, min_area, max_area;
  bool no_denoise = false;
  std::optional<double> period_seconds, match_window, rmse_cap, fps;
  std::optional<std::string> frame_pattern;
};

void add_config_flag(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config_path, "Pipeline config JSON (flags win)");
}

void add_io_flags(CLI::App* app, Overrides& o) {
  app->add_option("--frame-pattern", o.frame_pattern, "Frame filename pattern (default f_%06d.pgm)");
  app->add_option("--fps", o.fps, "Source frame rate (default 30)");
}

void add_background_flags(CLI::App* app, Overrides& o) {
  app->add_option("--stack-len", o.stack_len, "Frames per stack (default 20)");
  app->add_option("--stride", o.stride, "Sampling stride in frames (default 5)");
  app->add_option("--period", o.period, "Source frames per label period (default 100)");
  app->add_option("--patch-size", o.patch_size, "Patch side in pixels (default 128)");
  app->add_option("--reference-horizon", o.reference_horizon,
                  "Frames in the reference median (default 300)");
}

void add_detector_flags(CLI::App* app, Overrides& o) {
  app->add_option("--diff-threshold", o.diff_threshold, "Difference threshold (default 25)");
  app->add_option("--min-area", o.min_area, "Minimum blob area in pixels (default 64)");
  app->add_option("--max-area", o.max_area, "Maximum blob area in pixels (default 40000)");
  app->add_flag("--no-denoise", o.no_denoise, "Disable the 3x3 majority filter");
}

void add_smoothing_flags(CLI::App* app, Overrides& o) {
  app->add_option("--period-seconds", o.period_seconds, "Seconds per label (default 3.3)");
}

void add_metrics_flags(CLI::App* app, Overrides& o) {
  app->add_option("--match-window", o.match_window, "TP match window in seconds (default 10)");
  app->add_option("--rmse-cap", o.rmse_cap, "RMSE normalisation cap in seconds (default 300)");
}

PipelineConfig resolve_config(const Overrides& o) {
  PipelineConfig cfg;
  if (!o.config_path.empty()) cfg = parse_pipeline_config(read_text_file(o.config_path));
  auto apply = [](const auto& from, auto& to) {
    if (from) to = *from;
  };
  apply(o.stack_len, cfg.background.stack_len);
  apply(o.stride, cfg.background.stride);
  apply(o.period, cfg.background.period);
  apply(o.patch_size, cfg.background.patch_size);
  apply(o.reference_horizon, cfg.background.reference_horizon);
  apply(o.diff_threshold, cfg.detector.diff_threshold);
  apply(o.min_area, cfg.detector.min_area);
  apply(o.max_area, cfg.detector.max_area);
  if (o.no_denoise) cfg.detector.denoise = false;
  apply(o.period_seconds, cfg.period_seconds);
  apply(o.match_window, cfg.metrics.match_window);
  apply(o.rmse_cap, cfg.metrics.rmse_cap);
  apply(o.fps, cfg.io.fps);
  apply(o.frame_pattern, cfg.io.frame_pattern);
  cfg.validate();
  return cfg;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw DataError("cannot create output directory '" + dir.string() + "'");
  }
}

std::string reference_file_name(const std::string& video_id, int channels) {
  return "ref_" + video_id + (channels == 1 ? ".pgm" : ".ppm");
}

// Runs `fn(i)` for i in [0, n) on up to `jobs` threads; rethrows the first
// failure after all workers stop.
template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn fn) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex m;
  {
    std::vector<std::jthread> workers;
    for (unsigned w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(m);
            if (!failure) failure = std::current_exception();
            next = n;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

std::vector<Detection> detect_all(const std::vector<BackgroundImage>& backgrounds,
                                  const ReferenceBackground& ref, const DetectorConfig& cfg) {
  std::vector<Detection> out;
  for (const BackgroundImage& bg : backgrounds) {
    auto found = detect_static_objects(bg, ref, cfg);
    out.insert(out.end(), std::make_move_iterator(found.begin()), std::make_move_iterator(found.end()));
  }
  return out;
}

// Per-video state carried from labels to the final result.
struct VideoOutput {
  std::string video_id;
  std::vector<Detection> detections;
  LabelSequence labels;
  SmoothingTrace trace;
  AnomalyResult result;
};

void finish_video(VideoOutput& v, double period_seconds) {
  v.trace = smooth_fast(v.labels);
  v.result = extract_timestamp(v.trace, period_seconds);
}

// Groups detections by video in first-seen order and derives one label
// sequence per video.
std::vector<VideoOutput> labels_from_detections(const std::vector<Detection>& detections,
                                                std::optional<std::size_t> num_labels,
                                                double period_seconds) {
  std::vector<VideoOutput> videos;
  std::map<std::string, std::size_t> slot;
  for (const Detection& d : detections) {
    auto it = slot.find(d.video_id);
    if (it == slot.end()) {
      it = slot.emplace(d.video_id, videos.size()).first;
      videos.push_back(VideoOutput{d.video_id, {}, {}, {}, {}});
    }
    videos[it->second].detections.push_back(d);
  }
  for (VideoOutput& v : videos) {
    std::size_t n = 0;
    if (num_labels) {
      n = *num_labels;
    } else {
      for (const Detection& d : v.detections) n = std::max(n, d.label_index + 1);
    }
    v.labels = derive_labels(v.detections, n, v.video_id, period_seconds);
  }
  return videos;
}

void write_stage_outputs(const fs::path& out_dir, const std::vector<VideoOutput>& videos,
                         bool write_detections_file, bool dump_trace) {
  std::vector<Detection> all;
  std::vector<LabelSequence> labels;
  std::vector<LabelSequence> s1, s2, s3;
  std::vector<AnomalyResult> results;
  for (const VideoOutput& v : videos) {
    all.insert(all.end(), v.detections.begin(), v.detections.end());
    labels.push_back(v.labels);
    s1.push_back(v.trace.vid1);
    s2.push_back(v.trace.vid2);
    s3.push_back(v.trace.vid3);
    results.push_back(v.result);
  }
  if (write_detections_file) write_file_atomic(out_dir / "detections.jsonl", write_detections(all));
  write_file_atomic(out_dir / "labels.csv", write_label_csv(labels));
  if (dump_trace) {
    write_file_atomic(out_dir / "labels_step1.csv", write_label_csv(s1));
    write_file_atomic(out_dir / "labels_step2.csv", write_label_csv(s2));
    write_file_atomic(out_dir / "labels_step3.csv", write_label_csv(s3));
  }
  write_file_atomic(out_dir / "results.json", results_to_json(results));
}

// ---------------------------------------------------------------------------
// estimate-bg

struct EstimateBgArgs {
  Overrides o;
  std::string frames_dir;
  std::string video_id;
  std::string out_dir;
  unsigned jobs = 1;
  bool verbose = false;
};

int cmd_estimate_bg(const EstimateBgArgs& a, std::ostream& out, std::ostream& err) {
  const PipelineConfig cfg = resolve_config(a.o);
  const VideoSource video =
      load_frame_sequence(a.frames_dir, cfg.io.frame_pattern, cfg.io.fps, a.video_id);
  if (a.verbose) err << "estimate-bg: " << video.video_id() << ", " << video.size() << " frames\n";
  const auto backgrounds = estimate_backgrounds(video, cfg.background, MedianEstimator{}, a.jobs);
  const ReferenceBackground ref =
      reference_background(video, static_cast<std::size_t>(cfg.background.reference_horizon));

  const fs::path out_dir(a.out_dir);
  ensure_dir(out_dir);
  nlohmann::ordered_json index = nlohmann::ordered_json::array();
  for (const BackgroundImage& bg : backgrounds) {
    const std::string file = background_file_name(bg);
    write_frame(bg.image, out_dir / file);
    index.push_back({{"video_id", bg.video_id},
                     {"label_index", bg.label_index},
                     {"file", file},
                     {"source_span", {bg.source_span.first, bg.source_span.second}}});
  }
  write_frame(ref.image, out_dir / reference_file_name(ref.video_id, ref.image.channels()));
  write_file_atomic(out_dir / "index.json", index.dump(2) + "\n");
  out << "wrote " << backgrounds.size() << " backgrounds for '" << video.video_id() << "' to "
      << out_dir.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// detect

struct DetectArgs {
  Overrides o;
  std::vector<std::string> bg_index;
  std::string reference;
  std::string detections;
  std::optional<std::size_t> num_labels;
  std::string out_dir;
  bool verbose = false;
};

// Loads the backgrounds listed by an estimate-bg index and their reference.
std::vector<VideoOutput> detect_from_index(const fs::path& index_path, const std::string& reference,
                                           const PipelineConfig& cfg) {
  nlohmann::json index;
  try {
    index = nlohmann::json::parse(read_text_file(index_path));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("background index '" + index_path.string() + "': malformed JSON: " + e.what());
  }
  if (!index.is_array() || index.empty()) {
    throw DataError("background index '" + index_path.string() + "' must be a non-empty array");
  }
  const fs::path base = index_path.parent_path();
  std::map<std::string, std::vector<BackgroundImage>> by_video;
  std::vector<std::string> order;
  for (std::size_t k = 0; k < index.size(); ++k) {
    const auto& e = index[k];
    auto fail = [&](const std::string& why) {
      return DataError("background index entry " + std::to_string(k) + ": " + why);
    };
    if (!e.is_object() || !e.contains("video_id") || !e["video_id"].is_string() ||
        !e.contains("label_index") || !e["label_index"].is_number_unsigned() || !e.contains("file") ||
        !e["file"].is_string() || !e.contains("source_span") || !e["source_span"].is_array() ||
        e["source_span"].size() != 2) {
      throw fail("expected {video_id, label_index, file, source_span}");
    }
    BackgroundImage bg;
    bg.video_id = e["video_id"].get<std::string>();
    bg.label_index = e["label_index"].get<std::size_t>();
    bg.source_span = {e["source_span"][0].get<std::size_t>(), e["source_span"][1].get<std::size_t>()};
    bg.image = load_frame(base / e["file"].get<std::string>());
    auto& list = by_video[bg.video_id];
    if (list.empty()) order.push_back(bg.video_id);
    if (bg.label_index != list.size()) throw fail("label_index values must be dense and ordered");
    list.push_back(std::move(bg));
  }
  if (!reference.empty() && order.size() != 1) {
    throw UsageError("--reference needs an index holding exactly one video");
  }

  std::vector<VideoOutput> videos;
  for (const std::string& id : order) {
    const auto& backgrounds = by_video[id];
    fs::path ref_path = reference.empty()
                            ? base / reference_file_name(id, backgrounds.front().image.channels())
                            : fs::path(reference);
    const ReferenceBackground ref{id, load_frame(ref_path),
                                  static_cast<std::size_t>(cfg.background.reference_horizon)};
    VideoOutput v{id, detect_all(backgrounds, ref, cfg.detector), {}, {}, {}};
    v.labels = derive_labels(v.detections, backgrounds.size(), id, cfg.period_seconds);
    videos.push_back(std::move(v));
  }
  return videos;
}

int cmd_detect(const DetectArgs& a, std::ostream& out, std::ostream& err) {
  const PipelineConfig cfg = resolve_config(a.o);
  if (a.bg_index.empty() == a.detections.empty()) {
    throw UsageError("detect needs exactly one of --bg-index or --detections");
  }
  std::vector<VideoOutput> videos;
  if (!a.detections.empty()) {
    videos = labels_from_detections(load_detections(a.detections), a.num_labels, cfg.period_seconds);
  } else {
    for (const auto& path : a.bg_index) {
      auto more = detect_from_index(path, a.reference, cfg);
      videos.insert(videos.end(), std::make_move_iterator(more.begin()),
                    std::make_move_iterator(more.end()));
    }
  }
  const fs::path out_dir(a.out_dir);
  ensure_dir(out_dir);
  std::vector<Detection> all;
  std::vector<LabelSequence> labels;
  for (const VideoOutput& v : videos) {
    if (a.verbose) err << "detect: " << v.video_id << ", " << v.detections.size() << " detections\n";
    all.insert(all.end(), v.detections.begin(), v.detections.end());
    labels.push_back(v.labels);
  }
  write_file_atomic(out_dir / "detections.jsonl", write_detections(all));
  write_file_atomic(out_dir / "labels.csv", write_label_csv(labels));
  out << "wrote " << all.size() << " detections and labels for " << videos.size() << " video(s)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// smooth

struct SmoothArgs {
  Overrides o;
  std::string labels;
  std::string out_dir;
  bool dump_trace = false;
};

int cmd_smooth(const SmoothArgs& a, std::ostream& out, std::ostream&) {
  const PipelineConfig cfg = resolve_config(a.o);
  auto sequences = parse_label_csv(read_text_file(a.labels), cfg.period_seconds);
  std::vector<VideoOutput> videos;
  for (auto& seq : sequences) {
    VideoOutput v{seq.video_id, {}, std::move(seq), {}, {}};
    finish_video(v, cfg.period_seconds);
    videos.push_back(std::move(v));
  }
  const fs::path out_dir(a.out_dir);
  ensure_dir(out_dir);
  std::vector<AnomalyResult> results;
  std::vector<LabelSequence> s1, s2, s3;
  for (const auto& v : videos) {
    results.push_back(v.result);
    s1.push_back(v.trace.vid1);
    s2.push_back(v.trace.vid2);
    s3.push_back(v.trace.vid3);
  }
  if (a.dump_trace) {
    write_file_atomic(out_dir / "labels_step1.csv", write_label_csv(s1));
    write_file_atomic(out_dir / "labels_step2.csv", write_label_csv(s2));
    write_file_atomic(out_dir / "labels_step3.csv", write_label_csv(s3));
  }
  write_file_atomic(out_dir / "results.json", results_to_json(results));
  out << results_to_json(results);
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
  Overrides o;
  std::string preds;
  std::string truth;
  std::string out_dir = ".";
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream&) {
  const PipelineConfig cfg = resolve_config(a.o);
  const auto preds = parse_results_json(read_text_file(a.preds));
  const auto truth = parse_truth_csv(read_text_file(a.truth));
  const EvalReport report = evaluate(preds, truth, cfg.metrics);
  const std::string json = report_to_json(report);
  ensure_dir(a.out_dir);
  write_file_atomic(fs::path(a.out_dir) / "report.json", json);
  out << json;
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string kind;
  std::string scenario;
  std::string out_dir;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream&) {
  const fs::path out_dir(a.out_dir);
  const std::string text = read_text_file(a.scenario);
  if (a.kind == "labels") {
    const LabelScenario s = parse_label_scenario(text);
    const LabelStreams streams = gen_label_stream(s);
    ensure_dir(out_dir);
    write_file_atomic(out_dir / "labels.csv", write_label_csv({streams.noisy}));
    write_file_atomic(out_dir / "clean_labels.csv", write_label_csv({streams.clean}));
    GroundTruth g{s.video_id, !s.anomaly_intervals.empty(), std::nullopt};
    if (g.has_anomaly) {
      g.start_seconds = static_cast<double>(s.anomaly_intervals.front().first) * s.period_seconds;
    }
    write_file_atomic(out_dir / "truth.csv", write_truth_csv({g}));
    out << "wrote " << s.length << " labels to " << out_dir.string() << "\n";
    return 0;
  }
  const VideoScenario s = parse_video_scenario(text);
  const Manifest m = gen_video(s, out_dir);
  GroundTruth g{s.video_id, false, std::nullopt};
  for (const auto& actor : m.actors) {
    if (actor.stop_seconds && (!g.start_seconds || *actor.stop_seconds < *g.start_seconds)) {
      g.has_anomaly = true;
      g.start_seconds = actor.stop_seconds;
    }
  }
  write_file_atomic(out_dir / "truth.csv", write_truth_csv({g}));
  out << "wrote " << s.duration_frames << " frames to " << out_dir.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// pipeline

struct PipelineArgs {
  Overrides o;
  std::vector<std::string> frames_dirs;
  std::string video_id;
  std::string detections;
  std::optional<std::size_t> num_labels;
  std::string truth;
  std::string out_dir;
  bool dump_trace = false;
  unsigned jobs = 1;
  bool verbose = false;
};

int cmd_pipeline(const PipelineArgs& a, std::ostream& out, std::ostream& err) {
  const PipelineConfig cfg = resolve_config(a.o);
  if (a.frames_dirs.empty() == a.detections.empty()) {
    throw UsageError("pipeline needs exactly one of --frames-dir or --detections");
  }
  if (!a.video_id.empty() && a.frames_dirs.size() != 1) {
    throw UsageError("--video-id applies only to a single --frames-dir");
  }

  std::vector<VideoOutput> videos;
  if (!a.detections.empty()) {
    videos = labels_from_detections(load_detections(a.detections), a.num_labels, cfg.period_seconds);
  } else {
    videos.resize(a.frames_dirs.size());
    std::mutex log_mutex;
    parallel_for(a.frames_dirs.size(), a.jobs, [&](std::size_t k) {
      const VideoSource video =
          load_frame_sequence(a.frames_dirs[k], cfg.io.frame_pattern, cfg.io.fps, a.video_id);
      if (a.verbose) {
        std::lock_guard lock(log_mutex);
        err << "pipeline: " << video.video_id() << ", " << video.size() << " frames\n";
      }
      const auto backgrounds = estimate_backgrounds(video, cfg.background);
      const ReferenceBackground ref =
          reference_background(video, static_cast<std::size_t>(cfg.background.reference_horizon));
      VideoOutput v{video.video_id(), detect_all(backgrounds, ref, cfg.detector), {}, {}, {}};
      v.labels = derive_labels(v.detections, backgrounds.size(), v.video_id, cfg.period_seconds);
      videos[k] = std::move(v);
    });
    std::map<std::string, int> seen;
    for (const auto& v : videos) {
      if (seen[v.video_id]++) throw UsageError("two frame directories share video id '" + v.video_id + "'");
    }
  }
  for (VideoOutput& v : videos) finish_video(v, cfg.period_seconds);

  std::optional<EvalReport> report;
  if (!a.truth.empty()) {
    std::vector<AnomalyResult> results;
    for (const auto& v : videos) results.push_back(v.result);
    report = evaluate(results, parse_truth_csv(read_text_file(a.truth)), cfg.metrics);
  }

  const fs::path out_dir(a.out_dir);
  ensure_dir(out_dir);
  write_stage_outputs(out_dir, videos, true, a.dump_trace);
  if (report) write_file_atomic(out_dir / "report.json", report_to_json(*report));

  for (const auto& v : videos) {
    out << v.video_id << ": ";
    if (v.result.detected) {
      out << "anomaly at label " << *v.result.start_index << " (" << *v.result.start_seconds << " s)\n";
    } else {
      out << "no anomaly\n";
    }
  }
  if (report) out << "F1 " << report->f1 << "  RMSE " << report->rmse << "  S3 " << report->s3 << "\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Time-stamp aware traffic anomaly detection"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("--verbose,-v", verbose, "Log stage progress to stderr");

  EstimateBgArgs eb;
  auto* estimate = app.add_subcommand("estimate-bg", "Estimate per-period backgrounds and the reference");
  add_config_flag(estimate, eb.o);
  add_io_flags(estimate, eb.o);
  add_background_flags(estimate, eb.o);
  estimate->add_option("--frames-dir", eb.frames_dir, "Directory of PGM/PPM frames")->required();
  estimate->add_option("--video-id", eb.video_id, "Video id (default: directory name)");
  estimate->add_option("--out-dir", eb.out_dir, "Output directory")->required();
  estimate->add_option("--jobs", eb.jobs, "Worker threads")->check(CLI::PositiveNumber);

  DetectArgs de;
  auto* detect = app.add_subcommand("detect", "Detect static objects and derive labels");
  add_config_flag(detect, de.o);
  add_background_flags(detect, de.o);
  add_detector_flags(detect, de.o);
  add_smoothing_flags(detect, de.o);
  detect->add_option("--bg-index", de.bg_index, "index.json written by estimate-bg (repeatable)");
  detect->add_option("--reference", de.reference, "Reference background (default: ref_<id> beside the index)");
  detect->add_option("--detections", de.detections, "Ingest external detections (JSON Lines)");
  detect->add_option("--num-labels", de.num_labels, "Labels per video when ingesting detections");
  detect->add_option("--out-dir", de.out_dir, "Output directory")->required();

  SmoothArgs sm;
  auto* smooth_cmd = app.add_subcommand("smooth", "Relabel label sequences and extract anomaly onsets");
  add_config_flag(smooth_cmd, sm.o);
  add_smoothing_flags(smooth_cmd, sm.o);
  smooth_cmd->add_option("--labels", sm.labels, "Label CSV")->required();
  smooth_cmd->add_option("--out-dir", sm.out_dir, "Output directory")->required();
  smooth_cmd->add_flag("--dump-trace", sm.dump_trace, "Write per-step label CSVs");

  EvaluateArgs ev;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score predictions against ground truth");
  add_config_flag(evaluate_cmd, ev.o);
  add_metrics_flags(evaluate_cmd, ev.o);
  evaluate_cmd->add_option("--preds", ev.preds, "results.json")->required();
  evaluate_cmd->add_option("--truth", ev.truth, "Ground-truth CSV")->required();
  evaluate_cmd->add_option("--out-dir", ev.out_dir, "Where report.json is written");

  SimulateArgs si;
  auto* simulate = app.add_subcommand("simulate", "Generate synthetic label streams or videos");
  simulate->add_option("kind", si.kind, "labels | video")
      ->required()
      ->check(CLI::IsMember({"labels", "video"}));
  simulate->add_option("--scenario", si.scenario, "Scenario JSON")->required();
  simulate->add_option("--out", si.out_dir, "Output directory")->required();

  PipelineArgs pl;
  auto* pipeline = app.add_subcommand("pipeline", "Run every stage end to end");
  add_config_flag(pipeline, pl.o);
  add_io_flags(pipeline, pl.o);
  add_background_flags(pipeline, pl.o);
  add_detector_flags(pipeline, pl.o);
  add_smoothing_flags(pipeline, pl.o);
  add_metrics_flags(pipeline, pl.o);
  pipeline->add_option("--frames-dir", pl.frames_dirs, "Frame directory, one per video (repeatable)");
  pipeline->add_option("--video-id", pl.video_id, "Video id for a single --frames-dir");
  pipeline->add_option("--detections", pl.detections, "Skip background/detection; ingest JSON Lines");
  pipeline->add_option("--num-labels", pl.num_labels, "Labels per video when ingesting detections");
  pipeline->add_option("--truth", pl.truth, "Ground-truth CSV; also writes report.json");
  pipeline->add_option("--out-dir", pl.out_dir, "Output directory")->required();
  pipeline->add_flag("--dump-trace", pl.dump_trace, "Write per-step label CSVs");
  pipeline->add_option("--jobs", pl.jobs, "Videos processed concurrently")->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::usage);
  }

  eb.verbose = de.verbose = pl.verbose = verbose;
  try {
    if (estimate->parsed()) return cmd_estimate_bg(eb, out, err);
    if (detect->parsed()) return cmd_detect(de, out, err);
    if (smooth_cmd->parsed()) return cmd_smooth(sm, out, err);
    if (evaluate_cmd->parsed()) return cmd_evaluate(ev, out, err);
    if (simulate->parsed()) return cmd_simulate(si, out, err);
    if (pipeline->parsed()) return cmd_pipeline(pl, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::invariant);
  }
  return static_cast<int>(ErrorKind::usage);
}

}  // namespace tsad::cli
