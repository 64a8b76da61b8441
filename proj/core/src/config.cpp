#include "tsad/config.hpp"

#include <algorithm>

#include <json.hpp>

#include "tsad/error.hpp"

namespace tsad {
using nlohmann::json;

void PipelineConfig::validate() const {
  background.validate();
  detector.validate();
  if (!(period_seconds > 0.0)) throw UsageError("smoothing.period_seconds must be positive");
  metrics.validate();
  if (!(io.fps > 0.0)) throw UsageError("io.fps must be positive");
  if (io.frame_pattern.find('%') == std::string::npos) {
    throw UsageError("io.frame_pattern needs a %d conversion");
  }
}

namespace {

class Section {
 public:
  Section(const json& root, const char* name) : name_(name) {
    const auto it = root.find(name);
    if (it == root.end()) return;
    if (!it->is_object()) throw DataError(std::string("config: section '") + name + "' must be an object");
    obj_ = &*it;
  }

  template <typename T>
  Section& read(const char* key, T& out) {
    known_.push_back(key);
    if (!obj_) return *this;
    const auto it = obj_->find(key);
    if (it == obj_->end()) return *this;
    try {
      out = it->get<T>();
    } catch (const json::exception&) {
      throw DataError(std::string("config: ") + name_ + "." + key + " has the wrong type");
    }
    return *this;
  }

  void finish() const {
    if (!obj_) return;
    for (const auto& [key, _] : obj_->items()) {
      if (std::find(known_.begin(), known_.end(), key) == known_.end()) {
        throw DataError(std::string("config: unknown key '") + name_ + "." + key + "'");
      }
    }
  }

 private:
  const char* name_;
  const json* obj_ = nullptr;
  std::vector<std::string> known_;
};

}  // namespace

PipelineConfig parse_pipeline_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("config: malformed JSON: ") + e.what());
  }
  if (!root.is_object()) throw DataError("config: expected a JSON object");
  for (const auto& [key, _] : root.items()) {
    if (key != "background" && key != "detector" && key != "smoothing" && key != "metrics" &&
        key != "io") {
      throw DataError("config: unknown section '" + key + "'");
    }
  }

  PipelineConfig cfg;
  Section(root, "background")
      .read("stack_len", cfg.background.stack_len)
      .read("stride", cfg.background.stride)
      .read("period", cfg.background.period)
      .read("patch_size", cfg.background.patch_size)
      .read("reference_horizon", cfg.background.reference_horizon)
      .finish();
  Section(root, "detector")
      .read("diff_threshold", cfg.detector.diff_threshold)
      .read("min_area", cfg.detector.min_area)
      .read("max_area", cfg.detector.max_area)
      .read("connectivity", cfg.detector.connectivity)
      .read("denoise", cfg.detector.denoise)
      .finish();
  Section(root, "smoothing").read("period_seconds", cfg.period_seconds).finish();
  Section(root, "metrics")
      .read("match_window", cfg.metrics.match_window)
      .read("rmse_cap", cfg.metrics.rmse_cap)
      .finish();
  Section(root, "io").read("frame_pattern", cfg.io.frame_pattern).read("fps", cfg.io.fps).finish();
  cfg.validate();
  return cfg;
}

std::string pipeline_config_to_json(const PipelineConfig& cfg) {
  nlohmann::ordered_json j;
  j["background"] = {{"stack_len", cfg.background.stack_len},
                     {"stride", cfg.background.stride},
                     {"period", cfg.background.period},
                     {"patch_size", cfg.background.patch_size},
                     {"reference_horizon", cfg.background.reference_horizon}};
  j["detector"] = {{"diff_threshold", cfg.detector.diff_threshold},
                   {"min_area", cfg.detector.min_area},
                   {"max_area", cfg.detector.max_area},
                   {"connectivity", cfg.detector.connectivity},
                   {"denoise", cfg.detector.denoise}};
  j["smoothing"] = {{"period_seconds", cfg.period_seconds}};
  j["metrics"] = {{"match_window", cfg.metrics.match_window}, {"rmse_cap", cfg.metrics.rmse_cap}};
  j["io"] = {{"frame_pattern", cfg.io.frame_pattern}, {"fps", cfg.io.fps}};
  return j.dump(2) + "\n";
}

}  // namespace tsad
