#pragma once

#include <string>
#include <string_view>

#include "tsad/background.hpp"
#include "tsad/detect.hpp"
#include "tsad/metrics.hpp"

namespace tsad {

struct IoConfig {
  std::string frame_pattern = "f_%06d.pgm";
  double fps = 30.0;

  friend bool operator==(const IoConfig&, const IoConfig&) = default;
};

struct PipelineConfig {
  BackgroundConfig background;
  DetectorConfig detector;
  double period_seconds = 3.3;
  MatchConfig metrics;
  IoConfig io;

  void validate() const;
  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

/// Sections `background`, `detector`, `smoothing`, `metrics`, `io`; every key
/// is optional and falls back to the default. Unknown sections or keys are
/// rejected with a DataError.
PipelineConfig parse_pipeline_config(std::string_view json_text);
std::string pipeline_config_to_json(const PipelineConfig& cfg);

}  // namespace tsad
