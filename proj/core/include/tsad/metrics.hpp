#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tsad/smoothing.hpp"

namespace tsad {

struct GroundTruth {
  std::string video_id;
  bool has_anomaly = false;
  std::optional<double> start_seconds;
};

struct MatchedPairs {
  std::vector<std::pair<double, double>> pairs;  // (predicted, actual) seconds
  std::size_t n() const noexcept { return pairs.size(); }
};

struct MatchConfig {
  double match_window = 10.0;
  double rmse_cap = 300.0;

  void validate() const;
  friend bool operator==(const MatchConfig&, const MatchConfig&) = default;
};

enum class Outcome { tp, fp, fn, tn, fp_fn };

std::string_view to_string(Outcome o) noexcept;

struct VideoOutcome {
  std::string video_id;
  Outcome outcome = Outcome::tn;
  std::optional<double> error_seconds;  // |p - a|, TP only
};

struct MatchResult {
  MatchedPairs matched;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::vector<VideoOutcome> per_video;  // in truth order
};

struct EvalReport {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double rmse = 0.0;
  double nrmse = 0.0;
  double s3 = 0.0;
  std::vector<VideoOutcome> per_video;
};

/// Per-video rule: a detection within `match_window` seconds of an actual
/// anomaly is a TP; a detection on a clean video is an FP; a detection too far
/// from the actual onset counts as both FP and FN. Videos without a prediction
/// are treated as undetected.
MatchResult match_predictions(const std::vector<AnomalyResult>& preds,
                              const std::vector<GroundTruth>& truth, const MatchConfig& cfg);

double precision(std::size_t tp, std::size_t fp) noexcept;
double recall(std::size_t tp, std::size_t fn) noexcept;
double f1_score(std::size_t tp, std::size_t fp, std::size_t fn) noexcept;

/// Root mean squared timing error over matched pairs; `rmse_cap` when empty.
double rmse(const MatchedPairs& pairs, const MatchConfig& cfg);

double nrmse(double rmse_value, const MatchConfig& cfg);

/// f1 * (1 - min(rmse, cap) / cap)
double s3_score(double f1, double rmse_value, const MatchConfig& cfg);

EvalReport evaluate(const std::vector<AnomalyResult>& preds,
                    const std::vector<GroundTruth>& truth, const MatchConfig& cfg);

/// Header `video_id,has_anomaly,start_seconds`; start_seconds is empty when
/// has_anomaly is 0 and required when it is 1.
std::vector<GroundTruth> parse_truth_csv(std::string_view text);
std::string write_truth_csv(const std::vector<GroundTruth>& truth);

std::string report_to_json(const EvalReport& report);

}  // namespace tsad
