#include "tsad/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "tsad/error.hpp"

namespace tsad {

void MatchConfig::validate() const {
  if (!(match_window > 0.0)) throw UsageError("match_window must be positive");
  if (!(rmse_cap > 0.0)) throw UsageError("rmse_cap must be positive");
}

std::string_view to_string(Outcome o) noexcept {
  switch (o) {
    case Outcome::tp: return "TP";
    case Outcome::fp: return "FP";
    case Outcome::fn: return "FN";
    case Outcome::tn: return "TN";
    case Outcome::fp_fn: return "FP+FN";
  }
  return "?";
}

MatchResult match_predictions(const std::vector<AnomalyResult>& preds,
                              const std::vector<GroundTruth>& truth, const MatchConfig& cfg) {
  cfg.validate();
  std::unordered_set<std::string> truth_ids;
  for (const auto& t : truth) {
    if (!truth_ids.insert(t.video_id).second) {
      throw DataError("duplicate video_id '" + t.video_id + "' in ground truth");
    }
    if (t.has_anomaly != t.start_seconds.has_value()) {
      throw DataError("ground truth for '" + t.video_id +
                      "' must carry start_seconds exactly when it has an anomaly");
    }
  }
  std::unordered_map<std::string, const AnomalyResult*> by_video;
  for (const auto& p : preds) {
    if (!truth_ids.contains(p.video_id)) {
      throw DataError("prediction for unknown video '" + p.video_id + "'");
    }
    if (!by_video.emplace(p.video_id, &p).second) {
      throw DataError("duplicate video_id '" + p.video_id + "' in predictions");
    }
    if (p.detected && !p.start_seconds) {
      throw DataError("prediction for '" + p.video_id + "' is detected but has no start time");
    }
  }

  MatchResult m;
  for (const auto& t : truth) {
    const auto it = by_video.find(t.video_id);
    const bool detected = it != by_video.end() && it->second->detected;
    VideoOutcome vo{t.video_id, Outcome::tn, std::nullopt};
    if (detected && t.has_anomaly) {
      const double p = *it->second->start_seconds;
      const double a = *t.start_seconds;
      if (std::abs(p - a) <= cfg.match_window) {
        vo.outcome = Outcome::tp;
        vo.error_seconds = std::abs(p - a);
        m.matched.pairs.emplace_back(p, a);
        ++m.tp;
      } else {
        vo.outcome = Outcome::fp_fn;
        ++m.fp;
        ++m.fn;
      }
    } else if (detected) {
      vo.outcome = Outcome::fp;
      ++m.fp;
    } else if (t.has_anomaly) {
      vo.outcome = Outcome::fn;
      ++m.fn;
    }
    m.per_video.push_back(std::move(vo));
  }
  return m;
}

double precision(std::size_t tp, std::size_t fp) noexcept {
  return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
}

double recall(std::size_t tp, std::size_t fn) noexcept {
  return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
}

double f1_score(std::size_t tp, std::size_t fp, std::size_t fn) noexcept {
  const double p = precision(tp, fp);
  const double r = recall(tp, fn);
  return p + r == 0.0 ? 0.0 : 2.0 * (p * r) / (p + r);
}

double rmse(const MatchedPairs& pairs, const MatchConfig& cfg) {
  cfg.validate();
  if (pairs.n() == 0) return cfg.rmse_cap;
  double sum = 0.0;
  for (const auto& [p, a] : pairs.pairs) sum += (p - a) * (p - a);
  return std::sqrt(sum / static_cast<double>(pairs.n()));
}

double nrmse(double rmse_value, const MatchConfig& cfg) {
  cfg.validate();
  if (!(rmse_value >= 0.0)) throw UsageError("rmse must be non-negative");
  return std::min(rmse_value, cfg.rmse_cap) / cfg.rmse_cap;
}

double s3_score(double f1, double rmse_value, const MatchConfig& cfg) {
  if (!(f1 >= 0.0 && f1 <= 1.0)) throw UsageError("f1 must lie in [0,1]");
  return f1 * (1.0 - nrmse(rmse_value, cfg));
}

EvalReport evaluate(const std::vector<AnomalyResult>& preds,
                    const std::vector<GroundTruth>& truth, const MatchConfig& cfg) {
  MatchResult m = match_predictions(preds, truth, cfg);
  EvalReport r;
  r.tp = m.tp;
  r.fp = m.fp;
  r.fn = m.fn;
  r.precision = precision(m.tp, m.fp);
  r.recall = recall(m.tp, m.fn);
  r.f1 = f1_score(m.tp, m.fp, m.fn);
  r.rmse = rmse(m.matched, cfg);
  r.nrmse = nrmse(r.rmse, cfg);
  r.s3 = s3_score(r.f1, r.rmse, cfg);
  r.per_video = std::move(m.per_video);
  return r;
}

std::vector<GroundTruth> parse_truth_csv(std::string_view text) {
  std::vector<GroundTruth> out;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    auto fail = [&](const std::string& why) {
      return DataError("truth CSV line " + std::to_string(line_no) + ": " + why);
    };
    if (!header_seen) {
      if (line != "video_id,has_anomaly,start_seconds") {
        throw fail("expected header 'video_id,has_anomaly,start_seconds'");
      }
      header_seen = true;
      continue;
    }
    const std::size_t c1 = line.find(',');
    const std::size_t c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos || line.find(',', c2 + 1) != std::string_view::npos) {
      throw fail("expected 3 fields");
    }
    GroundTruth g;
    g.video_id = std::string(line.substr(0, c1));
    if (g.video_id.empty()) throw fail("empty video_id");
    const auto flag = line.substr(c1 + 1, c2 - c1 - 1);
    if (flag == "1") {
      g.has_anomaly = true;
    } else if (flag != "0") {
      throw fail("has_anomaly must be 0 or 1");
    }
    const auto start = line.substr(c2 + 1);
    if (g.has_anomaly) {
      if (start.empty()) throw fail("has_anomaly=1 requires start_seconds");
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(start.data(), start.data() + start.size(), v);
      if (ec != std::errc{} || ptr != start.data() + start.size() || !(v >= 0.0) ||
          !std::isfinite(v)) {
        throw fail("start_seconds '" + std::string(start) + "' is not a non-negative number");
      }
      g.start_seconds = v;
    } else if (!start.empty()) {
      throw fail("start_seconds must be empty when has_anomaly=0");
    }
    out.push_back(std::move(g));
  }
  if (!header_seen) throw DataError("truth CSV is empty (missing header)");
  return out;
}

std::string write_truth_csv(const std::vector<GroundTruth>& truth) {
  std::ostringstream out;
  out.precision(17);
  out << "video_id,has_anomaly,start_seconds\n";
  for (const auto& g : truth) {
    out << g.video_id << ',' << (g.has_anomaly ? 1 : 0) << ',';
    if (g.start_seconds) out << *g.start_seconds;
    out << '\n';
  }
  return out.str();
}

std::string report_to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["tp"] = r.tp;
  j["fp"] = r.fp;
  j["fn"] = r.fn;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f1"] = r.f1;
  j["rmse"] = r.rmse;
  j["nrmse"] = r.nrmse;
  j["s3"] = r.s3;
  auto per = nlohmann::ordered_json::array();
  for (const auto& v : r.per_video) {
    nlohmann::ordered_json e;
    e["video_id"] = v.video_id;
    e["outcome"] = std::string(to_string(v.outcome));
    e["error_seconds"] = v.error_seconds ? nlohmann::ordered_json(*v.error_seconds) : nullptr;
    per.push_back(std::move(e));
  }
  j["per_video"] = std::move(per);
  return j.dump(2) + "\n";
}

}  // namespace tsad
