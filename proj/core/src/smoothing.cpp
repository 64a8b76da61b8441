#include "tsad/smoothing.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "tsad/error.hpp"

namespace tsad {
namespace {

constexpr std::size_t kStep1Radius = 5;
constexpr std::size_t kBlockWindow = 20;
constexpr std::size_t kBlockMinority = 5;
constexpr std::size_t kEdgeWindow = 5;

struct Counts {
  std::size_t normal = 0;
  std::size_t abnormal = 0;
};

Counts count_range(const std::vector<Label>& labels, std::size_t lo, std::size_t hi) {
  Counts c;
  for (std::size_t k = lo; k < hi; ++k) {
    (labels[k] == Label::abnormal ? c.abnormal : c.normal)++;
  }
  return c;
}

std::pair<std::size_t, std::size_t> step1_window(std::size_t i, std::size_t n) {
  if (i < kStep1Radius) return {0, i};
  return {i - kStep1Radius, std::min(i + kStep1Radius, n)};
}

// What a fired window paints, if anything.
enum class Paint : std::uint8_t { none, normal, abnormal };

Paint block_rule(const Counts& c) {
  if (c.normal < kBlockMinority) return Paint::abnormal;
  if (c.abnormal < kBlockMinority) return Paint::normal;
  return Paint::none;
}

Paint edge_rule(const Counts& c) {
  if (c.normal == 1) return Paint::abnormal;
  if (c.abnormal == 1) return Paint::normal;
  return Paint::none;
}

Label painted(Paint p) { return p == Paint::abnormal ? Label::abnormal : Label::normal; }

template <typename Rule>
LabelSequence window_vote(const LabelSequence& in, std::size_t width, Rule rule) {
  LabelSequence out = in;
  const std::size_t n = in.labels.size();
  if (n < width) return out;
  for (std::size_t i = 0; i + width <= n; ++i) {
    const Paint p = rule(count_range(in.labels, i, i + width));
    if (p != Paint::none) {
      std::fill_n(out.labels.begin() + static_cast<std::ptrdiff_t>(i), width, painted(p));
    }
  }
  return out;
}

// Prefix count of Abnormal labels: prefix[k] = #A in [0, k).
std::vector<std::size_t> abnormal_prefix(const std::vector<Label>& labels) {
  std::vector<std::size_t> prefix(labels.size() + 1, 0);
  for (std::size_t k = 0; k < labels.size(); ++k) {
    prefix[k + 1] = prefix[k] + (labels[k] == Label::abnormal ? 1 : 0);
  }
  return prefix;
}

Counts prefix_counts(const std::vector<std::size_t>& prefix, std::size_t lo, std::size_t hi) {
  const std::size_t a = prefix[hi] - prefix[lo];
  return {(hi - lo) - a, a};
}

template <typename Rule>
LabelSequence window_vote_fast(const LabelSequence& in, std::size_t width, Rule rule) {
  LabelSequence out = in;
  const std::size_t n = in.labels.size();
  if (n < width) return out;
  const auto prefix = abnormal_prefix(in.labels);
  const std::size_t last_start = n - width;

  // Sweep positions left to right, remembering the latest window start that
  // fired. That window is the last writer for p iff it still covers p.
  bool have = false;
  std::size_t fired_at = 0;
  Paint fired = Paint::none;
  for (std::size_t p = 0; p < n; ++p) {
    if (p <= last_start) {
      const Paint here = rule(prefix_counts(prefix, p, p + width));
      if (here != Paint::none) {
        have = true;
        fired_at = p;
        fired = here;
      }
    }
    if (have && p - fired_at < width) out.labels[p] = painted(fired);
  }
  return out;
}

}  // namespace

LabelSequence step1_local_majority(const LabelSequence& vid) {
  LabelSequence out = vid;
  const std::size_t n = vid.labels.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto [lo, hi] = step1_window(i, n);
    const Counts c = count_range(vid.labels, lo, hi);
    if (c.normal > c.abnormal) out.labels[i] = Label::normal;
  }
  return out;
}

LabelSequence step2_block_vote(const LabelSequence& vid1) {
  return window_vote(vid1, kBlockWindow, block_rule);
}

LabelSequence step3_edge_vote(const LabelSequence& vid2) {
  return window_vote(vid2, kEdgeWindow, edge_rule);
}

SmoothingTrace smooth(const LabelSequence& vid) {
  SmoothingTrace t;
  t.vid = vid;
  t.vid1 = step1_local_majority(vid);
  t.vid2 = step2_block_vote(t.vid1);
  t.vid3 = step3_edge_vote(t.vid2);
  return t;
}

SmoothingTrace smooth_fast(const LabelSequence& vid) {
  SmoothingTrace t;
  t.vid = vid;

  t.vid1 = vid;
  const std::size_t n = vid.labels.size();
  const auto prefix = abnormal_prefix(vid.labels);
  for (std::size_t i = 0; i < n; ++i) {
    const auto [lo, hi] = step1_window(i, n);
    const Counts c = prefix_counts(prefix, lo, hi);
    if (c.normal > c.abnormal) t.vid1.labels[i] = Label::normal;
  }

  t.vid2 = window_vote_fast(t.vid1, kBlockWindow, block_rule);
  t.vid3 = window_vote_fast(t.vid2, kEdgeWindow, edge_rule);
  return t;
}

AnomalyResult extract_timestamp(const SmoothingTrace& trace, double period_seconds) {
  if (!(period_seconds > 0.0)) throw UsageError("period_seconds must be positive");
  AnomalyResult r;
  r.video_id = trace.vid3.video_id;
  const auto& labels = trace.vid3.labels;
  const auto first = std::find(labels.begin(), labels.end(), Label::abnormal);
  if (first == labels.end()) return r;

  const std::size_t i = static_cast<std::size_t>(first - labels.begin());
  const std::size_t end = std::min(i + kBlockWindow, labels.size());
  const auto abnormal = std::count(first, labels.begin() + static_cast<std::ptrdiff_t>(end),
                                   Label::abnormal);
  r.detected = true;
  r.start_index = i;
  r.start_seconds = static_cast<double>(i) * period_seconds;
  r.confidence = static_cast<double>(abnormal) / static_cast<double>(end - i);
  return r;
}

std::string results_to_json(const std::vector<AnomalyResult>& results) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    nlohmann::ordered_json j;
    j["video_id"] = r.video_id;
    j["detected"] = r.detected;
    j["start_index"] = r.start_index ? nlohmann::ordered_json(*r.start_index) : nullptr;
    j["start_seconds"] = r.start_seconds ? nlohmann::ordered_json(*r.start_seconds) : nullptr;
    j["confidence"] = r.confidence;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::vector<AnomalyResult> parse_results_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("predictions: malformed JSON: ") + e.what());
  }
  if (!doc.is_array()) throw DataError("predictions: expected a JSON array");

  std::vector<AnomalyResult> out;
  for (std::size_t k = 0; k < doc.size(); ++k) {
    const auto& j = doc[k];
    auto fail = [&](const std::string& why) {
      return DataError("predictions[" + std::to_string(k) + "]: " + why);
    };
    if (!j.is_object()) throw fail("expected an object");
    AnomalyResult r;
    if (!j.contains("video_id") || !j["video_id"].is_string()) throw fail("missing 'video_id'");
    r.video_id = j["video_id"].get<std::string>();
    if (!j.contains("detected") || !j["detected"].is_boolean()) throw fail("missing 'detected'");
    r.detected = j["detected"].get<bool>();
    if (j.contains("start_index") && !j["start_index"].is_null()) {
      if (!j["start_index"].is_number_unsigned()) throw fail("'start_index' must be a non-negative integer");
      r.start_index = j["start_index"].get<std::size_t>();
    }
    if (j.contains("start_seconds") && !j["start_seconds"].is_null()) {
      if (!j["start_seconds"].is_number()) throw fail("'start_seconds' must be a number");
      r.start_seconds = j["start_seconds"].get<double>();
      if (!(*r.start_seconds >= 0.0)) throw fail("'start_seconds' must be non-negative");
    }
    if (j.contains("confidence")) {
      if (!j["confidence"].is_number()) throw fail("'confidence' must be a number");
      r.confidence = j["confidence"].get<double>();
      if (!(r.confidence >= 0.0 && r.confidence <= 1.0)) throw fail("'confidence' must lie in [0, 1]");
    }
    if (r.detected != r.start_seconds.has_value()) {
      throw fail("'start_seconds' must be present exactly when 'detected' is true");
    }
    if (r.start_index && !r.detected) throw fail("'start_index' given for an undetected video");
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace tsad
