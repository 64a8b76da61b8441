#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tsad/labels.hpp"

namespace tsad {

/// Input labels and the output of each of the three relabelling steps.
struct SmoothingTrace {
  LabelSequence vid;
  LabelSequence vid1;
  LabelSequence vid2;
  LabelSequence vid3;

  friend bool operator==(const SmoothingTrace&, const SmoothingTrace&) = default;
};

struct AnomalyResult {
  std::string video_id;
  bool detected = false;
  std::optional<std::size_t> start_index;
  std::optional<double> start_seconds;
  double confidence = 0.0;

  friend bool operator==(const AnomalyResult&, const AnomalyResult&) = default;
};

// The three steps below are the reference formulation: each one copies its
// input, reads windows only from that frozen input and writes into the copy.
// Window writes in steps 2 and 3 are applied for ascending window start, so
// the last window covering a position decides it.

/// Local majority. Window is vid[0, i) for i < 5, else vid[i-5, min(i+5, L)).
/// A position becomes Normal when Normal strictly outnumbers Abnormal in its
/// window; otherwise it keeps its input label. Never creates Abnormal labels.
LabelSequence step1_local_majority(const LabelSequence& vid);

/// 20-wide block vote over every fully in-range window [i, i+20). Fewer than
/// 5 Normals (i.e. more than 75% Abnormal) paints the window Abnormal; else
/// fewer than 5 Abnormals paints it Normal. No-op when L < 20.
LabelSequence step2_block_vote(const LabelSequence& vid1);

/// 5-wide vote: exactly one Normal paints the window Abnormal; else exactly one
/// Abnormal paints it Normal. No-op when L < 5.
LabelSequence step3_edge_vote(const LabelSequence& vid2);

SmoothingTrace smooth(const LabelSequence& vid);

/// Same result as smooth() in O(L): window counts come from prefix sums and
/// each step's overlapping window writes are resolved in one sweep by keeping
/// the most recent window that fired.
SmoothingTrace smooth_fast(const LabelSequence& vid);

/// First Abnormal index of vid3; start_seconds = index * period_seconds.
/// Confidence is the Abnormal fraction of vid3 over [index, min(index+20, L)).
AnomalyResult extract_timestamp(const SmoothingTrace& trace, double period_seconds = 3.3);

/// JSON array of {video_id, detected, start_index, start_seconds, confidence};
/// the optional fields are null when nothing was detected.
std::string results_to_json(const std::vector<AnomalyResult>& results);
std::vector<AnomalyResult> parse_results_json(std::string_view text);

}  // namespace tsad
