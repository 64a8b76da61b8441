#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace tsad {

enum class Label : std::uint8_t { normal, abnormal };

constexpr char label_code(Label l) noexcept { return l == Label::abnormal ? 'A' : 'N'; }

/// One Normal/Abnormal label per background (label period) of a video.
struct LabelSequence {
  std::string video_id;
  std::vector<Label> labels;
  double period_seconds = 3.3;

  std::size_t size() const noexcept { return labels.size(); }
  friend bool operator==(const LabelSequence&, const LabelSequence&) = default;
};

/// Parses "NNAA..." (for tests and fixtures).
LabelSequence labels_from_string(std::string_view codes, std::string video_id = "v");
std::string labels_to_string(const LabelSequence& seq);

/// CSV with header `video_id,label_index,label`, label in {N, A}. Rows are
/// emitted per video in label_index order.
std::string write_label_csv(const std::vector<LabelSequence>& sequences);

/// Groups rows by video (first-seen order). Indices must be dense from zero per
/// video; errors name the offending line.
std::vector<LabelSequence> parse_label_csv(std::string_view text, double period_seconds = 3.3);

}  // namespace tsad
