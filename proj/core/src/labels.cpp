#include "tsad/labels.hpp"

#include <charconv>
#include <sstream>
#include <unordered_map>

#include "tsad/error.hpp"

namespace tsad {

LabelSequence labels_from_string(std::string_view codes, std::string video_id) {
  LabelSequence seq{std::move(video_id), {}, 3.3};
  seq.labels.reserve(codes.size());
  for (char c : codes) {
    if (c == 'N') {
      seq.labels.push_back(Label::normal);
    } else if (c == 'A') {
      seq.labels.push_back(Label::abnormal);
    } else {
      throw DataError(std::string("invalid label code '") + c + "'");
    }
  }
  return seq;
}

std::string labels_to_string(const LabelSequence& seq) {
  std::string out;
  out.reserve(seq.size());
  for (Label l : seq.labels) out.push_back(label_code(l));
  return out;
}

std::string write_label_csv(const std::vector<LabelSequence>& sequences) {
  std::ostringstream out;
  out << "video_id,label_index,label\n";
  for (const auto& seq : sequences) {
    for (std::size_t i = 0; i < seq.labels.size(); ++i) {
      out << seq.video_id << ',' << i << ',' << label_code(seq.labels[i]) << '\n';
    }
  }
  return out.str();
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

}  // namespace

std::vector<LabelSequence> parse_label_csv(std::string_view text, double period_seconds) {
  std::vector<LabelSequence> out;
  std::unordered_map<std::string, std::size_t> slot;
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
      return DataError("label CSV line " + std::to_string(line_no) + ": " + why);
    };
    if (!header_seen) {
      if (line != "video_id,label_index,label") {
        throw fail("expected header 'video_id,label_index,label'");
      }
      header_seen = true;
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.size() != 3) throw fail("expected 3 fields, got " + std::to_string(fields.size()));
    if (fields[0].empty()) throw fail("empty video_id");

    std::size_t index = 0;
    const auto [ptr, ec] =
        std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), index);
    if (ec != std::errc{} || ptr != fields[1].data() + fields[1].size()) {
      throw fail("label_index '" + std::string(fields[1]) + "' is not a non-negative integer");
    }
    Label label;
    if (fields[2] == "N") {
      label = Label::normal;
    } else if (fields[2] == "A") {
      label = Label::abnormal;
    } else {
      throw fail("label must be N or A, got '" + std::string(fields[2]) + "'");
    }

    const std::string video(fields[0]);
    auto it = slot.find(video);
    if (it == slot.end()) {
      it = slot.emplace(video, out.size()).first;
      out.push_back(LabelSequence{video, {}, period_seconds});
    }
    LabelSequence& seq = out[it->second];
    if (index != seq.labels.size()) {
      throw fail("label_index " + std::to_string(index) + " for video '" + video +
                 "' is out of order; expected " + std::to_string(seq.labels.size()));
    }
    seq.labels.push_back(label);
  }
  if (!header_seen) throw DataError("label CSV is empty (missing header)");
  return out;
}

}  // namespace tsad
