#include <gtest/gtest.h>

#include "tsad/error.hpp"
#include "tsad/labels.hpp"

namespace tsad {
namespace {

TEST(LabelCsv, WritesHeaderAndRowsPerVideo) {
  const auto csv = write_label_csv({labels_from_string("NA", "a"), labels_from_string("A", "b")});
  EXPECT_EQ(csv, "video_id,label_index,label\na,0,N\na,1,A\nb,0,A\n");
}

TEST(LabelCsv, ParsesBackGroupedByVideo) {
  const std::vector<LabelSequence> seqs{labels_from_string("NNAAN", "cam1"),
                                        labels_from_string("A", "cam2"),
                                        labels_from_string("", "cam3")};
  const auto parsed = parse_label_csv(write_label_csv(seqs), 3.3);
  ASSERT_EQ(parsed.size(), 2u);  // a video with no rows has no labels to carry
  EXPECT_EQ(parsed[0], seqs[0]);
  EXPECT_EQ(parsed[1], seqs[1]);
}

TEST(LabelCsv, AcceptsInterleavedVideosAndCrlf) {
  const auto parsed =
      parse_label_csv("video_id,label_index,label\r\nx,0,A\r\ny,0,N\r\nx,1,N\r\n\r\n");
  ASSERT_EQ(parsed.size(), 2u);
  EXPECT_EQ(labels_to_string(parsed[0]), "AN");
  EXPECT_EQ(labels_to_string(parsed[1]), "N");
}

TEST(LabelCsv, Errors) {
  EXPECT_THROW(parse_label_csv(""), DataError);
  EXPECT_THROW(parse_label_csv("video,idx,label\n"), DataError);
  EXPECT_THROW(parse_label_csv("video_id,label_index,label\nv,0,X\n"), DataError);
  EXPECT_THROW(parse_label_csv("video_id,label_index,label\nv,1,A\n"), DataError);
  EXPECT_THROW(parse_label_csv("video_id,label_index,label\nv,0,A\nv,0,A\n"), DataError);
  EXPECT_THROW(parse_label_csv("video_id,label_index,label\nv,-1,A\n"), DataError);
  EXPECT_THROW(parse_label_csv("video_id,label_index,label\nv,0\n"), DataError);
  try {
    parse_label_csv("video_id,label_index,label\nv,0,A\nv,1,Q\n");
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(LabelString, RejectsUnknownCodes) { EXPECT_THROW(labels_from_string("NAX"), DataError); }

}  // namespace
}  // namespace tsad
