#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "tsad/error.hpp"
#include "tsad/smoothing.hpp"

namespace tsad {
namespace {

std::string str(const LabelSequence& s) { return labels_to_string(s); }
LabelSequence seq(const std::string& s) { return labels_from_string(s); }

std::string random_codes(std::mt19937_64& rng, std::size_t n) {
  // Mix of densities so all three steps get exercised.
  const double p = static_cast<double>(rng() % 101) / 100.0;
  std::bernoulli_distribution coin(p);
  std::string s(n, 'N');
  for (auto& c : s) c = coin(rng) ? 'A' : 'N';
  return s;
}

void expect_matches_oracle(const std::string& codes, const SmoothingTrace& t) {
  const auto o = oracle::literal_smooth(codes);
  ASSERT_EQ(str(t.vid), codes);
  ASSERT_EQ(str(t.vid1), o.vid1) << codes;
  ASSERT_EQ(str(t.vid2), o.vid2) << codes;
  ASSERT_EQ(str(t.vid3), o.vid3) << codes;
}

TEST(Step1, FixedPoints) {
  EXPECT_EQ(str(step1_local_majority(seq(std::string(30, 'N')))), std::string(30, 'N'));
  EXPECT_EQ(str(step1_local_majority(seq(std::string(30, 'A')))), std::string(30, 'A'));
}

TEST(Step1, LoneAbnormalIsFlipped) {
  EXPECT_EQ(str(step1_local_majority(seq("NNNNNANNNNN"))), "NNNNNNNNNNN");
}

TEST(Step1, EarlyWindowsOnlySeeThePrefix) {
  // i=0 has an empty window and keeps its label; i=1 sees only index 0.
  EXPECT_EQ(str(step1_local_majority(seq("AAN"))), "AAN");
  EXPECT_EQ(str(step1_local_majority(seq("NA"))), "NN");
}

TEST(Step2, Examples) {
  EXPECT_EQ(str(step2_block_vote(seq(std::string(40, 'A')))), std::string(40, 'A'));
  EXPECT_EQ(str(step2_block_vote(seq(std::string(17, 'A') + "NNN"))), std::string(20, 'A'));
  const std::string half = std::string(10, 'A') + std::string(10, 'N');
  EXPECT_EQ(str(step2_block_vote(seq(half))), half);
}

TEST(Step2, ShortInputIsUntouched) {
  EXPECT_EQ(str(step2_block_vote(seq("AAAAAAAAAAAAAAAAAAN"))), "AAAAAAAAAAAAAAAAAAN");
}

TEST(Step2, OverlappingWindowsEachPaint) {
  // Both windows have 3 Normals, so together they paint all 21 labels.
  const std::string in = "NNN" + std::string(17, 'A') + "N";
  EXPECT_EQ(str(step2_block_vote(seq(in))), std::string(21, 'A'));
}

TEST(Step2, LaterWindowOverwritesEarlierOne) {
  // Windows 0..4 paint [0, 24) Abnormal; windows 16..20 then paint [16, 40) Normal.
  const std::string in = std::string(20, 'A') + std::string(20, 'N');
  EXPECT_EQ(str(step2_block_vote(seq(in))), std::string(16, 'A') + std::string(24, 'N'));
}

TEST(Step3, Examples) {
  EXPECT_EQ(str(step3_edge_vote(seq("AANAA"))), "AAAAA");
  EXPECT_EQ(str(step3_edge_vote(seq("NNANN"))), "NNNNN");
  EXPECT_EQ(str(step3_edge_vote(seq("AANNN"))), "AANNN");
  EXPECT_EQ(str(step3_edge_vote(seq("AANA"))), "AANA");
}

TEST(Smooth, FixedPointsAndVideoId) {
  for (char c : {'N', 'A'}) {
    const std::string s(57, c);
    const auto t = smooth(labels_from_string(s, "cam"));
    for (const auto* v : {&t.vid, &t.vid1, &t.vid2, &t.vid3}) {
      EXPECT_EQ(str(*v), s);
      EXPECT_EQ(v->video_id, "cam");
    }
  }
}

TEST(Smooth, PreservesPeriod) {
  LabelSequence in = seq("NNAA");
  in.period_seconds = 2.0;
  const auto t = smooth_fast(in);
  EXPECT_EQ(t.vid3.period_seconds, 2.0);
  EXPECT_EQ(smooth(in), t);
}

TEST(Smooth, MatchesLiteralOracleOnRandomInputs) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 500; ++trial) {
    const std::string codes = random_codes(rng, rng() % 201);
    expect_matches_oracle(codes, smooth(seq(codes)));
  }
}

TEST(Smooth, StepOneNeverCreatesAbnormalAndLengthsAgree) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 500; ++trial) {
    const auto in = seq(random_codes(rng, rng() % 300));
    const auto t = smooth(in);
    ASSERT_EQ(t.vid1.size(), in.size());
    ASSERT_EQ(t.vid2.size(), in.size());
    ASSERT_EQ(t.vid3.size(), in.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
      if (t.vid1.labels[i] == Label::abnormal) ASSERT_EQ(in.labels[i], Label::abnormal);
    }
    ASSERT_EQ(smooth(in), t);
  }
}

TEST(SmoothFast, BoundaryLengthsExhaustiveWhereFeasible) {
  std::mt19937_64 rng(23);
  for (std::size_t len : {0, 1, 4, 5, 6, 19, 20, 21, 24, 25, 26}) {
    if (len <= 12) {
      for (std::uint32_t bits = 0; bits < (1u << len); ++bits) {
        std::string codes(len, 'N');
        for (std::size_t k = 0; k < len; ++k) {
          if (bits >> k & 1u) codes[k] = 'A';
        }
        ASSERT_EQ(smooth_fast(seq(codes)), smooth(seq(codes))) << codes;
        expect_matches_oracle(codes, smooth_fast(seq(codes)));
      }
    } else {
      for (int trial = 0; trial < 2000; ++trial) {
        const std::string codes = random_codes(rng, len);
        ASSERT_EQ(smooth_fast(seq(codes)), smooth(seq(codes))) << codes;
      }
    }
  }
}

TEST(SmoothFast, MatchesOracleOnRandomInputs) {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 3000; ++trial) {
    const std::string codes = random_codes(rng, 1 + rng() % 500);
    expect_matches_oracle(codes, smooth_fast(seq(codes)));
  }
}

TEST(SmoothFast, MatchesOnStructuredInputs) {
  // Blocks with noise resemble real label streams better than i.i.d. coins.
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 1000; ++trial) {
    std::string codes;
    while (codes.size() < 300) codes += std::string(1 + rng() % 30, rng() % 2 ? 'A' : 'N');
    for (auto& c : codes) {
      if (rng() % 10 == 0) c = c == 'A' ? 'N' : 'A';
    }
    ASSERT_EQ(smooth_fast(seq(codes)), smooth(seq(codes))) << codes;
  }
}

// ---------------------------------------------------------------------------

SmoothingTrace trace_with_vid3(const std::string& codes) {
  SmoothingTrace t;
  t.vid = t.vid1 = t.vid2 = t.vid3 = labels_from_string(codes, "v9");
  return t;
}

TEST(ExtractTimestamp, NoAbnormalMeansNotDetected) {
  const auto r = extract_timestamp(trace_with_vid3(std::string(40, 'N')));
  EXPECT_EQ(r.video_id, "v9");
  EXPECT_FALSE(r.detected);
  EXPECT_FALSE(r.start_index);
  EXPECT_FALSE(r.start_seconds);
  EXPECT_EQ(r.confidence, 0.0);
}

TEST(ExtractTimestamp, IndexTenIsThirtyThreeSeconds) {
  const auto r = extract_timestamp(trace_with_vid3(std::string(10, 'N') + std::string(30, 'A')));
  ASSERT_TRUE(r.detected);
  EXPECT_EQ(*r.start_index, 10u);
  EXPECT_EQ(*r.start_seconds, 33.0);
  EXPECT_EQ(r.confidence, 1.0);
}

TEST(ExtractTimestamp, AllAbnormal) {
  const auto r = extract_timestamp(trace_with_vid3(std::string(25, 'A')));
  ASSERT_TRUE(r.detected);
  EXPECT_EQ(*r.start_index, 0u);
  EXPECT_EQ(*r.start_seconds, 0.0);
  EXPECT_EQ(r.confidence, 1.0);
}

TEST(ExtractTimestamp, ConfidenceIsDensityAfterOnset) {
  const auto r = extract_timestamp(trace_with_vid3("NNAANA"));
  ASSERT_TRUE(r.detected);
  EXPECT_EQ(*r.start_index, 2u);
  EXPECT_DOUBLE_EQ(r.confidence, 3.0 / 4.0);
}

TEST(ExtractTimestamp, MinimalIndexAgainstLinearScan) {
  std::mt19937_64 rng(26);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::string codes = random_codes(rng, rng() % 100);
    const double period = 0.5 + static_cast<double>(rng() % 100) / 10.0;
    const auto r = extract_timestamp(trace_with_vid3(codes), period);
    const auto pos = codes.find('A');
    if (pos == std::string::npos) {
      ASSERT_FALSE(r.detected);
      ASSERT_FALSE(r.start_index.has_value());
    } else {
      ASSERT_TRUE(r.detected);
      ASSERT_EQ(*r.start_index, pos);
      ASSERT_EQ(*r.start_seconds, static_cast<double>(pos) * period);
      ASSERT_GT(r.confidence, 0.0);
      ASSERT_LE(r.confidence, 1.0);
    }
  }
}

TEST(ExtractTimestamp, RejectsBadPeriod) {
  EXPECT_THROW(extract_timestamp(trace_with_vid3("A"), 0.0), UsageError);
}

TEST(ResultsJson, RoundTrip) {
  const std::vector<AnomalyResult> results{
      {"a", true, 10, 33.0, 0.75},
      {"b", false, std::nullopt, std::nullopt, 0.0},
  };
  const std::string json = results_to_json(results);
  EXPECT_NE(json.find("null"), std::string::npos);
  EXPECT_EQ(parse_results_json(json), results);
}

TEST(ResultsJson, RejectsInconsistentRecords) {
  EXPECT_THROW(parse_results_json(R"([{"video_id":"a","detected":true,"start_index":null,)"
                                  R"("start_seconds":null,"confidence":0.5}])"),
               DataError);
  EXPECT_THROW(parse_results_json(R"([{"video_id":"a","detected":false,"start_index":3,)"
                                  R"("start_seconds":9.9,"confidence":0.5}])"),
               DataError);
  EXPECT_THROW(parse_results_json("{}"), DataError);
  EXPECT_THROW(parse_results_json("[{"), DataError);
  EXPECT_THROW(parse_results_json(R"([{"video_id":"a","detected":false,"start_index":null,)"
                                  R"("start_seconds":null,"confidence":2}])"),
               DataError);
}

}  // namespace
}  // namespace tsad
