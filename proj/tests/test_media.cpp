#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "test_util.hpp"
#include "tsad/error.hpp"
#include "tsad/io.hpp"
#include "tsad/media.hpp"

namespace tsad {
namespace {

using testing::TempDir;
namespace fs = std::filesystem;

void write_raw(const fs::path& p, const std::string& bytes) {
  std::ofstream(p, std::ios::binary) << bytes;
}

TEST(Frame, RejectsLengthMismatch) {
  EXPECT_THROW(Frame(2, 2, 1, std::vector<std::uint8_t>(3)), InvariantError);
  EXPECT_THROW(Frame(0, 2, 1, {}), InvariantError);
  EXPECT_THROW(Frame(1, 1, 2, std::vector<std::uint8_t>(2)), InvariantError);
}

TEST(Grayscale, WhiteStaysWhite) {
  const Frame rgb(1, 1, 3, {255, 255, 255});
  EXPECT_EQ(to_grayscale(rgb).at(0, 0), 255);
}

TEST(Grayscale, PureRedUsesBt601Weight) {
  // round(0.299 * 255) = round(76.245) = 76
  const Frame rgb(1, 1, 3, {255, 0, 0});
  EXPECT_EQ(to_grayscale(rgb).at(0, 0), 76);
}

TEST(Grayscale, RoundsHalfUp) {
  EXPECT_EQ(to_grayscale(Frame(1, 1, 3, {10, 0, 5})).at(0, 0), 4);    // 3.56
  EXPECT_EQ(to_grayscale(Frame(1, 1, 3, {5, 5, 0})).at(0, 0), 4);     // 4.43
  EXPECT_EQ(to_grayscale(Frame(1, 1, 3, {50, 50, 50})).at(0, 0), 50);  // exact
  EXPECT_EQ(to_grayscale(Frame(1, 1, 3, {0, 0, 250})).at(0, 0), 29);   // 28.5
}

TEST(Grayscale, GrayIsIdentityAndConversionIsIdempotent) {
  std::mt19937_64 rng(3);
  const Frame gray = testing::random_frame(rng, 17, 9, 1);
  EXPECT_EQ(to_grayscale(gray), gray);
  for (int k = 0; k < 20; ++k) {
    const Frame rgb = testing::random_frame(rng, 13, 7, 3);
    const Frame once = to_grayscale(rgb);
    EXPECT_EQ(to_grayscale(once), once);
  }
}

TEST(Pnm, HeaderFormatForColour) {
  const Frame f = Frame::filled(768, 384, 3, 9);
  const auto bytes = encode_pnm(f);
  const std::string head(bytes.begin(), bytes.begin() + 15);
  EXPECT_EQ(head, "P6\n768 384\n255\n");
  EXPECT_EQ(bytes.size(), 15u + 768u * 384u * 3u);
}

TEST(Pnm, RoundTripsRandomFrames) {
  TempDir dir;
  std::mt19937_64 rng(11);
  for (int k = 0; k < 10; ++k) {
    const int c = k % 2 == 0 ? 1 : 3;
    const Frame f = testing::random_frame(rng, 1 + static_cast<int>(rng() % 50),
                                          1 + static_cast<int>(rng() % 50), c);
    const fs::path p = dir / ("f" + std::to_string(k) + (c == 1 ? ".pgm" : ".ppm"));
    write_frame(f, p);
    EXPECT_EQ(load_frame(p), f);
  }
  const Frame big = testing::random_frame(rng, 768, 384, 1);
  write_frame(big, dir / "big.pgm");
  EXPECT_EQ(load_frame(dir / "big.pgm"), big);
}

TEST(Pnm, DecodesHeaderWithComment) {
  const std::string text = std::string("P5\n# made by hand\n2 1\n255\n") + '\x07' + '\x09';
  const Frame f = decode_pnm({reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
  EXPECT_EQ(f.width(), 2);
  EXPECT_EQ(f.at(1, 0), 9);
}

TEST(Pnm, MalformedInputIsAnErrorNotATruncatedFrame) {
  auto decode = [](const std::string& s) {
    return decode_pnm({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()});
  };
  EXPECT_THROW(decode("P3\n1 1\n255\n1 2 3"), DataError);
  EXPECT_THROW(decode("P5\n2 2\n65535\n"), DataError);
  EXPECT_THROW(decode("P5\n2 2\n255\n\x01\x02\x03"), DataError);
  EXPECT_THROW(decode(std::string("P5\n2 2\n255\n") + std::string(5, '\0')), DataError);
  EXPECT_THROW(decode("P5 x 2 255\n"), DataError);
  EXPECT_THROW(decode(""), DataError);
}

TEST(Pnm, WriteToMissingDirectoryFails) {
  EXPECT_THROW(write_frame(Frame::filled(2, 2, 1, 0), "/nonexistent-dir/sub/f.pgm"), DataError);
}

TEST(FrameSequence, LoadsAllFramesInIndexOrder) {
  TempDir dir;
  for (int i = 0; i < 12; ++i) {
    write_frame(Frame::filled(4, 3, 1, static_cast<std::uint8_t>(i)),
                dir / format_frame_name("f_%06d.pgm", static_cast<std::size_t>(i)));
  }
  write_raw(dir / "notes.txt", "ignored");
  const VideoSource v = load_frame_sequence(dir.path());
  ASSERT_EQ(v.size(), 12u);
  EXPECT_EQ(v.frame_rate(), 30.0);
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v.frame(i).at(0, 0), i);
  EXPECT_THROW(v.frame(12), DataError);
}

TEST(FrameSequence, ThreeHundredFullSizeFrames) {
  TempDir dir;
  const Frame f = Frame::filled(768, 384, 1, 40);
  for (std::size_t i = 0; i < 300; ++i) write_frame(f, dir / format_frame_name("f_%06d.pgm", i));
  const VideoSource v = load_frame_sequence(dir.path(), "f_%06d.pgm", 30.0, "cam");
  EXPECT_EQ(v.size(), 300u);
  EXPECT_EQ(v.video_id(), "cam");
  EXPECT_EQ((v.shape()), (FrameShape{768, 384, 1}));
}

TEST(FrameSequence, DecodesTinyAllZeroFrame) {
  TempDir dir;
  write_raw(dir / "f_000000.pgm", std::string("P5\n2 2\n255\n") + std::string(4, '\0'));
  const VideoSource v = load_frame_sequence(dir.path());
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v.frame(0), Frame::filled(2, 2, 1, 0));
}

TEST(FrameSequence, CustomPatternAndDefaultVideoId) {
  TempDir dir;
  fs::create_directories(dir / "cam7");
  for (std::size_t i = 0; i < 3; ++i) {
    write_frame(Frame::filled(2, 2, 3, 1), dir / "cam7" / format_frame_name("img%d.ppm", i));
  }
  const VideoSource v = load_frame_sequence(dir / "cam7/", "img%d.ppm");
  EXPECT_EQ(v.size(), 3u);
  EXPECT_EQ(v.video_id(), "cam7");
  EXPECT_EQ(v.shape().channels, 3);
}

TEST(FrameSequence, Errors) {
  TempDir dir;
  EXPECT_THROW(load_frame_sequence(dir / "missing"), DataError);
  EXPECT_THROW(load_frame_sequence(dir.path()), DataError);  // no frames

  write_frame(Frame::filled(768, 384, 1, 0), dir / "f_000000.pgm");
  write_frame(Frame::filled(384, 192, 1, 0), dir / "f_000001.pgm");
  EXPECT_THROW(load_frame_sequence(dir.path()), DataError);  // mixed dimensions

  TempDir gap;
  write_frame(Frame::filled(2, 2, 1, 0), gap / "f_000000.pgm");
  write_frame(Frame::filled(2, 2, 1, 0), gap / "f_000002.pgm");
  EXPECT_THROW(load_frame_sequence(gap.path()), DataError);

  TempDir bad;
  write_raw(bad / "f_000000.pgm", "P5\n2 2\n255\n\x01");
  EXPECT_THROW(load_frame_sequence(bad.path()), DataError);

  TempDir odd;
  write_frame(Frame::filled(2, 2, 1, 0), odd / "f_0.pgm");
  EXPECT_THROW(load_frame_sequence(odd.path()), DataError);  // not zero-padded

  EXPECT_THROW(load_frame_sequence(dir.path(), "frame.pgm"), UsageError);
}

TEST(AtomicWrite, LeavesNoTemporaryBehind) {
  TempDir dir;
  write_file_atomic(dir / "a.txt", std::string_view("hello"));
  write_file_atomic(dir / "a.txt", std::string_view("bye"));
  EXPECT_EQ(read_text_file(dir / "a.txt"), "bye");
  int files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir.path())) ++files;
  EXPECT_EQ(files, 1);
}

}  // namespace
}  // namespace tsad
