#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "rxprep/error.hpp"
#include "rxprep/raster.hpp"

namespace rxprep {
namespace {

TEST(Naive8Bit, ZeroStaysZero) {
  for (int b = 8; b <= 16; ++b) {
    Radiograph img(1, 1, b, 0);
    EXPECT_EQ(naive_8bit(img).pixels[0], 0) << "b=" << b;
  }
}

TEST(Naive8Bit, MaxMapsToMax) {
  Radiograph img(1, 1, 16, 65535);
  const auto out = naive_8bit(img);
  EXPECT_EQ(out.bit_depth, 8);
  EXPECT_EQ(out.pixels[0], 255);
}

TEST(Naive8Bit, TwelveBitMidpointRoundsUp) {
  // 2048 / 4095 * 255 = 127.53
  Radiograph img(1, 1, 12, 2048);
  EXPECT_EQ(naive_8bit(img).pixels[0], 128);
}

TEST(Naive8Bit, EightBitIsIdentity) {
  std::mt19937 rng(3);
  const auto img = fixtures::random_image(rng, 16, 16, 8);
  EXPECT_EQ(naive_8bit(img).pixels, img.pixels);
}

TEST(Naive8Bit, MonotoneAndInRange) {
  for (int b = 8; b <= 16; ++b) {
    Radiograph ramp(max_level(b) + 1, 1, b);
    for (std::uint32_t v = 0; v <= max_level(b); ++v) ramp.pixels[v] = static_cast<std::uint16_t>(v);
    const auto out = naive_8bit(ramp);
    EXPECT_TRUE(std::is_sorted(out.pixels.begin(), out.pixels.end())) << "b=" << b;
    EXPECT_EQ(out.pixels.back(), 255);
  }
}

TEST(Naive8Bit, RejectsOutOfRangePixels) {
  Radiograph img(1, 1, 10, 1024);
  EXPECT_THROW(naive_8bit(img), Error);
}

TEST(Histogram, ConstantImage) {
  Radiograph img(4, 3, 8, 77);
  const auto hist = compute_histogram(img);
  ASSERT_EQ(hist.counts.size(), 256U);
  EXPECT_EQ(hist.counts[77], 12U);
  EXPECT_EQ(hist.total(), 12U);
  EXPECT_EQ(hist.occupied_levels(), 1U);
}

TEST(Histogram, EmptyMaskCountsNothing) {
  Radiograph img(4, 3, 8, 77);
  const auto hist = compute_histogram(img, ForegroundMask(4, 3, false));
  EXPECT_EQ(hist.total(), 0U);
}

TEST(Histogram, HandCountedTwoByTwo) {
  // 2-bit levels stored in an 8-bit raster; only the first four bins matter
  Radiograph img(2, 2, 8);
  img.pixels = {0, 1, 1, 3};
  const auto hist = compute_histogram(img);
  EXPECT_EQ(hist.counts[0], 1U);
  EXPECT_EQ(hist.counts[1], 2U);
  EXPECT_EQ(hist.counts[2], 0U);
  EXPECT_EQ(hist.counts[3], 1U);
}

TEST(Histogram, FullMaskEqualsNoMask) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto img = fixtures::random_image(rng, 13, 7, 8 + trial % 9);
    EXPECT_EQ(compute_histogram(img).counts,
              compute_histogram(img, ForegroundMask(13, 7, true)).counts);
  }
}

TEST(Histogram, MaskDimensionMismatch) {
  Radiograph img(4, 3, 8);
  try {
    compute_histogram(img, ForegroundMask(3, 4, true));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
}

TEST(Histogram, CsvExport) {
  const auto dir = fixtures::scratch_dir("hist_csv");
  Radiograph img(2, 1, 8);
  img.pixels = {0, 2};
  write_histogram_csv(compute_histogram(img), dir / "h.csv");
  std::ifstream in(dir / "h.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "value,count");
  std::getline(in, line);
  EXPECT_EQ(line, "0,1");
  std::getline(in, line);
  EXPECT_EQ(line, "1,0");
  std::getline(in, line);
  EXPECT_EQ(line, "2,1");
  int rows = 3;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 256);
}

TEST(Validate, RejectsBadDepthAndDims) {
  Radiograph img(2, 2, 7);
  EXPECT_THROW(validate(img), Error);
  img.bit_depth = 8;
  img.pixels.pop_back();
  EXPECT_THROW(validate(img), Error);
}

TEST(MaskRaster, UsesZeroAnd255) {
  ForegroundMask m(2, 1);
  m.set(1, 0, true);
  const auto r = mask_to_raster(m);
  EXPECT_EQ(r.bit_depth, 8);
  EXPECT_EQ(r.pixels, (std::vector<std::uint16_t>{0, 255}));
}

}  // namespace
}  // namespace rxprep
