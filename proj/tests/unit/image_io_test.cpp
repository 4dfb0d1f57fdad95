#include <gtest/gtest.h>

#include <fstream>
#include <functional>
#include <numeric>
#include <random>

#include "fixtures.hpp"
#include "rxprep/error.hpp"
#include "rxprep/image_io.hpp"

namespace rxprep {
namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected rxprep::Error";
  return ErrorKind::InvalidArgument;
}

class ImageIoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fixtures::scratch_dir(std::string("image_io_") +
                                 ::testing::UnitTest::GetInstance()->current_test_info()->name());
  }
  std::filesystem::path dir_;
};

TEST_F(ImageIoTest, RoundTripAllDepthsAndContainers) {
  std::mt19937 rng(21);
  for (const char* ext : {".png", ".pgm"}) {
    for (int b = 8; b <= 16; ++b) {
      auto img = fixtures::random_image(rng, 17, 9, b);
      const auto path = dir_ / ("r" + std::to_string(b) + ext);
      write_image(img, path);
      const auto back = load_image(path);
      EXPECT_EQ(back.bit_depth, b) << ext;
      EXPECT_EQ(back.width, 17U);
      EXPECT_EQ(back.height, 9U);
      EXPECT_EQ(back.pixels, img.pixels) << ext << " b=" << b;
      EXPECT_EQ(back.source, path);
    }
  }
}

TEST_F(ImageIoTest, SixteenBitMaximumSurvives) {
  Radiograph img(3, 1, 16);
  img.pixels = {0, 256, 65535};
  for (const char* name : {"max.png", "max.pgm"}) {
    write_image(img, dir_ / name);
    EXPECT_EQ(load_image(dir_ / name).pixels, img.pixels);
  }
}

TEST_F(ImageIoTest, RewriteOfLoadedFileIsBitIdentical) {
  std::mt19937 rng(5);
  const auto img = fixtures::random_image(rng, 31, 12, 16);
  write_image(img, dir_ / "a.png");
  write_image(load_image(dir_ / "a.png"), dir_ / "b.png");
  EXPECT_EQ(fixtures::file_bytes(dir_ / "a.png"), fixtures::file_bytes(dir_ / "b.png"));
  write_image(img, dir_ / "a.pgm");
  write_image(load_image(dir_ / "a.pgm"), dir_ / "b.pgm");
  EXPECT_EQ(fixtures::file_bytes(dir_ / "a.pgm"), fixtures::file_bytes(dir_ / "b.pgm"));
}

TEST_F(ImageIoTest, BitDepthOverride) {
  Radiograph img(2, 1, 16);
  img.pixels = {0, 4095};
  write_image(img, dir_ / "twelve.pgm");
  EXPECT_EQ(load_image(dir_ / "twelve.pgm").bit_depth, 16);
  EXPECT_EQ(load_image(dir_ / "twelve.pgm", 12).bit_depth, 12);
  // a value beyond the overridden range is rejected
  EXPECT_EQ(kind_of([&] { load_image(dir_ / "twelve.pgm", 10); }), ErrorKind::CorruptFile);
}

TEST_F(ImageIoTest, HandWrittenPgmWithComment) {
  std::ofstream(dir_ / "c.pgm", std::ios::binary) << "P5\n# scanner export\n2 1\n4095\n"
                                                   << '\x0F' << '\xFF' << '\x00' << '\x01';
  const auto img = load_image(dir_ / "c.pgm");
  EXPECT_EQ(img.bit_depth, 12);
  EXPECT_EQ(img.pixels, (std::vector<std::uint16_t>{4095, 1}));
}

TEST_F(ImageIoTest, ColorPpmRejected) {
  std::ofstream(dir_ / "c.ppm", std::ios::binary) << "P6\n1 1\n255\n" << "abc";
  EXPECT_EQ(kind_of([&] { load_image(dir_ / "c.ppm"); }), ErrorKind::ColorImageRejected);
}

TEST_F(ImageIoTest, ColorPngRejected) {
  // 1x1 RGB PNG
  const unsigned char png[] = {
      0x89, 0x50, 0x4E, 0x47, 0x0D, 0x0A, 0x1A, 0x0A, 0x00, 0x00, 0x00, 0x0D, 0x49, 0x48, 0x44, 0x52,
      0x00, 0x00, 0x00, 0x01, 0x00, 0x00, 0x00, 0x01, 0x08, 0x02, 0x00, 0x00, 0x00, 0x90, 0x77, 0x53,
      0xDE, 0x00, 0x00, 0x00, 0x0C, 0x49, 0x44, 0x41, 0x54, 0x78, 0x9C, 0x63, 0xF8, 0xCF, 0xC0, 0x00,
      0x00, 0x03, 0x01, 0x01, 0x00, 0xC9, 0xFE, 0x92, 0xEF, 0x00, 0x00, 0x00, 0x00, 0x49, 0x45, 0x4E,
      0x44, 0xAE, 0x42, 0x60, 0x82};
  std::ofstream(dir_ / "rgb.png", std::ios::binary).write(reinterpret_cast<const char*>(png), sizeof(png));
  EXPECT_EQ(kind_of([&] { load_image(dir_ / "rgb.png"); }), ErrorKind::ColorImageRejected);
}

TEST_F(ImageIoTest, TruncatedPngIsCorrupt) {
  std::mt19937 rng(9);
  write_image(fixtures::random_image(rng, 40, 40, 16), dir_ / "t.png");
  auto bytes = fixtures::file_bytes(dir_ / "t.png");
  bytes.resize(bytes.size() / 2);
  std::ofstream(dir_ / "t.png", std::ios::binary | std::ios::trunc)
      .write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  EXPECT_EQ(kind_of([&] { load_image(dir_ / "t.png"); }), ErrorKind::CorruptFile);
}

TEST_F(ImageIoTest, TruncatedPgmIsCorrupt) {
  std::ofstream(dir_ / "t.pgm", std::ios::binary) << "P5\n4 4\n255\n" << "abc";
  EXPECT_EQ(kind_of([&] { load_image(dir_ / "t.pgm"); }), ErrorKind::CorruptFile);
}

TEST_F(ImageIoTest, UnknownContainerRejected) {
  std::ofstream(dir_ / "x.bin", std::ios::binary) << "GIF89a";
  EXPECT_EQ(kind_of([&] { load_image(dir_ / "x.bin"); }), ErrorKind::UnsupportedFormat);
  EXPECT_EQ(kind_of([&] { write_image(Radiograph(1, 1, 8), dir_ / "x.tif"); }), ErrorKind::UnsupportedFormat);
}

TEST_F(ImageIoTest, MissingFileAndUnwritablePath) {
  EXPECT_EQ(kind_of([&] { load_image(dir_ / "absent.png"); }), ErrorKind::IoFailure);
  EXPECT_EQ(kind_of([&] { write_image(Radiograph(1, 1, 8), dir_ / "no" / "such" / "dir.png"); }),
            ErrorKind::IoFailure);
  EXPECT_EQ(kind_of([&] { write_image(Radiograph(1, 1, 8), dir_ / "no" / "such" / "dir.pgm"); }),
            ErrorKind::IoFailure);
}

}  // namespace
}  // namespace rxprep
