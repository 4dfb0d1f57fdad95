#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "rxprep/attention.hpp"
#include "rxprep/attn_io.hpp"
#include "rxprep/error.hpp"
#include "rxprep/image_io.hpp"

namespace rxprep {
namespace {

TEST(FileProvider, ReturnsSidecarUnmodified) {
  const auto dir = fixtures::scratch_dir("file_provider");
  write_image(Radiograph(3, 2, 12, 7), dir / "scan.png");
  AttentionMap map(2, 2);
  map.values = {0.25F, 1.5F, 3.0F, 0.0F};
  write_attn(map, dir / "scan.attn");

  const FileProvider provider;
  const auto got = provider.attention_for(load_image(dir / "scan.png"));
  EXPECT_EQ(got.width, 2U);
  EXPECT_EQ(got.values, map.values);
}

TEST(FileProvider, CustomSuffix) {
  const FileProvider provider(".dino.attn");
  EXPECT_EQ(provider.sidecar_for("/data/a/knee.png"), std::filesystem::path("/data/a/knee.dino.attn"));
}

TEST(FileProvider, MissingSidecar) {
  const auto dir = fixtures::scratch_dir("file_provider_missing");
  write_image(Radiograph(3, 2, 8), dir / "lonely.pgm");
  const FileProvider provider;
  try {
    provider.attention_for(load_image(dir / "lonely.pgm"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingSidecar);
  }
  try {
    provider.attention_for(Radiograph(2, 2, 8));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingSidecar);
  }
}

TEST(FileProvider, PropagatesReadErrors) {
  const auto dir = fixtures::scratch_dir("file_provider_bad");
  write_image(Radiograph(3, 2, 8), dir / "x.png");
  std::ofstream(dir / "x.attn", std::ios::binary) << "NOPE";
  try {
    FileProvider().attention_for(load_image(dir / "x.png"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BadMagic);
  }
}

TEST(SyntheticProvider, ConstantImageGivesZeros) {
  const SyntheticProvider provider;
  const auto map = provider.attention_for(Radiograph(30, 20, 16, 40000));
  EXPECT_EQ(map.width, 30U);
  EXPECT_EQ(map.height, 20U);
  for (float v : map.values) EXPECT_EQ(v, 0.0F);
}

TEST(SyntheticProvider, MatchesBruteForceWindow) {
  std::mt19937 rng(17);
  for (int r : {0, 1, 3, 7}) {
    const auto img = fixtures::random_image(rng, 23, 11, 16);
    const auto expected = oracle::local_std(img, r);
    const auto got = SyntheticProvider(r).attention_for(img);
    for (std::size_t i = 0; i < img.size(); ++i) {
      EXPECT_NEAR(got.values[i], expected[i], 1e-5 * (1.0 + expected[i])) << "r=" << r << " i=" << i;
    }
  }
}

TEST(SyntheticProvider, StepEdgePeaksAtBoundary) {
  Radiograph img(20, 6, 12);
  for (std::uint32_t y = 0; y < 6; ++y)
    for (std::uint32_t x = 10; x < 20; ++x) img.at(x, y) = 1000;
  const auto map = SyntheticProvider(2).attention_for(img);
  const auto expected = oracle::local_std(img, 2);
  // a 5-wide window straddling the edge 2:3 or 3:2 has the largest spread
  for (std::uint32_t y = 0; y < 6; ++y) {
    float best = 0.0F;
    for (std::uint32_t x = 0; x < 20; ++x) best = std::max(best, map.at(x, y));
    EXPECT_NEAR(best, expected[y * 20 + 9], 1e-3);
    for (std::uint32_t x = 0; x < 20; ++x) {
      EXPECT_EQ(map.at(x, y) == best, x == 9 || x == 10) << "x=" << x;
    }
  }
}

TEST(SyntheticProvider, BiasInvarianceIsExact) {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const auto img = fixtures::random_image(rng, 19, 14, 12);
    auto shifted = img;
    shifted.bit_depth = 16;
    const std::uint16_t bias = static_cast<std::uint16_t>(1 + trial * 997);
    for (auto& v : shifted.pixels) v = static_cast<std::uint16_t>(v + bias);
    const SyntheticProvider provider(3);
    EXPECT_EQ(provider.attention_for(img).values, provider.attention_for(shifted).values);
  }
}

TEST(SyntheticProvider, DoublingIntensitiesDoublesExactly) {
  std::mt19937 rng(29);
  const auto img = fixtures::random_image(rng, 16, 16, 12);
  auto doubled = img;
  doubled.bit_depth = 13;
  for (auto& v : doubled.pixels) v = static_cast<std::uint16_t>(2 * v);
  const SyntheticProvider provider;
  const auto a = provider.attention_for(img);
  const auto b = provider.attention_for(doubled);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(2.0F * a.values[i], b.values[i]);
}

TEST(SyntheticProvider, Deterministic) {
  std::mt19937 rng(31);
  const auto img = fixtures::random_image(rng, 40, 25, 16);
  const SyntheticProvider provider;
  EXPECT_EQ(provider.attention_for(img).values, provider.attention_for(img).values);
}

TEST(SyntheticProvider, RadiusBounds) {
  EXPECT_THROW(SyntheticProvider(-1), Error);
  EXPECT_THROW(SyntheticProvider(SyntheticProvider::kMaxRadius + 1), Error);
}

}  // namespace
}  // namespace rxprep
