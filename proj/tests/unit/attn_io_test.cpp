#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <limits>
#include <random>

#include "fixtures.hpp"
#include "rxprep/attn_io.hpp"
#include "rxprep/error.hpp"

namespace rxprep {
namespace {

ErrorKind decode_error(const std::vector<std::uint8_t>& bytes) {
  try {
    decode_attn(bytes);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "decode unexpectedly succeeded";
  return ErrorKind::InvalidArgument;
}

TEST(AttnFormat, HandAssembledBytes) {
  const std::vector<std::uint8_t> bytes = {
      0x41, 0x54, 0x54, 0x4E, 0x01,  // magic + version
      0x02, 0x00, 0x00, 0x00,        // width 2
      0x01, 0x00, 0x00, 0x00,        // height 1
      0x00, 0x00, 0x00, 0x00,        // 0.0f
      0x00, 0x00, 0x80, 0x3F,        // 1.0f
  };
  const auto map = decode_attn(bytes);
  EXPECT_EQ(map.width, 2U);
  EXPECT_EQ(map.height, 1U);
  EXPECT_EQ(map.values, (std::vector<float>{0.0F, 1.0F}));
  EXPECT_EQ(encode_attn(map), bytes);
}

TEST(AttnFormat, FileRoundTripIsBitExact) {
  const auto dir = fixtures::scratch_dir("attn_roundtrip");
  std::mt19937 rng(1);
  std::uniform_real_distribution<float> dist(0.0F, 1e-2F);
  for (int trial = 0; trial < 10; ++trial) {
    AttentionMap map(1 + trial * 3, 2 + trial);
    for (auto& v : map.values) v = dist(rng);
    map.values[0] = std::numeric_limits<float>::denorm_min();
    write_attn(map, dir / "m.attn");
    const auto back = read_attn(dir / "m.attn");
    ASSERT_EQ(back.width, map.width);
    ASSERT_EQ(back.height, map.height);
    for (std::size_t i = 0; i < map.size(); ++i) {
      EXPECT_EQ(std::bit_cast<std::uint32_t>(back.values[i]), std::bit_cast<std::uint32_t>(map.values[i]));
    }
  }
}

TEST(AttnFormat, Errors) {
  auto good = encode_attn(AttentionMap(2, 2, 0.5F));

  auto bad_magic = good;
  bad_magic[0] = 'X';
  EXPECT_EQ(decode_error(bad_magic), ErrorKind::BadMagic);
  EXPECT_EQ(decode_error({0x41, 0x54}), ErrorKind::BadMagic);

  auto truncated = good;
  truncated.pop_back();
  EXPECT_EQ(decode_error(truncated), ErrorKind::TruncatedFile);
  EXPECT_EQ(decode_error({0x41, 0x54, 0x54, 0x4E, 0x01, 0x02}), ErrorKind::TruncatedFile);

  auto nan = good;
  const auto qnan = std::bit_cast<std::uint32_t>(std::numeric_limits<float>::quiet_NaN());
  for (int i = 0; i < 4; ++i) nan[kAttnHeaderSize + 4 + i] = static_cast<std::uint8_t>(qnan >> (8 * i));
  EXPECT_EQ(decode_error(nan), ErrorKind::NonFiniteValue);

  auto inf = good;
  const auto pinf = std::bit_cast<std::uint32_t>(std::numeric_limits<float>::infinity());
  for (int i = 0; i < 4; ++i) inf[kAttnHeaderSize + i] = static_cast<std::uint8_t>(pinf >> (8 * i));
  EXPECT_EQ(decode_error(inf), ErrorKind::NonFiniteValue);

  auto version = good;
  version[4] = 2;
  EXPECT_EQ(decode_error(version), ErrorKind::UnsupportedFormat);

  auto trailing = good;
  trailing.push_back(0);
  EXPECT_EQ(decode_error(trailing), ErrorKind::CorruptFile);
}

TEST(AttnFormat, WriterRejectsInvalidMaps) {
  AttentionMap map(1, 1, -1.0F);
  EXPECT_THROW(encode_attn(map), Error);
  map.values[0] = std::numeric_limits<float>::infinity();
  EXPECT_THROW(encode_attn(map), Error);
}

}  // namespace
}  // namespace rxprep
