#include "rxprep/attn_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "rxprep/error.hpp"

namespace rxprep {
namespace {

constexpr std::uint8_t kMagic[4] = {0x41, 0x54, 0x54, 0x4E};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) | (std::uint32_t{p[2]} << 16) |
         (std::uint32_t{p[3]} << 24);
}

}  // namespace

std::vector<std::uint8_t> encode_attn(const AttentionMap& map) {
  validate(map);
  std::vector<std::uint8_t> out;
  out.reserve(kAttnHeaderSize + 4 * map.size());
  for (auto b : kMagic) out.push_back(b);
  out.push_back(kAttnVersion);
  put_u32(out, map.width);
  put_u32(out, map.height);
  for (float v : map.values) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

AttentionMap decode_attn(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorKind::BadMagic, "attention file does not start with ATTN");
  }
  if (bytes.size() < kAttnHeaderSize) {
    throw Error(ErrorKind::TruncatedFile, "attention header is truncated");
  }
  if (bytes[4] != kAttnVersion) {
    throw Error(ErrorKind::UnsupportedFormat,
                "unsupported attention format version " + std::to_string(bytes[4]));
  }
  const std::uint32_t width = get_u32(bytes.data() + 5);
  const std::uint32_t height = get_u32(bytes.data() + 9);
  if (width == 0 || height == 0) {
    throw Error(ErrorKind::CorruptFile, "attention map has a zero dimension");
  }
  const std::uint64_t count = std::uint64_t{width} * height;
  const std::uint64_t payload = bytes.size() - kAttnHeaderSize;
  if (payload < count * 4) {
    throw Error(ErrorKind::TruncatedFile, "attention payload is truncated");
  }
  if (payload > count * 4) {
    throw Error(ErrorKind::CorruptFile, "trailing bytes after attention payload");
  }

  AttentionMap map(width, height);
  const std::uint8_t* p = bytes.data() + kAttnHeaderSize;
  for (std::size_t i = 0; i < map.size(); ++i) {
    const float v = std::bit_cast<float>(get_u32(p + 4 * i));
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::NonFiniteValue, "attention value " + std::to_string(i) + " is not finite");
    }
    if (v < 0.0F) {
      throw Error(ErrorKind::InvalidArgument, "attention value " + std::to_string(i) + " is negative");
    }
    map.values[i] = v;
  }
  return map;
}

AttentionMap read_attn(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  try {
    return decode_attn(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void write_attn(const AttentionMap& map, const std::filesystem::path& path) {
  const auto bytes = encode_attn(map);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw Error(ErrorKind::IoFailure, "failed writing " + path.string());
}

}  // namespace rxprep
