#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "rxprep/raster.hpp"

namespace rxprep {

// ATTN layout: "ATTN" | version 0x01 | u32 width | u32 height |
// width*height f32 values, all little-endian, row-major.
inline constexpr std::uint8_t kAttnVersion = 0x01;
inline constexpr std::size_t kAttnHeaderSize = 13;

std::vector<std::uint8_t> encode_attn(const AttentionMap& map);
AttentionMap decode_attn(std::span<const std::uint8_t> bytes);

AttentionMap read_attn(const std::filesystem::path& path);
void write_attn(const AttentionMap& map, const std::filesystem::path& path);

}  // namespace rxprep
