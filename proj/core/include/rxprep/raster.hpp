#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace rxprep {

inline constexpr int kMinBitDepth = 8;
inline constexpr int kMaxBitDepth = 16;

/// Largest representable intensity for a bit depth, 2^b - 1.
constexpr std::uint32_t max_level(int bit_depth) noexcept {
  return (std::uint32_t{1} << bit_depth) - 1U;
}

/// Grayscale raster with an explicit bit depth in [8, 16].
///
/// `source` records where the raster was loaded from (empty for rasters built
/// in memory); sidecar-based attention lookup keys off it.
struct Radiograph {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  int bit_depth = 16;
  std::vector<std::uint16_t> pixels;
  std::filesystem::path source;

  Radiograph() = default;
  Radiograph(std::uint32_t w, std::uint32_t h, int b, std::uint16_t fill = 0)
      : width(w), height(h), bit_depth(b),
        pixels(static_cast<std::size_t>(w) * h, fill) {}

  std::size_t size() const noexcept { return pixels.size(); }
  std::uint16_t at(std::uint32_t x, std::uint32_t y) const {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
  std::uint16_t& at(std::uint32_t x, std::uint32_t y) {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
};

/// Throws InvalidArgument when the bit depth, dimensions or any pixel value is
/// out of range.
void validate(const Radiograph& image);

/// Non-negative per-pixel saliency, possibly coarser than the image.
struct AttentionMap {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<float> values;

  AttentionMap() = default;
  AttentionMap(std::uint32_t w, std::uint32_t h, float fill = 0.0F)
      : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

  std::size_t size() const noexcept { return values.size(); }
  float at(std::uint32_t x, std::uint32_t y) const {
    return values[static_cast<std::size_t>(y) * width + x];
  }
};

void validate(const AttentionMap& map);

/// Binary raster; one byte per pixel, 0 = background, 1 = foreground.
struct ForegroundMask {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::uint8_t> bits;

  ForegroundMask() = default;
  ForegroundMask(std::uint32_t w, std::uint32_t h, bool fill = false)
      : width(w), height(h),
        bits(static_cast<std::size_t>(w) * h, fill ? 1 : 0) {}

  std::size_t size() const noexcept { return bits.size(); }
  bool at(std::uint32_t x, std::uint32_t y) const {
    return bits[static_cast<std::size_t>(y) * width + x] != 0;
  }
  void set(std::uint32_t x, std::uint32_t y, bool v) {
    bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0;
  }
  std::size_t count() const noexcept;
  bool empty() const noexcept { return count() == 0; }

  friend bool operator==(const ForegroundMask&, const ForegroundMask&) = default;
};

struct Histogram {
  int bit_depth = 8;
  std::vector<std::uint64_t> counts;

  std::uint64_t total() const noexcept;
  std::size_t occupied_levels() const noexcept;
};

/// Rescales to 8 bits: round(v / (2^b - 1) * 255), half away from zero.
Radiograph naive_8bit(const Radiograph& image);

Histogram compute_histogram(const Radiograph& image);
/// Counts only pixels where the mask is set. Throws DimensionMismatch.
Histogram compute_histogram(const Radiograph& image, const ForegroundMask& mask);

/// CSV with header "value,count" and one row per level.
void write_histogram_csv(const Histogram& hist, const std::filesystem::path& path);

/// Mask as 8-bit raster with levels {0, 255}.
Radiograph mask_to_raster(const ForegroundMask& mask);

}  // namespace rxprep
