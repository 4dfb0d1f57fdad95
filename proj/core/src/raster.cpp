#include "rxprep/raster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

#include "rxprep/error.hpp"

namespace rxprep {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorKind::ColorImageRejected: return "ColorImageRejected";
    case ErrorKind::CorruptFile: return "CorruptFile";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::BadMagic: return "BadMagic";
    case ErrorKind::TruncatedFile: return "TruncatedFile";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::MissingSidecar: return "MissingSidecar";
    case ErrorKind::EmptyMask: return "EmptyMask";
    case ErrorKind::TileTooSmall: return "TileTooSmall";
    case ErrorKind::DegenerateBox: return "DegenerateBox";
    case ErrorKind::IdMismatch: return "IdMismatch";
    case ErrorKind::NoInstances: return "NoInstances";
    case ErrorKind::OneClassOnly: return "OneClassOnly";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::UnknownImageId: return "UnknownImageId";
  }
  return "Unknown";
}

void validate(const Radiograph& image) {
  if (image.bit_depth < kMinBitDepth || image.bit_depth > kMaxBitDepth) {
    throw Error(ErrorKind::InvalidArgument,
                "bit depth " + std::to_string(image.bit_depth) + " outside [8, 16]");
  }
  if (image.width == 0 || image.height == 0 ||
      static_cast<std::size_t>(image.width) * image.height != image.pixels.size()) {
    throw Error(ErrorKind::InvalidArgument, "raster dimensions do not match pixel count");
  }
  const auto limit = max_level(image.bit_depth);
  if (std::any_of(image.pixels.begin(), image.pixels.end(),
                  [limit](std::uint16_t v) { return v > limit; })) {
    throw Error(ErrorKind::InvalidArgument,
                "pixel value exceeds 2^" + std::to_string(image.bit_depth) + " - 1");
  }
}

void validate(const AttentionMap& map) {
  if (map.width == 0 || map.height == 0 ||
      static_cast<std::size_t>(map.width) * map.height != map.values.size()) {
    throw Error(ErrorKind::InvalidArgument, "attention map dimensions do not match value count");
  }
  for (float v : map.values) {
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFiniteValue, "attention value is not finite");
    if (v < 0.0F) throw Error(ErrorKind::InvalidArgument, "attention value is negative");
  }
}

std::size_t ForegroundMask::count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(bits.begin(), bits.end(), [](std::uint8_t b) { return b != 0; }));
}

std::uint64_t Histogram::total() const noexcept {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

std::size_t Histogram::occupied_levels() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(counts.begin(), counts.end(), [](std::uint64_t c) { return c != 0; }));
}

Radiograph naive_8bit(const Radiograph& image) {
  validate(image);
  Radiograph out(image.width, image.height, 8);
  out.source = image.source;
  const std::uint64_t denom = max_level(image.bit_depth);
  // round(v * 255 / denom) with halves rounded up, in exact integer arithmetic
  for (std::size_t i = 0; i < image.size(); ++i) {
    const std::uint64_t num = std::uint64_t{image.pixels[i]} * 255U;
    out.pixels[i] = static_cast<std::uint16_t>((2 * num + denom) / (2 * denom));
  }
  return out;
}

Histogram compute_histogram(const Radiograph& image) {
  validate(image);
  Histogram hist{image.bit_depth, std::vector<std::uint64_t>(max_level(image.bit_depth) + 1U, 0)};
  for (auto v : image.pixels) ++hist.counts[v];
  return hist;
}

Histogram compute_histogram(const Radiograph& image, const ForegroundMask& mask) {
  validate(image);
  if (mask.width != image.width || mask.height != image.height ||
      mask.bits.size() != image.pixels.size()) {
    throw Error(ErrorKind::DimensionMismatch, "mask dimensions differ from image dimensions");
  }
  Histogram hist{image.bit_depth, std::vector<std::uint64_t>(max_level(image.bit_depth) + 1U, 0)};
  for (std::size_t i = 0; i < image.size(); ++i) {
    if (mask.bits[i]) ++hist.counts[image.pixels[i]];
  }
  return hist;
}

void write_histogram_csv(const Histogram& hist, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot open " + path.string() + " for writing");
  out << "value,count\n";
  for (std::size_t v = 0; v < hist.counts.size(); ++v) {
    out << v << ',' << hist.counts[v] << '\n';
  }
  out.flush();
  if (!out) throw Error(ErrorKind::IoFailure, "failed writing " + path.string());
}

Radiograph mask_to_raster(const ForegroundMask& mask) {
  Radiograph out(mask.width, mask.height, 8);
  std::transform(mask.bits.begin(), mask.bits.end(), out.pixels.begin(),
                 [](std::uint8_t b) -> std::uint16_t { return b ? 255 : 0; });
  return out;
}

}  // namespace rxprep
