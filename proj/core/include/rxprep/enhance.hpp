#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "rxprep/attention.hpp"
#include "rxprep/raster.hpp"
#include "rxprep/roi_mask.hpp"

namespace rxprep {

inline constexpr std::uint32_t kEnhancedMax = 65535;

/// Level mapping that equalizes `hist` onto [0, out_max]:
///   lut[v] = round((C(v) - c_min) / (N - c_min) * out_max)
/// with C the cumulative histogram and c_min = C(smallest occupied level).
/// Levels below the first occupied one map to 0. With fewer than two occupied
/// levels the mapping degenerates to a plain stretch,
/// lut[v] = v * round(out_max / (2^b - 1)), clamped to out_max.
std::vector<std::uint32_t> equalization_lut(const Histogram& hist, std::uint32_t out_max);

/// Histogram equalization driven by foreground statistics only. Output is a
/// 16-bit raster with every background pixel set to 0.
/// Throws DimensionMismatch or EmptyMask.
Radiograph masked_hist_equalize(const Radiograph& image, const ForegroundMask& mask);

/// 16-bit global equalization; same as the masked variant with a full mask.
Radiograph global_hist_equalize(const Radiograph& image);

struct ClaheParams {
  std::uint32_t tile_rows = 8;
  std::uint32_t tile_cols = 8;
  /// Clip limit per tile = max(1, floor(clip_factor * tile_pixels / 256)).
  double clip_factor = 2.0;
};

void validate(const ClaheParams& params);

struct ClippedHistogram {
  std::vector<std::uint64_t> clipped;        // before redistribution
  std::vector<std::uint64_t> redistributed;  // after one redistribution pass
  std::uint64_t excess = 0;
};

/// Clips every bin at `limit`, then spreads the excess evenly over all bins;
/// the remainder goes one count per bin starting at bin 0.
ClippedHistogram clip_histogram(std::span<const std::uint64_t> counts, std::uint64_t limit);

std::uint64_t clahe_clip_limit(double clip_factor, std::uint64_t tile_pixels);

/// Tile-based CLAHE on an 8-bit raster. The last tile row/column absorbs any
/// remainder; pixels blend the four nearest tile-centre mappings bilinearly.
/// Tiles whose raw histogram has a single occupied level map by identity.
/// Throws InvalidArgument (b != 8) or TileTooSmall.
Radiograph clahe(const Radiograph& image8, const ClaheParams& params = {});

struct EnhanceResult {
  Radiograph enhanced;
  ForegroundMask mask;
  std::filesystem::path enhanced_path;
  std::filesystem::path mask_path;
};

/// extract_roi followed by masked_hist_equalize; writes
/// <stem>.enhanced<ext> (16-bit) and <stem>.mask<ext> ({0,255}) to `out_dir`.
EnhanceResult enhance_pipeline(const Radiograph& image, const AttentionProvider& provider,
                               const MaskParams& mask_params, const std::filesystem::path& out_dir,
                               const std::string& extension = ".png");

/// File stem used for outputs derived from `image`.
std::string output_stem(const Radiograph& image);

}  // namespace rxprep
