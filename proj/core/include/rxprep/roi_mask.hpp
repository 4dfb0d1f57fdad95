#pragma once

#include <cstdint>
#include <optional>

#include "rxprep/attention.hpp"
#include "rxprep/raster.hpp"

namespace rxprep {

struct MaskParams {
  double percentile = 70.0;
  /// Square structuring element half-width; unset means
  /// max(1, round(0.005 * min(width, height))).
  std::optional<int> morph_radius;

  int resolved_radius(std::uint32_t width, std::uint32_t height) const;
};

void validate(const MaskParams& params);

/// Nearest-rank threshold t = k-th smallest value, k = ceil(p/100 * n);
/// selects values strictly greater than t. Throws EmptyMask when nothing
/// exceeds t.
ForegroundMask percentile_threshold(const AttentionMap& map, double percentile);

/// Square-element erosion/dilation. Pixels outside the raster are ignored,
/// i.e. they act as foreground for erosion and background for dilation, which
/// keeps the pair adjoint: opening shrinks, closing grows, both idempotent.
ForegroundMask erode(const ForegroundMask& mask, int radius);
ForegroundMask dilate(const ForegroundMask& mask, int radius);
ForegroundMask morph_open(const ForegroundMask& mask, int radius);
ForegroundMask morph_close(const ForegroundMask& mask, int radius);

/// Keeps the largest 8-connected component; ties go to the component holding
/// the smallest row-major index. Throws EmptyMask.
ForegroundMask largest_component(const ForegroundMask& mask);

/// Number of 8-connected components.
std::size_t count_components(const ForegroundMask& mask);

/// Corner-aligned bilinear resampling; a destination axis of length 1 samples
/// the source centre.
AttentionMap resize_bilinear(const AttentionMap& map, std::uint32_t width, std::uint32_t height);

/// attention -> resize to image -> threshold -> open -> close -> largest
/// component.
ForegroundMask extract_roi(const Radiograph& image, const AttentionProvider& provider,
                           const MaskParams& params = {});

/// Same pipeline starting from an already computed attention map.
ForegroundMask mask_from_attention(const AttentionMap& map, std::uint32_t width,
                                   std::uint32_t height, const MaskParams& params = {});

}  // namespace rxprep
