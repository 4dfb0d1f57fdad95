#include "rxprep/roi_mask.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rxprep/error.hpp"

namespace rxprep {

int MaskParams::resolved_radius(std::uint32_t width, std::uint32_t height) const {
  if (morph_radius) return *morph_radius;
  const double side = static_cast<double>(std::min(width, height));
  return std::max(1, static_cast<int>(std::round(0.005 * side)));
}

void validate(const MaskParams& params) {
  if (!(params.percentile > 0.0 && params.percentile < 100.0)) {
    throw Error(ErrorKind::InvalidArgument, "percentile must lie in (0, 100)");
  }
  if (params.morph_radius && *params.morph_radius < 0) {
    throw Error(ErrorKind::InvalidArgument, "morphology radius must be non-negative");
  }
}

ForegroundMask percentile_threshold(const AttentionMap& map, double percentile) {
  validate(map);
  if (!(percentile > 0.0 && percentile < 100.0)) {
    throw Error(ErrorKind::InvalidArgument, "percentile must lie in (0, 100)");
  }
  const std::size_t n = map.size();
  auto rank = static_cast<std::size_t>(std::ceil(percentile * static_cast<double>(n) / 100.0));
  rank = std::clamp<std::size_t>(rank, 1, n);

  std::vector<float> sorted = map.values;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(rank - 1), sorted.end());
  const float threshold = sorted[rank - 1];

  ForegroundMask mask(map.width, map.height);
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (map.values[i] > threshold) {
      mask.bits[i] = 1;
      any = true;
    }
  }
  if (!any) {
    throw Error(ErrorKind::EmptyMask, "no attention value exceeds the " +
                                          std::to_string(percentile) + "th percentile");
  }
  return mask;
}

namespace {

// One separable pass over lines of `len` samples spaced `stride` apart.
// `all_of` selects erosion (every in-bounds neighbour set) versus dilation
// (any neighbour set).
void morph_pass(const std::uint8_t* in, std::uint8_t* out, std::size_t lines, std::size_t len,
                std::size_t line_step, std::size_t stride, int radius, bool all_of) {
  const auto r = static_cast<std::ptrdiff_t>(radius);
  const auto n = static_cast<std::ptrdiff_t>(len);
  for (std::size_t line = 0; line < lines; ++line) {
    const std::uint8_t* src = in + line * line_step;
    std::uint8_t* dst = out + line * line_step;
    std::ptrdiff_t ones = 0;
    for (std::ptrdiff_t i = 0; i <= std::min(r, n - 1); ++i) ones += src[i * stride] ? 1 : 0;
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - r);
      const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + r);
      dst[i * stride] = all_of ? (ones == hi - lo + 1) : (ones > 0);
      if (i - r >= 0) ones -= src[(i - r) * stride] ? 1 : 0;
      if (i + r + 1 < n) ones += src[(i + r + 1) * stride] ? 1 : 0;
    }
  }
}

ForegroundMask morph(const ForegroundMask& mask, int radius, bool all_of) {
  if (radius < 0) throw Error(ErrorKind::InvalidArgument, "morphology radius must be non-negative");
  if (radius == 0 || mask.size() == 0) return mask;
  ForegroundMask tmp(mask.width, mask.height);
  ForegroundMask out(mask.width, mask.height);
  morph_pass(mask.bits.data(), tmp.bits.data(), mask.height, mask.width, mask.width, 1, radius, all_of);
  morph_pass(tmp.bits.data(), out.bits.data(), mask.width, mask.height, 1, mask.width, radius, all_of);
  return out;
}

// Labels 8-connected components in row-major discovery order; returns the
// pixel count per label (label k stored as k + 1 in `labels`).
std::vector<std::size_t> label_components(const ForegroundMask& mask, std::vector<std::uint32_t>& labels) {
  const std::size_t w = mask.width;
  const std::size_t h = mask.height;
  labels.assign(mask.size(), 0);
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < mask.size(); ++start) {
    if (!mask.bits[start] || labels[start] != 0) continue;
    const auto label = static_cast<std::uint32_t>(sizes.size() + 1);
    std::size_t size = 0;
    labels[start] = label;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t idx = stack.back();
      stack.pop_back();
      ++size;
      const std::size_t x = idx % w;
      const std::size_t y = idx / w;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          if ((dx < 0 && x == 0) || (dx > 0 && x + 1 == w)) continue;
          if ((dy < 0 && y == 0) || (dy > 0 && y + 1 == h)) continue;
          const std::size_t nb = (y + dy) * w + (x + dx);
          if (mask.bits[nb] && labels[nb] == 0) {
            labels[nb] = label;
            stack.push_back(nb);
          }
        }
      }
    }
    sizes.push_back(size);
  }
  return sizes;
}

}  // namespace

ForegroundMask erode(const ForegroundMask& mask, int radius) { return morph(mask, radius, true); }
ForegroundMask dilate(const ForegroundMask& mask, int radius) { return morph(mask, radius, false); }

ForegroundMask morph_open(const ForegroundMask& mask, int radius) {
  return dilate(erode(mask, radius), radius);
}

ForegroundMask morph_close(const ForegroundMask& mask, int radius) {
  return erode(dilate(mask, radius), radius);
}

ForegroundMask largest_component(const ForegroundMask& mask) {
  std::vector<std::uint32_t> labels;
  const auto sizes = label_components(mask, labels);
  if (sizes.empty()) throw Error(ErrorKind::EmptyMask, "mask has no foreground pixels");
  // labels are assigned in row-major order of each component's first pixel,
  // so the first maximum holds the smallest index
  const auto best = static_cast<std::uint32_t>(
      std::max_element(sizes.begin(), sizes.end()) - sizes.begin() + 1);
  ForegroundMask out(mask.width, mask.height);
  for (std::size_t i = 0; i < labels.size(); ++i) out.bits[i] = labels[i] == best ? 1 : 0;
  return out;
}

std::size_t count_components(const ForegroundMask& mask) {
  std::vector<std::uint32_t> labels;
  return label_components(mask, labels).size();
}

AttentionMap resize_bilinear(const AttentionMap& map, std::uint32_t width, std::uint32_t height) {
  validate(map);
  if (width == 0 || height == 0) {
    throw Error(ErrorKind::InvalidArgument, "resize target must be at least 1x1");
  }
  auto source_coord = [](std::uint32_t dst, std::uint32_t dst_len, std::uint32_t src_len) {
    if (dst_len == 1) return (static_cast<double>(src_len) - 1.0) / 2.0;
    return static_cast<double>(dst) * (static_cast<double>(src_len) - 1.0) /
           (static_cast<double>(dst_len) - 1.0);
  };

  AttentionMap out(width, height);
  std::vector<std::uint32_t> x0(width), x1(width);
  std::vector<double> fx(width);
  for (std::uint32_t x = 0; x < width; ++x) {
    const double sx = source_coord(x, width, map.width);
    x0[x] = std::min(static_cast<std::uint32_t>(std::floor(sx)), map.width - 1);
    x1[x] = std::min(x0[x] + 1, map.width - 1);
    fx[x] = sx - x0[x];
  }
  for (std::uint32_t y = 0; y < height; ++y) {
    const double sy = source_coord(y, height, map.height);
    const auto y0 = std::min(static_cast<std::uint32_t>(std::floor(sy)), map.height - 1);
    const auto y1 = std::min(y0 + 1, map.height - 1);
    const double fy = sy - y0;
    for (std::uint32_t x = 0; x < width; ++x) {
      const double top = map.at(x0[x], y0) + fx[x] * (map.at(x1[x], y0) - map.at(x0[x], y0));
      const double bottom = map.at(x0[x], y1) + fx[x] * (map.at(x1[x], y1) - map.at(x0[x], y1));
      const double v = top + fy * (bottom - top);
      out.values[static_cast<std::size_t>(y) * width + x] = static_cast<float>(std::max(0.0, v));
    }
  }
  return out;
}

ForegroundMask mask_from_attention(const AttentionMap& map, std::uint32_t width, std::uint32_t height,
                                   const MaskParams& params) {
  validate(params);
  const AttentionMap& resized_ref = map;
  AttentionMap resized;
  const bool same = map.width == width && map.height == height;
  if (!same) resized = resize_bilinear(map, width, height);
  const AttentionMap& attention = same ? resized_ref : resized;

  const int radius = params.resolved_radius(width, height);
  auto mask = percentile_threshold(attention, params.percentile);
  mask = morph_open(mask, radius);
  mask = morph_close(mask, radius);
  return largest_component(mask);
}

ForegroundMask extract_roi(const Radiograph& image, const AttentionProvider& provider,
                           const MaskParams& params) {
  validate(params);
  const auto map = provider.attention_for(image);
  return mask_from_attention(map, image.width, image.height, params);
}

}  // namespace rxprep
