#include "rxprep/enhance.hpp"

#include <algorithm>
#include <cmath>

#include "rxprep/error.hpp"
#include "rxprep/image_io.hpp"

namespace rxprep {

std::vector<std::uint32_t> equalization_lut(const Histogram& hist, std::uint32_t out_max) {
  const std::size_t levels = hist.counts.size();
  std::vector<std::uint32_t> lut(levels, 0);
  if (hist.occupied_levels() < 2) {
    const std::uint64_t in_max = max_level(hist.bit_depth);
    const std::uint64_t gain = (2 * std::uint64_t{out_max} + in_max) / (2 * in_max);
    for (std::size_t v = 0; v < levels; ++v) {
      lut[v] = static_cast<std::uint32_t>(std::min<std::uint64_t>(v * gain, out_max));
    }
    return lut;
  }

  const auto first = static_cast<std::size_t>(
      std::find_if(hist.counts.begin(), hist.counts.end(), [](std::uint64_t c) { return c != 0; }) -
      hist.counts.begin());
  const std::uint64_t total = hist.total();
  const std::uint64_t c_min = hist.counts[first];
  const std::uint64_t denom = total - c_min;  // > 0 with two occupied levels
  std::uint64_t cumulative = 0;
  for (std::size_t v = 0; v < levels; ++v) {
    cumulative += hist.counts[v];
    if (v < first) continue;
    const std::uint64_t num = (cumulative - c_min) * out_max;
    lut[v] = static_cast<std::uint32_t>((2 * num + denom) / (2 * denom));
  }
  return lut;
}

Radiograph masked_hist_equalize(const Radiograph& image, const ForegroundMask& mask) {
  const auto hist = compute_histogram(image, mask);
  if (hist.total() == 0) throw Error(ErrorKind::EmptyMask, "foreground mask is empty");
  const auto lut = equalization_lut(hist, kEnhancedMax);

  Radiograph out(image.width, image.height, 16);
  out.source = image.source;
  for (std::size_t i = 0; i < image.size(); ++i) {
    if (mask.bits[i]) out.pixels[i] = static_cast<std::uint16_t>(lut[image.pixels[i]]);
  }
  return out;
}

Radiograph global_hist_equalize(const Radiograph& image) {
  validate(image);
  return masked_hist_equalize(image, ForegroundMask(image.width, image.height, true));
}

void validate(const ClaheParams& params) {
  if (params.tile_rows == 0 || params.tile_cols == 0) {
    throw Error(ErrorKind::InvalidArgument, "CLAHE tile grid must be at least 1x1");
  }
  if (!(params.clip_factor > 0.0) || !std::isfinite(params.clip_factor)) {
    throw Error(ErrorKind::InvalidArgument, "CLAHE clip factor must be positive");
  }
}

std::uint64_t clahe_clip_limit(double clip_factor, std::uint64_t tile_pixels) {
  const double limit = std::floor(clip_factor * static_cast<double>(tile_pixels) / 256.0);
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(limit));
}

ClippedHistogram clip_histogram(std::span<const std::uint64_t> counts, std::uint64_t limit) {
  ClippedHistogram result;
  result.clipped.assign(counts.begin(), counts.end());
  for (auto& c : result.clipped) {
    if (c > limit) {
      result.excess += c - limit;
      c = limit;
    }
  }
  result.redistributed = result.clipped;
  const std::size_t bins = counts.size();
  if (bins == 0) return result;
  const std::uint64_t share = result.excess / bins;
  const std::uint64_t residual = result.excess % bins;
  for (std::size_t v = 0; v < bins; ++v) {
    result.redistributed[v] += share + (v < residual ? 1 : 0);
  }
  return result;
}

namespace {

struct TileAxis {
  std::vector<std::uint32_t> start;  // tile i spans [start[i], start[i+1])
  std::vector<double> centre;
};

TileAxis split_axis(std::uint32_t length, std::uint32_t tiles) {
  TileAxis axis;
  const std::uint32_t step = length / tiles;
  for (std::uint32_t i = 0; i < tiles; ++i) axis.start.push_back(i * step);
  axis.start.push_back(length);
  for (std::uint32_t i = 0; i < tiles; ++i) {
    axis.centre.push_back((static_cast<double>(axis.start[i]) + axis.start[i + 1] - 1.0) / 2.0);
  }
  return axis;
}

struct Blend {
  std::uint32_t lo;
  std::uint32_t hi;
  double weight;  // weight of `hi`
};

Blend blend_for(const TileAxis& axis, std::uint32_t pos) {
  const auto& c = axis.centre;
  const double p = pos;
  const auto upper = static_cast<std::uint32_t>(std::upper_bound(c.begin(), c.end(), p) - c.begin());
  if (upper == 0) return {0, 0, 0.0};
  const auto last = static_cast<std::uint32_t>(c.size() - 1);
  if (upper > last) return {last, last, 0.0};
  const std::uint32_t lo = upper - 1;
  return {lo, upper, (p - c[lo]) / (c[upper] - c[lo])};
}

}  // namespace

Radiograph clahe(const Radiograph& image8, const ClaheParams& params) {
  validate(image8);
  validate(params);
  if (image8.bit_depth != 8) throw Error(ErrorKind::InvalidArgument, "CLAHE expects an 8-bit raster");
  if (image8.width < params.tile_cols || image8.height < params.tile_rows) {
    throw Error(ErrorKind::TileTooSmall, "image " + std::to_string(image8.width) + "x" +
                                             std::to_string(image8.height) + " is smaller than the " +
                                             std::to_string(params.tile_cols) + "x" +
                                             std::to_string(params.tile_rows) + " tile grid");
  }

  const auto rows = split_axis(image8.height, params.tile_rows);
  const auto cols = split_axis(image8.width, params.tile_cols);

  std::vector<std::vector<std::uint32_t>> luts(std::size_t{params.tile_rows} * params.tile_cols);
  for (std::uint32_t ty = 0; ty < params.tile_rows; ++ty) {
    for (std::uint32_t tx = 0; tx < params.tile_cols; ++tx) {
      Histogram raw{8, std::vector<std::uint64_t>(256, 0)};
      for (std::uint32_t y = rows.start[ty]; y < rows.start[ty + 1]; ++y) {
        for (std::uint32_t x = cols.start[tx]; x < cols.start[tx + 1]; ++x) ++raw.counts[image8.at(x, y)];
      }
      auto& lut = luts[std::size_t{ty} * params.tile_cols + tx];
      if (raw.occupied_levels() < 2) {
        lut = equalization_lut(raw, 255);
        continue;
      }
      const auto clipped = clip_histogram(raw.counts, clahe_clip_limit(params.clip_factor, raw.total()));
      lut = equalization_lut(Histogram{8, clipped.redistributed}, 255);
    }
  }

  Radiograph out(image8.width, image8.height, 8);
  out.source = image8.source;
  std::vector<Blend> xblend(image8.width);
  for (std::uint32_t x = 0; x < image8.width; ++x) xblend[x] = blend_for(cols, x);
  for (std::uint32_t y = 0; y < image8.height; ++y) {
    const Blend by = blend_for(rows, y);
    const auto* top = &luts[std::size_t{by.lo} * params.tile_cols];
    const auto* bottom = &luts[std::size_t{by.hi} * params.tile_cols];
    for (std::uint32_t x = 0; x < image8.width; ++x) {
      const Blend& bx = xblend[x];
      const auto v = image8.at(x, y);
      const double t = (1.0 - bx.weight) * top[bx.lo][v] + bx.weight * top[bx.hi][v];
      const double b = (1.0 - bx.weight) * bottom[bx.lo][v] + bx.weight * bottom[bx.hi][v];
      const double blended = (1.0 - by.weight) * t + by.weight * b;
      out.at(x, y) = static_cast<std::uint16_t>(std::clamp(std::round(blended), 0.0, 255.0));
    }
  }
  return out;
}

std::string output_stem(const Radiograph& image) {
  if (image.source.empty()) return "image";
  return image.source.stem().string();
}

EnhanceResult enhance_pipeline(const Radiograph& image, const AttentionProvider& provider,
                               const MaskParams& mask_params, const std::filesystem::path& out_dir,
                               const std::string& extension) {
  EnhanceResult result;
  result.mask = extract_roi(image, provider, mask_params);
  result.enhanced = masked_hist_equalize(image, result.mask);
  const auto stem = output_stem(image);
  result.enhanced_path = out_dir / (stem + ".enhanced" + extension);
  result.mask_path = out_dir / (stem + ".mask" + extension);
  write_image(result.enhanced, result.enhanced_path);
  write_image(mask_to_raster(result.mask), result.mask_path);
  return result;
}

}  // namespace rxprep
