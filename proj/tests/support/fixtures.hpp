#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "rxprep/raster.hpp"

namespace rxprep::fixtures {

inline Radiograph random_image(std::mt19937& rng, std::uint32_t w, std::uint32_t h, int bits) {
  Radiograph img(w, h, bits);
  std::uniform_int_distribution<int> dist(0, static_cast<int>(max_level(bits)));
  for (auto& v : img.pixels) v = static_cast<std::uint16_t>(dist(rng));
  return img;
}

/// Image whose values cluster in a narrow band, like an under-exposed scan.
inline Radiograph narrow_band_image(std::mt19937& rng, std::uint32_t w, std::uint32_t h, int bits) {
  Radiograph img(w, h, bits);
  const double top = max_level(bits);
  std::normal_distribution<double> dist(top * 0.3, top * 0.05);
  for (auto& v : img.pixels) v = static_cast<std::uint16_t>(std::clamp(dist(rng), 0.0, top));
  return img;
}

inline ForegroundMask random_mask(std::mt19937& rng, std::uint32_t w, std::uint32_t h, double density) {
  ForegroundMask m(w, h);
  std::bernoulli_distribution on(density);
  for (auto& b : m.bits) b = on(rng) ? 1 : 0;
  return m;
}

/// Random blob-ish mask: a few filled rectangles plus salt noise.
inline ForegroundMask blobby_mask(std::mt19937& rng, std::uint32_t w, std::uint32_t h) {
  ForegroundMask m = random_mask(rng, w, h, 0.05);
  std::uniform_int_distribution<std::uint32_t> xs(0, w - 1), ys(0, h - 1);
  std::uniform_int_distribution<int> count(1, 4);
  for (int k = count(rng); k > 0; --k) {
    const auto x0 = xs(rng), y0 = ys(rng);
    const auto x1 = std::min(w, x0 + 1 + xs(rng) / 2), y1 = std::min(h, y0 + 1 + ys(rng) / 2);
    for (auto y = y0; y < y1; ++y)
      for (auto x = x0; x < x1; ++x) m.set(x, y, true);
  }
  return m;
}

/// Random strictly increasing map from [0, 2^bits) into [0, 65535].
inline std::vector<std::uint16_t> random_increasing_lut(std::mt19937& rng, int bits) {
  std::vector<std::uint16_t> all(65536);
  std::iota(all.begin(), all.end(), 0);
  std::vector<std::uint16_t> lut;
  std::sample(all.begin(), all.end(), std::back_inserter(lut), std::size_t{max_level(bits)} + 1, rng);
  std::sort(lut.begin(), lut.end());
  return lut;
}

/// Flat background with a noisy bright rectangle standing in for the organ.
inline Radiograph bone_block(std::mt19937& rng, std::uint32_t w, std::uint32_t h, std::uint32_t bx,
                             std::uint32_t by, std::uint32_t bw, std::uint32_t bh, int bits = 12,
                             std::uint16_t background = 0) {
  Radiograph img(w, h, bits, background);
  const int top = static_cast<int>(max_level(bits));
  std::uniform_int_distribution<int> noise(top / 3, top / 3 + top / 4);
  for (auto y = by; y < by + bh; ++y)
    for (auto x = bx; x < bx + bw; ++x) img.at(x, y) = static_cast<std::uint16_t>(noise(rng));
  return img;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("rxprep_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::vector<std::uint8_t> file_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace rxprep::fixtures
