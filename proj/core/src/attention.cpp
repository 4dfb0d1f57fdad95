#include "rxprep/attention.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <system_error>
#include <vector>

#include "rxprep/attn_io.hpp"
#include "rxprep/error.hpp"

namespace rxprep {

FileProvider::FileProvider(std::string suffix) : suffix_(std::move(suffix)) {
  if (suffix_.empty()) throw Error(ErrorKind::InvalidArgument, "attention suffix must not be empty");
}

std::filesystem::path FileProvider::sidecar_for(const std::filesystem::path& image_path) const {
  auto sidecar = image_path;
  sidecar.replace_extension();
  sidecar += suffix_;
  return sidecar;
}

AttentionMap FileProvider::attention_for(const Radiograph& image) const {
  if (image.source.empty()) {
    throw Error(ErrorKind::MissingSidecar, "image has no source path to derive a sidecar from");
  }
  const auto sidecar = sidecar_for(image.source);
  std::error_code ec;
  if (!std::filesystem::is_regular_file(sidecar, ec)) {
    throw Error(ErrorKind::MissingSidecar, "no attention sidecar " + sidecar.string());
  }
  return read_attn(sidecar);
}

SyntheticProvider::SyntheticProvider(int radius) : radius_(radius) {
  // keeps n * sum(v^2) within int64 for 16-bit samples
  if (radius_ < 0 || radius_ > kMaxRadius) {
    throw Error(ErrorKind::InvalidArgument, "window radius must be in [0, 64]");
  }
}

namespace {

// Windowed sums of v and v^2 along one row, clamped at the row ends.
void row_window_sums(const std::uint16_t* row, std::int64_t width, std::int64_t r,
                     std::vector<std::int64_t>& s1, std::vector<std::int64_t>& s2) {
  auto sample = [&](std::int64_t x) -> std::int64_t {
    return row[std::clamp<std::int64_t>(x, 0, width - 1)];
  };
  std::int64_t a = 0;
  std::int64_t b = 0;
  for (std::int64_t x = -r; x <= r; ++x) {
    const auto v = sample(x);
    a += v;
    b += v * v;
  }
  for (std::int64_t x = 0; x < width; ++x) {
    s1[x] = a;
    s2[x] = b;
    const auto out = sample(x - r);
    const auto in = sample(x + r + 1);
    a += in - out;
    b += in * in - out * out;
  }
}

}  // namespace

AttentionMap SyntheticProvider::attention_for(const Radiograph& image) const {
  validate(image);
  const std::int64_t w = image.width;
  const std::int64_t h = image.height;
  const std::int64_t r = radius_;
  const std::int64_t n = (2 * r + 1) * (2 * r + 1);

  auto row_ptr = [&](std::int64_t y) {
    return image.pixels.data() + std::clamp<std::int64_t>(y, 0, h - 1) * w;
  };

  std::vector<std::int64_t> col1(w, 0), col2(w, 0);
  std::vector<std::int64_t> t1(w), t2(w);
  for (std::int64_t y = -r; y <= r; ++y) {
    row_window_sums(row_ptr(y), w, r, t1, t2);
    for (std::int64_t x = 0; x < w; ++x) {
      col1[x] += t1[x];
      col2[x] += t2[x];
    }
  }

  // n^2 * variance = n * sum(v^2) - sum(v)^2 is an exact integer, so the
  // result is unchanged by adding a constant to every pixel.
  AttentionMap map(image.width, image.height);
  for (std::int64_t y = 0; y < h; ++y) {
    for (std::int64_t x = 0; x < w; ++x) {
      const std::int64_t scaled_var = n * col2[x] - col1[x] * col1[x];
      map.values[y * w + x] =
          static_cast<float>(std::sqrt(static_cast<double>(scaled_var)) / static_cast<double>(n));
    }
    if (y + 1 == h) break;
    row_window_sums(row_ptr(y - r), w, r, t1, t2);
    for (std::int64_t x = 0; x < w; ++x) {
      col1[x] -= t1[x];
      col2[x] -= t2[x];
    }
    row_window_sums(row_ptr(y + r + 1), w, r, t1, t2);
    for (std::int64_t x = 0; x < w; ++x) {
      col1[x] += t1[x];
      col2[x] += t2[x];
    }
  }
  return map;
}

}  // namespace rxprep
