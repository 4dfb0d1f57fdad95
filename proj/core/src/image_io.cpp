#include "rxprep/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <span>
#include <string>

#include "rxprep/error.hpp"

namespace rxprep {
namespace {

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorKind::IoFailure, "failed reading " + path.string());
  return bytes;
}

int depth_for_maxval(std::uint32_t maxval) {
  return std::max(kMinBitDepth, static_cast<int>(std::bit_width(maxval)));
}

void apply_bit_depth(Radiograph& image, int container_depth, std::optional<int> override_depth,
                     const std::filesystem::path& path) {
  const int b = override_depth.value_or(container_depth);
  if (b < kMinBitDepth || b > kMaxBitDepth) {
    throw Error(ErrorKind::InvalidArgument, "bit depth " + std::to_string(b) + " outside [8, 16]");
  }
  const auto limit = max_level(b);
  if (std::any_of(image.pixels.begin(), image.pixels.end(),
                  [limit](std::uint16_t v) { return v > limit; })) {
    throw Error(ErrorKind::CorruptFile, path.string() + ": pixel values exceed " +
                                            std::to_string(b) + "-bit range");
  }
  image.bit_depth = b;
}

// ---------------------------------------------------------------------------
// PGM

class PgmHeaderReader {
 public:
  explicit PgmHeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint32_t next_uint() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !is_digit(bytes_[pos_])) {
      throw Error(ErrorKind::CorruptFile, "malformed PGM header");
    }
    std::uint64_t value = 0;
    while (pos_ < bytes_.size() && is_digit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_++] - '0');
      if (value > 0xFFFFFFFFULL) throw Error(ErrorKind::CorruptFile, "PGM header value overflow");
    }
    return static_cast<std::uint32_t>(value);
  }

  // exactly one whitespace byte separates maxval from the raster
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size() || !is_space(bytes_[pos_])) {
      throw Error(ErrorKind::CorruptFile, "malformed PGM header");
    }
    return pos_ + 1;
  }

 private:
  static bool is_digit(std::uint8_t c) { return c >= '0' && c <= '9'; }
  static bool is_space(std::uint8_t c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
  }
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (is_space(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 2;
};

Radiograph decode_pgm(std::span<const std::uint8_t> bytes, const std::filesystem::path& path,
                      std::optional<int> override_depth) {
  PgmHeaderReader header(bytes);
  const auto width = header.next_uint();
  const auto height = header.next_uint();
  const auto maxval = header.next_uint();
  if (width == 0 || height == 0) throw Error(ErrorKind::CorruptFile, "PGM has zero dimension");
  if (maxval == 0 || maxval > 65535) {
    throw Error(ErrorKind::CorruptFile, "PGM maxval out of range");
  }
  const std::size_t offset = header.raster_offset();
  const std::size_t sample_bytes = maxval > 255 ? 2 : 1;
  const std::size_t count = static_cast<std::size_t>(width) * height;
  if (bytes.size() - offset < count * sample_bytes) {
    throw Error(ErrorKind::CorruptFile, path.string() + ": PGM raster is truncated");
  }

  Radiograph image(width, height, 16);
  image.source = path;
  const std::uint8_t* p = bytes.data() + offset;
  for (std::size_t i = 0; i < count; ++i) {
    std::uint16_t v = sample_bytes == 2 ? static_cast<std::uint16_t>((p[2 * i] << 8) | p[2 * i + 1])
                                        : p[i];
    if (v > maxval) throw Error(ErrorKind::CorruptFile, path.string() + ": sample exceeds maxval");
    image.pixels[i] = v;
  }
  apply_bit_depth(image, depth_for_maxval(maxval), override_depth, path);
  return image;
}

void encode_pgm(const Radiograph& image, const std::filesystem::path& path) {
  const auto maxval = max_level(image.bit_depth);
  std::string header = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) +
                       "\n" + std::to_string(maxval) + "\n";
  std::vector<std::uint8_t> raster;
  if (maxval > 255) {
    raster.reserve(image.size() * 2);
    for (auto v : image.pixels) {
      raster.push_back(static_cast<std::uint8_t>(v >> 8));
      raster.push_back(static_cast<std::uint8_t>(v & 0xFF));
    }
  } else {
    raster.assign(image.pixels.begin(), image.pixels.end());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot open " + path.string() + " for writing");
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
  out.flush();
  if (!out) throw Error(ErrorKind::IoFailure, "failed writing " + path.string());
}

// ---------------------------------------------------------------------------
// PNG
//
// libpng reports errors by longjmp, so the functions holding a setjmp point
// keep only trivially destructible locals and hand results back through
// caller-owned objects.

struct PngSource {
  const std::uint8_t* data;
  std::size_t size;
  std::size_t pos;
};

struct PngHeader {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  int sample_depth = 0;
  int color_type = 0;
  int significant_bits = 0;
};

enum class PngStatus { Ok, LibpngError, Color, LowDepth };

void png_read_from_memory(png_structp png, png_bytep out, png_size_t length) {
  auto* src = static_cast<PngSource*>(png_get_io_ptr(png));
  if (src->size - src->pos < length) {
    png_error(png, "unexpected end of PNG data");
  }
  std::memcpy(out, src->data + src->pos, length);
  src->pos += length;
}

void png_error_to_buffer(png_structp png, png_const_charp message) {
  auto* buffer = static_cast<char*>(png_get_error_ptr(png));
  std::snprintf(buffer, 256, "%s", message);
  png_longjmp(png, 1);
}

void png_ignore_warning(png_structp, png_const_charp) {}

PngStatus decode_png_raw(PngSource& src, PngHeader& header, std::vector<std::uint8_t>& raster,
                         std::vector<png_bytep>& rows, char* errbuf) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, errbuf, png_error_to_buffer,
                                           png_ignore_warning);
  if (png == nullptr) return PngStatus::LibpngError;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return PngStatus::LibpngError;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return PngStatus::LibpngError;
  }
  png_set_read_fn(png, &src, png_read_from_memory);
  png_read_info(png, info);

  header.width = png_get_image_width(png, info);
  header.height = png_get_image_height(png, info);
  header.sample_depth = png_get_bit_depth(png, info);
  header.color_type = png_get_color_type(png, info);
  if (header.color_type != PNG_COLOR_TYPE_GRAY) {
    png_destroy_read_struct(&png, &info, nullptr);
    return PngStatus::Color;
  }
  if (header.sample_depth < 8) {
    png_destroy_read_struct(&png, &info, nullptr);
    return PngStatus::LowDepth;
  }
  png_color_8p sig = nullptr;
  if (png_get_sBIT(png, info, &sig) != 0 && sig != nullptr) {
    header.significant_bits = sig->gray;
  }
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  const std::size_t row_bytes = png_get_rowbytes(png, info);
  raster.resize(row_bytes * header.height);
  rows.resize(header.height);
  for (std::uint32_t y = 0; y < header.height; ++y) rows[y] = raster.data() + y * row_bytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return PngStatus::Ok;
}

Radiograph decode_png(std::span<const std::uint8_t> bytes, const std::filesystem::path& path,
                      std::optional<int> override_depth) {
  PngSource src{bytes.data(), bytes.size(), 0};
  PngHeader header;
  std::vector<std::uint8_t> raster;
  std::vector<png_bytep> rows;
  char errbuf[256] = "corrupt PNG";
  switch (decode_png_raw(src, header, raster, rows, errbuf)) {
    case PngStatus::Ok: break;
    case PngStatus::Color:
      throw Error(ErrorKind::ColorImageRejected, path.string() + ": not a single-channel image");
    case PngStatus::LowDepth:
      throw Error(ErrorKind::UnsupportedFormat, path.string() + ": PNG sample depth below 8 bits");
    case PngStatus::LibpngError:
      throw Error(ErrorKind::CorruptFile, path.string() + ": " + errbuf);
  }

  Radiograph image(header.width, header.height, 16);
  image.source = path;
  const bool wide = header.sample_depth == 16;
  for (std::size_t i = 0; i < image.size(); ++i) {
    image.pixels[i] = wide ? static_cast<std::uint16_t>((raster[2 * i] << 8) | raster[2 * i + 1])
                           : raster[i];
  }
  int depth = header.sample_depth;
  if (header.significant_bits >= kMinBitDepth && header.significant_bits <= header.sample_depth) {
    depth = header.significant_bits;
  }
  apply_bit_depth(image, depth, override_depth, path);
  return image;
}

bool encode_png_raw(std::FILE* fp, const Radiograph& image, std::vector<png_bytep>& rows,
                    char* errbuf) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, errbuf, png_error_to_buffer,
                                            png_ignore_warning);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  const int sample_depth = image.bit_depth > 8 ? 16 : 8;
  png_init_io(png, fp);
  png_set_IHDR(png, info, image.width, image.height, sample_depth, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_color_8 sig{};
  sig.gray = static_cast<png_byte>(image.bit_depth);
  png_set_sBIT(png, info, &sig);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

void encode_png(const Radiograph& image, const std::filesystem::path& path) {
  const bool wide = image.bit_depth > 8;
  const std::size_t row_bytes = static_cast<std::size_t>(image.width) * (wide ? 2 : 1);
  std::vector<std::uint8_t> raster(row_bytes * image.height);
  for (std::size_t i = 0; i < image.size(); ++i) {
    if (wide) {
      raster[2 * i] = static_cast<std::uint8_t>(image.pixels[i] >> 8);
      raster[2 * i + 1] = static_cast<std::uint8_t>(image.pixels[i] & 0xFF);
    } else {
      raster[i] = static_cast<std::uint8_t>(image.pixels[i]);
    }
  }
  std::vector<png_bytep> rows(image.height);
  for (std::uint32_t y = 0; y < image.height; ++y) rows[y] = raster.data() + y * row_bytes;

  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (fp == nullptr) throw Error(ErrorKind::IoFailure, "cannot open " + path.string() + " for writing");
  char errbuf[256] = "PNG encoder failure";
  const bool ok = encode_png_raw(fp, image, rows, errbuf);
  const bool closed = std::fclose(fp) == 0;
  if (!ok) throw Error(ErrorKind::IoFailure, path.string() + ": " + errbuf);
  if (!closed) throw Error(ErrorKind::IoFailure, "failed writing " + path.string());
}

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

}  // namespace

Radiograph load_image(const std::filesystem::path& path, std::optional<int> bit_depth_override) {
  const auto bytes = slurp(path);
  static constexpr std::uint8_t kPngSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
  if (bytes.size() >= 8 && std::equal(std::begin(kPngSig), std::end(kPngSig), bytes.begin())) {
    return decode_png(bytes, path, bit_depth_override);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P') {
    switch (bytes[1]) {
      case '5': return decode_pgm(bytes, path, bit_depth_override);
      case '3':
      case '6': throw Error(ErrorKind::ColorImageRejected, path.string() + ": PPM color image");
      default: break;
    }
  }
  throw Error(ErrorKind::UnsupportedFormat, path.string() + ": not a PNG or binary PGM file");
}

void write_image(const Radiograph& image, const std::filesystem::path& path) {
  validate(image);
  const auto ext = lower_extension(path);
  if (ext == ".png") {
    encode_png(image, path);
  } else if (ext == ".pgm") {
    encode_pgm(image, path);
  } else {
    throw Error(ErrorKind::UnsupportedFormat, path.string() + ": extension must be .png or .pgm");
  }
}

}  // namespace rxprep
