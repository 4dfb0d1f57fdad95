#pragma once

#include <filesystem>
#include <optional>

#include "rxprep/raster.hpp"

namespace rxprep {

/// Loads an 8- or 16-bit single-channel PNG or binary PGM (P5).
///
/// The bit depth comes from container metadata: the PNG sBIT chunk when
/// present (else the sample depth), or the bit width of the PGM maxval.
/// `bit_depth_override` replaces that value, e.g. for 12-bit data stored in a
/// 16-bit container without sBIT. Any pixel exceeding 2^b - 1 under the
/// chosen depth is reported as CorruptFile.
///
/// Throws UnsupportedFormat, ColorImageRejected, CorruptFile or IoFailure.
Radiograph load_image(const std::filesystem::path& path,
                      std::optional<int> bit_depth_override = std::nullopt);

/// Writes PNG or PGM depending on the extension (.png / .pgm). Rasters with
/// b <= 8 are stored with 8-bit samples, deeper ones with 16-bit samples; the
/// bit depth is recorded (sBIT for PNG, maxval for PGM) so it reloads exactly.
void write_image(const Radiograph& image, const std::filesystem::path& path);

}  // namespace rxprep
