#pragma once

#include <filesystem>
#include <string>

#include "rxprep/raster.hpp"

namespace rxprep {

/// Source of per-image attention maps. Implementations are read-only after
/// construction and return identical maps for identical inputs.
class AttentionProvider {
 public:
  virtual ~AttentionProvider() = default;
  virtual AttentionMap attention_for(const Radiograph& image) const = 0;
};

/// Reads a precomputed ATTN sidecar next to the image: the image extension is
/// replaced by `suffix` ("scan.png" -> "scan.attn").
class FileProvider final : public AttentionProvider {
 public:
  explicit FileProvider(std::string suffix = ".attn");

  std::filesystem::path sidecar_for(const std::filesystem::path& image_path) const;
  /// Throws MissingSidecar when the image has no source path or no sidecar.
  AttentionMap attention_for(const Radiograph& image) const override;

  const std::string& suffix() const noexcept { return suffix_; }

 private:
  std::string suffix_;
};

/// Model-free stand-in: local standard deviation over a (2r+1)^2 window with
/// clamp-to-edge sampling. Flat backgrounds score zero.
class SyntheticProvider final : public AttentionProvider {
 public:
  static constexpr int kMaxRadius = 64;

  explicit SyntheticProvider(int radius = 7);

  AttentionMap attention_for(const Radiograph& image) const override;
  int radius() const noexcept { return radius_; }

 private:
  int radius_;
};

}  // namespace rxprep
