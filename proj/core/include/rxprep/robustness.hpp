#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rxprep/attention.hpp"
#include "rxprep/raster.hpp"
#include "rxprep/roi_mask.hpp"

namespace rxprep {

struct Invert {};
struct Affine {
  double gain = 1.0;
  double bias = 0.0;
};
struct Requantize {
  int bits = 8;
};

/// Intensity-domain perturbation.
using AugSpec = std::variant<Invert, Affine, Requantize>;

std::string describe(const AugSpec& spec);

/// invert: v -> (2^b-1) - v; affine: clip(round(gain*v + bias)); requantize:
/// floor(v / 2^(b-bits)) at the new depth.
Radiograph augment(const Radiograph& image, const AugSpec& spec);

/// |a & b| / |a | b|; 1 when both are empty. Throws DimensionMismatch.
double mask_iou(const ForegroundMask& a, const ForegroundMask& b);

struct StabilityEntry {
  std::string aug;
  double iou = 0.0;
  bool empty = false;  // augmented image produced no foreground
};

struct StabilityReport {
  std::vector<StabilityEntry> entries;
  std::optional<double> min_iou;  // unset for an empty spec list
  std::optional<double> mean_iou;
};

/// Masks the unperturbed image, then every augmented variant, and compares.
/// EmptyMask on a variant is recorded as IoU 0; on the baseline it propagates.
StabilityReport stability_report(const Radiograph& image, const AttentionProvider& provider,
                                 const MaskParams& params, const std::vector<AugSpec>& specs,
                                 ForegroundMask* baseline_mask = nullptr);

}  // namespace rxprep
