#include "rxprep/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rxprep/error.hpp"

namespace rxprep {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

std::string describe(const AugSpec& spec) {
  return std::visit(Overloaded{
                        [](const Invert&) { return std::string("invert"); },
                        [](const Affine& a) {
                          std::ostringstream os;
                          os << "affine(gain=" << a.gain << ",bias=" << a.bias << ")";
                          return os.str();
                        },
                        [](const Requantize& r) { return "requantize(" + std::to_string(r.bits) + ")"; },
                    },
                    spec);
}

Radiograph augment(const Radiograph& image, const AugSpec& spec) {
  validate(image);
  Radiograph out = image;
  const auto top = max_level(image.bit_depth);
  std::visit(Overloaded{
                 [&](const Invert&) {
                   for (auto& v : out.pixels) v = static_cast<std::uint16_t>(top - v);
                 },
                 [&](const Affine& a) {
                   if (!(a.gain > 0.0) || !std::isfinite(a.gain) || !std::isfinite(a.bias)) {
                     throw Error(ErrorKind::InvalidArgument, "affine gain must be positive and finite");
                   }
                   for (auto& v : out.pixels) {
                     const double mapped = std::round(a.gain * v + a.bias);
                     v = static_cast<std::uint16_t>(std::clamp(mapped, 0.0, static_cast<double>(top)));
                   }
                 },
                 [&](const Requantize& r) {
                   if (r.bits < kMinBitDepth || r.bits > image.bit_depth) {
                     throw Error(ErrorKind::InvalidArgument,
                                 "requantize depth must lie in [8, " + std::to_string(image.bit_depth) + "]");
                   }
                   const int shift = image.bit_depth - r.bits;
                   for (auto& v : out.pixels) v = static_cast<std::uint16_t>(v >> shift);
                   out.bit_depth = r.bits;
                 },
             },
             spec);
  return out;
}

double mask_iou(const ForegroundMask& a, const ForegroundMask& b) {
  if (a.width != b.width || a.height != b.height || a.bits.size() != b.bits.size()) {
    throw Error(ErrorKind::DimensionMismatch, "masks differ in size");
  }
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < a.bits.size(); ++i) {
    const bool x = a.bits[i] != 0;
    const bool y = b.bits[i] != 0;
    inter += (x && y) ? 1 : 0;
    uni += (x || y) ? 1 : 0;
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

StabilityReport stability_report(const Radiograph& image, const AttentionProvider& provider,
                                 const MaskParams& params, const std::vector<AugSpec>& specs,
                                 ForegroundMask* baseline_mask) {
  const auto baseline = extract_roi(image, provider, params);
  if (baseline_mask != nullptr) *baseline_mask = baseline;

  StabilityReport report;
  for (const auto& spec : specs) {
    StabilityEntry entry;
    entry.aug = describe(spec);
    const auto variant = augment(image, spec);
    try {
      entry.iou = mask_iou(baseline, extract_roi(variant, provider, params));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::EmptyMask) throw;
      entry.iou = 0.0;
      entry.empty = true;
    }
    report.entries.push_back(std::move(entry));
  }
  if (!report.entries.empty()) {
    double lo = 1.0;
    double sum = 0.0;
    for (const auto& e : report.entries) {
      lo = std::min(lo, e.iou);
      sum += e.iou;
    }
    report.min_iou = lo;
    report.mean_iou = sum / static_cast<double>(report.entries.size());
  }
  return report;
}

}  // namespace rxprep
