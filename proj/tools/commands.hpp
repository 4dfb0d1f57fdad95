#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rxprep/attention.hpp"
#include "rxprep/detect_eval.hpp"
#include "rxprep/enhance.hpp"
#include "rxprep/robustness.hpp"
#include "rxprep/roi_mask.hpp"

namespace rxprep::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,   // bad flags, malformed config or schema
  kExitPartial = 2, // at least one input failed
};

struct Config {
  double percentile = 70.0;
  std::optional<int> morph_radius;
  std::string attn_source = "file";  // file | synthetic
  std::string attn_suffix = ".attn";
  int synthetic_radius = 7;
  std::uint32_t clahe_tile_rows = 8;
  std::uint32_t clahe_tile_cols = 8;
  double clahe_clip = 2.0;
  double target_fpr = 0.015;
  double iou_thresh = 0.5;
  std::optional<int> bit_depth;
  std::string format = "png";  // png | pgm
  std::filesystem::path out_dir = ".";
  unsigned jobs = 0;  // 0 = hardware concurrency

  MaskParams mask_params() const;
  ClaheParams clahe_params() const;
  EvalConfig eval_config() const;
  std::unique_ptr<AttentionProvider> make_provider() const;
  std::string extension() const { return "." + format; }
};

/// Throws rxprep::Error(InvalidArgument) on out-of-range settings.
void validate(const Config& config);

int cmd_enhance(const std::vector<std::filesystem::path>& inputs, const Config& config);
int cmd_mask(const std::vector<std::filesystem::path>& inputs, const Config& config);
/// method is one of "he", "clahe", "8bit".
int cmd_baseline(const std::string& method, const std::vector<std::filesystem::path>& inputs,
                 const Config& config);
int cmd_hist(const std::vector<std::filesystem::path>& inputs, const std::optional<std::filesystem::path>& mask,
             const Config& config);
int cmd_stability(const std::filesystem::path& input, const std::filesystem::path& specs_file,
                  const Config& config);
int cmd_eval(const std::filesystem::path& gt, const std::filesystem::path& preds, const Config& config,
             const std::optional<std::filesystem::path>& report_path = std::nullopt,
             const std::optional<std::filesystem::path>& roc_csv_path = std::nullopt);

/// Parses a JSON array of augmentations such as
/// [{"kind":"invert"}, {"kind":"affine","gain":2,"bias":0}, {"kind":"requantize","bits":8}].
std::vector<AugSpec> parse_aug_specs(const std::string& json_text);

}  // namespace rxprep::cli
