// rxprep: batch front end for foreground-masked radiograph enhancement,
// baseline preprocessing, robustness reports and detection evaluation.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"

namespace fs = std::filesystem;
using namespace rxprep::cli;

int main(int argc, char** argv) {
  CLI::App app{"Radiograph preprocessing and evaluation toolkit", "rxprep"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value file; every key is also a flag of the same name");

  Config cfg;
  app.add_option("--percentile", cfg.percentile, "Attention percentile for the foreground threshold")
      ->capture_default_str();
  app.add_option("--morph-radius", cfg.morph_radius,
                 "Half-width of the square morphology element (default: 0.5% of the short side, min 1)");
  app.add_option("--attn-source", cfg.attn_source, "Attention provider")
      ->check(CLI::IsMember({"file", "synthetic"}))
      ->capture_default_str();
  app.add_option("--attn-suffix", cfg.attn_suffix, "Sidecar suffix replacing the image extension")
      ->capture_default_str();
  app.add_option("--synthetic-radius", cfg.synthetic_radius, "Window radius of the synthetic provider")
      ->capture_default_str();
  app.add_option("--clahe-tile-rows", cfg.clahe_tile_rows, "CLAHE tile rows")->capture_default_str();
  app.add_option("--clahe-tile-cols", cfg.clahe_tile_cols, "CLAHE tile columns")->capture_default_str();
  app.add_option("--clahe-clip", cfg.clahe_clip, "CLAHE clip factor")->capture_default_str();
  app.add_option("--target-fpr", cfg.target_fpr, "False-positive rate for the sensitivity operating point")
      ->capture_default_str();
  app.add_option("--iou-thresh", cfg.iou_thresh, "Boxes match when IoU is strictly above this")
      ->capture_default_str();
  app.add_option("--bit-depth", cfg.bit_depth, "Override the bit depth read from image metadata");
  app.add_option("--format", cfg.format, "Output container")
      ->check(CLI::IsMember({"png", "pgm"}))
      ->capture_default_str();
  app.add_option("--out-dir", cfg.out_dir, "Output directory")->capture_default_str();
  app.add_option("--jobs", cfg.jobs, "Worker threads (0 = all cores)")->capture_default_str();

  std::vector<fs::path> inputs;

  auto* enhance = app.add_subcommand("enhance", "Foreground mask + masked 16-bit histogram equalization");
  enhance->add_option("inputs", inputs, "Input images")->required()->check(CLI::ExistingFile);

  auto* mask = app.add_subcommand("mask", "Write foreground masks only");
  mask->add_option("inputs", inputs, "Input images")->required()->check(CLI::ExistingFile);

  std::string method;
  auto* baseline = app.add_subcommand("baseline", "Baseline preprocessing: he, clahe or 8bit");
  baseline->add_option("--method", method, "Baseline method")
      ->required()
      ->check(CLI::IsMember({"he", "clahe", "8bit"}));
  baseline->add_option("inputs", inputs, "Input images")->required()->check(CLI::ExistingFile);

  std::optional<fs::path> hist_mask;
  auto* hist = app.add_subcommand("hist", "Export intensity histograms as CSV");
  hist->add_option("--mask", hist_mask, "Restrict counting to a mask image")->check(CLI::ExistingFile);
  hist->add_option("inputs", inputs, "Input images")->required()->check(CLI::ExistingFile);

  fs::path specs;
  fs::path stability_input;
  auto* stability = app.add_subcommand("stability", "Mask IoU under intensity augmentations");
  stability->add_option("--specs", specs, "JSON list of augmentations")->required()->check(CLI::ExistingFile);
  stability->add_option("input", stability_input, "Input image")->required()->check(CLI::ExistingFile);

  fs::path gt_path;
  fs::path pred_path;
  std::optional<fs::path> report_path;
  std::optional<fs::path> roc_path;
  auto* eval = app.add_subcommand("eval", "Detection and classification metrics");
  eval->add_option("--gt", gt_path, "Ground-truth JSON")->required()->check(CLI::ExistingFile);
  eval->add_option("--pred", pred_path, "Predictions JSON")->required()->check(CLI::ExistingFile);
  eval->add_option("--report", report_path, "Report path (default <out-dir>/eval_report.json)");
  eval->add_option("--roc-csv", roc_path, "ROC CSV path (default <out-dir>/roc.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (*enhance) return cmd_enhance(inputs, cfg);
  if (*mask) return cmd_mask(inputs, cfg);
  if (*baseline) return cmd_baseline(method, inputs, cfg);
  if (*hist) return cmd_hist(inputs, hist_mask, cfg);
  if (*stability) return cmd_stability(stability_input, specs, cfg);
  if (*eval) return cmd_eval(gt_path, pred_path, cfg, report_path, roc_path);
  return kExitUsage;
}
