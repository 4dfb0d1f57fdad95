#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <thread>

#include "json.hpp"
#include "rxprep/error.hpp"
#include "rxprep/image_io.hpp"
#include "rxprep/raster.hpp"

namespace rxprep::cli {

using nlohmann::json;
namespace fs = std::filesystem;

MaskParams Config::mask_params() const { return MaskParams{percentile, morph_radius}; }

ClaheParams Config::clahe_params() const { return ClaheParams{clahe_tile_rows, clahe_tile_cols, clahe_clip}; }

EvalConfig Config::eval_config() const { return EvalConfig{iou_thresh, target_fpr}; }

std::unique_ptr<AttentionProvider> Config::make_provider() const {
  if (attn_source == "synthetic") return std::make_unique<SyntheticProvider>(synthetic_radius);
  return std::make_unique<FileProvider>(attn_suffix);
}

void validate(const Config& config) {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::InvalidArgument, what); };
  validate(config.mask_params());
  validate(config.clahe_params());
  if (config.attn_source != "file" && config.attn_source != "synthetic") {
    fail("attn-source must be 'file' or 'synthetic'");
  }
  if (config.format != "png" && config.format != "pgm") fail("format must be 'png' or 'pgm'");
  if (config.bit_depth && (*config.bit_depth < kMinBitDepth || *config.bit_depth > kMaxBitDepth)) {
    fail("bit-depth must lie in [8, 16]");
  }
  if (!(config.target_fpr >= 0.0 && config.target_fpr <= 1.0)) fail("target-fpr must lie in [0, 1]");
  if (!(config.iou_thresh >= 0.0 && config.iou_thresh < 1.0)) fail("iou-thresh must lie in [0, 1)");
  if (config.synthetic_radius < 0 || config.synthetic_radius > SyntheticProvider::kMaxRadius) {
    fail("synthetic-radius must lie in [0, 64]");
  }
}

namespace {

struct Failure {
  fs::path input;
  std::string kind;
  std::string message;
};

using ImageTask = std::function<void(const fs::path&)>;

// Runs `task` over every input, isolating per-input failures. Outputs are
// named after their inputs so workers never share a file; errors.json is
// written once all workers have finished, in input order.
int run_batch(const std::vector<fs::path>& inputs, const Config& config, const ImageTask& task) {
  std::vector<std::optional<Failure>> failures(inputs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < inputs.size(); i = next++) {
      try {
        task(inputs[i]);
      } catch (const Error& e) {
        failures[i] = Failure{inputs[i], std::string(to_string(e.kind())), e.what()};
      } catch (const std::exception& e) {
        failures[i] = Failure{inputs[i], "InternalError", e.what()};
      }
    }
  };

  unsigned jobs = config.jobs != 0 ? config.jobs : std::max(1U, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(1, inputs.size())));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  json errors = json::array();
  for (const auto& f : failures) {
    if (!f) continue;
    std::cerr << "rxprep: " << f->input.string() << ": " << f->kind << ": " << f->message << '\n';
    errors.push_back({{"input", f->input.string()}, {"kind", f->kind}, {"message", f->message}});
  }
  const auto errors_path = config.out_dir / "errors.json";
  std::ofstream out(errors_path, std::ios::trunc);
  out << json{{"errors", errors}}.dump(2) << '\n';
  if (!out) {
    std::cerr << "rxprep: cannot write " << errors_path.string() << '\n';
    return kExitPartial;
  }
  return errors.empty() ? kExitOk : kExitPartial;
}

int prepare(const Config& config) {
  try {
    validate(config);
    fs::create_directories(config.out_dir);
  } catch (const std::exception& e) {
    std::cerr << "rxprep: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.flush();
  if (!out) throw Error(ErrorKind::IoFailure, "failed writing " + path.string());
}

}  // namespace

int cmd_enhance(const std::vector<fs::path>& inputs, const Config& config) {
  if (int rc = prepare(config); rc != kExitOk) return rc;
  const auto provider = config.make_provider();
  const auto params = config.mask_params();
  return run_batch(inputs, config, [&](const fs::path& input) {
    const auto image = load_image(input, config.bit_depth);
    enhance_pipeline(image, *provider, params, config.out_dir, config.extension());
  });
}

int cmd_mask(const std::vector<fs::path>& inputs, const Config& config) {
  if (int rc = prepare(config); rc != kExitOk) return rc;
  const auto provider = config.make_provider();
  const auto params = config.mask_params();
  return run_batch(inputs, config, [&](const fs::path& input) {
    const auto image = load_image(input, config.bit_depth);
    const auto mask = extract_roi(image, *provider, params);
    write_image(mask_to_raster(mask), config.out_dir / (output_stem(image) + ".mask" + config.extension()));
  });
}

int cmd_baseline(const std::string& method, const std::vector<fs::path>& inputs, const Config& config) {
  if (method != "he" && method != "clahe" && method != "8bit") {
    std::cerr << "rxprep: unknown baseline method '" << method << "'\n";
    return kExitUsage;
  }
  if (int rc = prepare(config); rc != kExitOk) return rc;
  const auto clahe_params = config.clahe_params();
  return run_batch(inputs, config, [&](const fs::path& input) {
    const auto image = load_image(input, config.bit_depth);
    Radiograph out;
    if (method == "he") {
      out = global_hist_equalize(image);
    } else if (method == "clahe") {
      out = clahe(naive_8bit(image), clahe_params);
    } else {
      out = naive_8bit(image);
    }
    write_image(out, config.out_dir / (output_stem(image) + "." + method + config.extension()));
  });
}

int cmd_hist(const std::vector<fs::path>& inputs, const std::optional<fs::path>& mask_path,
             const Config& config) {
  if (int rc = prepare(config); rc != kExitOk) return rc;
  return run_batch(inputs, config, [&](const fs::path& input) {
    const auto image = load_image(input, config.bit_depth);
    Histogram hist;
    if (mask_path) {
      const auto raster = load_image(*mask_path);
      ForegroundMask mask(raster.width, raster.height);
      for (std::size_t i = 0; i < raster.size(); ++i) mask.bits[i] = raster.pixels[i] != 0 ? 1 : 0;
      hist = compute_histogram(image, mask);
    } else {
      hist = compute_histogram(image);
    }
    write_histogram_csv(hist, config.out_dir / (output_stem(image) + ".hist.csv"));
  });
}

std::vector<AugSpec> parse_aug_specs(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::SchemaError, std::string("malformed augmentation list: ") + e.what());
  }
  if (!doc.is_array()) throw Error(ErrorKind::SchemaError, "augmentation list must be a JSON array");
  std::vector<AugSpec> specs;
  for (const auto& item : doc) {
    if (!item.is_object() || !item.contains("kind") || !item["kind"].is_string()) {
      throw Error(ErrorKind::SchemaError, "each augmentation needs a string \"kind\"");
    }
    const auto kind = item["kind"].get<std::string>();
    auto number = [&](const char* key, double fallback) {
      if (!item.contains(key)) return fallback;
      if (!item[key].is_number()) throw Error(ErrorKind::SchemaError, std::string("\"") + key + "\" must be a number");
      return item[key].get<double>();
    };
    if (kind == "invert") {
      specs.emplace_back(Invert{});
    } else if (kind == "affine") {
      const Affine a{number("gain", 1.0), number("bias", 0.0)};
      if (!(a.gain > 0.0)) throw Error(ErrorKind::SchemaError, "affine gain must be positive");
      specs.emplace_back(a);
    } else if (kind == "requantize") {
      if (!item.contains("bits") || !item["bits"].is_number_integer()) {
        throw Error(ErrorKind::SchemaError, "requantize needs an integer \"bits\"");
      }
      specs.emplace_back(Requantize{item["bits"].get<int>()});
    } else {
      throw Error(ErrorKind::SchemaError, "unknown augmentation kind '" + kind + "'");
    }
  }
  return specs;
}

int cmd_stability(const fs::path& input, const fs::path& specs_file, const Config& config) {
  if (int rc = prepare(config); rc != kExitOk) return rc;
  std::vector<AugSpec> specs;
  try {
    specs = parse_aug_specs(read_text(specs_file));
  } catch (const Error& e) {
    std::cerr << "rxprep: " << specs_file.string() << ": " << e.what() << '\n';
    return kExitUsage;
  }
  const auto provider = config.make_provider();
  const auto params = config.mask_params();
  return run_batch({input}, config, [&](const fs::path& path) {
    const auto image = load_image(path, config.bit_depth);
    ForegroundMask baseline;
    const auto report = stability_report(image, *provider, params, specs, &baseline);
    const auto stem = output_stem(image);
    const auto mask_path = config.out_dir / (stem + ".mask" + config.extension());
    write_image(mask_to_raster(baseline), mask_path);

    json entries = json::array();
    for (const auto& e : report.entries) {
      entries.push_back({{"aug", e.aug}, {"iou", e.iou}, {"empty", e.empty}});
    }
    const json doc = {
        {"baseline_mask_path", mask_path.string()},
        {"entries", entries},
        {"min_iou", report.min_iou ? json(*report.min_iou) : json(nullptr)},
        {"mean_iou", report.mean_iou ? json(*report.mean_iou) : json(nullptr)},
    };
    write_text(config.out_dir / (stem + ".stability.json"), doc.dump(2) + "\n");
  });
}

int cmd_eval(const fs::path& gt, const fs::path& preds, const Config& config,
             const std::optional<fs::path>& report_path, const std::optional<fs::path>& roc_csv_path) {
  if (int rc = prepare(config); rc != kExitOk) return rc;
  try {
    const auto report = evaluate_files(gt, preds, config.eval_config());
    write_text(report_path.value_or(config.out_dir / "eval_report.json"), report_to_json(report) + "\n");
    write_roc_csv(report.roc, roc_csv_path.value_or(config.out_dir / "roc.csv"));
  } catch (const Error& e) {
    std::cerr << "rxprep: eval: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace rxprep::cli
