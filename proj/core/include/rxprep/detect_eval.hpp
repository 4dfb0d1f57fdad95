#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rxprep {

struct Box {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  double area() const noexcept { return (x1 - x0) * (y1 - y0); }
  bool valid() const noexcept { return x0 < x1 && y0 < y1; }
};

enum class LesionClass { Benign, Malignant };
enum class ImageLabel { Normal, Abnormal };

struct GroundTruthBox {
  Box box;
  LesionClass cls = LesionClass::Benign;
};

struct GroundTruthImage {
  std::string id;
  ImageLabel label = ImageLabel::Normal;
  std::vector<GroundTruthBox> boxes;  // empty iff label is Normal
};

struct PredictedBox {
  Box box;
  LesionClass cls = LesionClass::Benign;
  double score = 0.0;
};

struct PredictionImage {
  std::string id;
  std::vector<PredictedBox> boxes;
};

/// Intersection over union. Throws DegenerateBox.
double box_iou(const Box& a, const Box& b);

struct Match {
  std::size_t gt_index = 0;
  std::optional<std::size_t> pred_index;
  double iou = 0.0;  // 0 when unmatched
};

/// Class-agnostic greedy matching. Predictions are visited by descending
/// score (stable for ties); each claims the unclaimed ground-truth box of
/// highest IoU if that IoU is strictly above `iou_thresh`. One entry per
/// ground-truth box, in ground-truth order. Throws IdMismatch.
std::vector<Match> match_detections(const GroundTruthImage& gt, const PredictionImage& pred,
                                    double iou_thresh = 0.5);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Normal-approximation binomial interval p +/- 1.96 sqrt(p(1-p)/n), clipped
/// to [0, 1].
Interval wald_ci(double p_hat, std::size_t n);

struct Accuracy {
  std::size_t matched = 0;
  std::size_t total = 0;
  double fraction = 0.0;
  Interval ci;
};

/// Fraction of ground-truth boxes that were matched. Throws NoInstances.
Accuracy detection_accuracy(std::span<const Match> matches);

/// Image-level abnormality score: highest box score, 0 without boxes.
double image_score(const PredictionImage& pred);

struct ScoredSample {
  double score = 0.0;
  bool positive = false;
};

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  /// Samples scoring >= threshold are called positive; +inf for (0, 0).
  double threshold = 0.0;
};

/// One point per distinct score, descending, preceded by (0, 0).
/// Throws OneClassOnly.
std::vector<RocPoint> roc_curve(std::span<const ScoredSample> samples);

/// Trapezoidal area under the curve.
double auc(std::span<const RocPoint> curve);

struct OperatingPoint {
  double target_fpr = 0.0;
  double achieved_fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;
};

/// Highest-TPR curve point with FPR <= target, without interpolation.
OperatingPoint sensitivity_at_fpr(std::span<const RocPoint> curve, double target_fpr = 0.015);

struct EvalConfig {
  double iou_thresh = 0.5;
  double target_fpr = 0.015;
};

struct EvalReport {
  std::size_t images = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  double auc = 0.0;
  std::vector<RocPoint> roc;
  OperatingPoint sensitivity;
  Accuracy accuracy;
  std::size_t iou_count = 0;
  std::optional<double> iou_mean;
  std::optional<double> iou_std;  // population standard deviation
};

/// Ground-truth images absent from `preds` count as having no detections.
/// Throws UnknownImageId, SchemaError (duplicate ids) and any error from the
/// metric functions.
EvalReport evaluate(const std::vector<GroundTruthImage>& gt, const std::vector<PredictionImage>& preds,
                    const EvalConfig& config = {});

// JSON interchange. Parsers throw SchemaError on malformed input.
std::vector<GroundTruthImage> parse_ground_truth(std::string_view json_text);
std::vector<PredictionImage> parse_predictions(std::string_view json_text);
std::vector<GroundTruthImage> load_ground_truth(const std::filesystem::path& path);
std::vector<PredictionImage> load_predictions(const std::filesystem::path& path);

EvalReport evaluate_files(const std::filesystem::path& gt_path, const std::filesystem::path& pred_path,
                          const EvalConfig& config = {});

std::string report_to_json(const EvalReport& report, int indent = 2);
/// CSV "fpr,tpr,threshold"; the first point's threshold is written as inf.
void write_roc_csv(std::span<const RocPoint> curve, const std::filesystem::path& path);

}  // namespace rxprep
