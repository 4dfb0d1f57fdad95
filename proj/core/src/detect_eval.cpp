#include "rxprep/detect_eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "json.hpp"
#include "rxprep/error.hpp"

namespace rxprep {

using nlohmann::json;

double box_iou(const Box& a, const Box& b) {
  if (!a.valid() || !b.valid()) throw Error(ErrorKind::DegenerateBox, "box must satisfy x0 < x1 and y0 < y1");
  const double iw = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
  const double ih = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  return inter / (a.area() + b.area() - inter);
}

std::vector<Match> match_detections(const GroundTruthImage& gt, const PredictionImage& pred,
                                    double iou_thresh) {
  if (gt.id != pred.id) throw Error(ErrorKind::IdMismatch, "ground truth '" + gt.id + "' vs prediction '" + pred.id + "'");

  std::vector<Match> matches(gt.boxes.size());
  for (std::size_t g = 0; g < gt.boxes.size(); ++g) matches[g].gt_index = g;

  std::vector<std::size_t> order(pred.boxes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pred.boxes[a].score > pred.boxes[b].score;
  });

  for (std::size_t p : order) {
    std::optional<std::size_t> best;
    double best_iou = iou_thresh;
    for (std::size_t g = 0; g < gt.boxes.size(); ++g) {
      if (matches[g].pred_index) continue;
      const double iou = box_iou(gt.boxes[g].box, pred.boxes[p].box);
      if (iou > best_iou) {
        best_iou = iou;
        best = g;
      }
    }
    if (best) {
      matches[*best].pred_index = p;
      matches[*best].iou = best_iou;
    }
  }
  return matches;
}

Interval wald_ci(double p_hat, std::size_t n) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "confidence interval needs n >= 1");
  if (!(p_hat >= 0.0 && p_hat <= 1.0)) throw Error(ErrorKind::InvalidArgument, "proportion outside [0, 1]");
  constexpr double kZ95 = 1.96;
  const double half = kZ95 * std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(n));
  return {std::clamp(p_hat - half, 0.0, 1.0), std::clamp(p_hat + half, 0.0, 1.0)};
}

Accuracy detection_accuracy(std::span<const Match> matches) {
  if (matches.empty()) throw Error(ErrorKind::NoInstances, "no ground-truth boxes to score");
  Accuracy acc;
  acc.total = matches.size();
  acc.matched = static_cast<std::size_t>(
      std::count_if(matches.begin(), matches.end(), [](const Match& m) { return m.pred_index.has_value(); }));
  acc.fraction = static_cast<double>(acc.matched) / static_cast<double>(acc.total);
  acc.ci = wald_ci(acc.fraction, acc.total);
  return acc;
}

double image_score(const PredictionImage& pred) {
  double best = 0.0;
  for (const auto& b : pred.boxes) best = std::max(best, b.score);
  return best;
}

std::vector<RocPoint> roc_curve(std::span<const ScoredSample> samples) {
  const auto positives = static_cast<std::size_t>(
      std::count_if(samples.begin(), samples.end(), [](const ScoredSample& s) { return s.positive; }));
  const std::size_t negatives = samples.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw Error(ErrorKind::OneClassOnly, "ROC needs at least one positive and one negative sample");
  }

  std::vector<ScoredSample> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const ScoredSample& a, const ScoredSample& b) { return a.score > b.score; });

  std::vector<RocPoint> curve;
  curve.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    const double score = sorted[i].score;
    for (; i < sorted.size() && sorted[i].score == score; ++i) {
      (sorted[i].positive ? tp : fp) += 1;
    }
    curve.push_back({static_cast<double>(fp) / static_cast<double>(negatives),
                     static_cast<double>(tp) / static_cast<double>(positives), score});
  }
  return curve;
}

double auc(std::span<const RocPoint> curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    area += (curve[i].fpr - curve[i - 1].fpr) * (curve[i].tpr + curve[i - 1].tpr) / 2.0;
  }
  return area;
}

OperatingPoint sensitivity_at_fpr(std::span<const RocPoint> curve, double target_fpr) {
  OperatingPoint op;
  op.target_fpr = target_fpr;
  op.threshold = std::numeric_limits<double>::infinity();
  for (const auto& p : curve) {
    if (p.fpr <= target_fpr && p.tpr > op.tpr) {
      op.achieved_fpr = p.fpr;
      op.tpr = p.tpr;
      op.threshold = p.threshold;
    }
  }
  return op;
}

EvalReport evaluate(const std::vector<GroundTruthImage>& gt, const std::vector<PredictionImage>& preds,
                    const EvalConfig& config) {
  std::map<std::string, const PredictionImage*> by_id;
  std::set<std::string> gt_ids;
  for (const auto& g : gt) {
    if (!gt_ids.insert(g.id).second) throw Error(ErrorKind::SchemaError, "duplicate ground-truth id '" + g.id + "'");
  }
  for (const auto& p : preds) {
    if (!gt_ids.contains(p.id)) throw Error(ErrorKind::UnknownImageId, "prediction for unknown image '" + p.id + "'");
    if (!by_id.emplace(p.id, &p).second) throw Error(ErrorKind::SchemaError, "duplicate prediction id '" + p.id + "'");
  }

  EvalReport report;
  report.images = gt.size();
  std::vector<Match> all_matches;
  std::vector<ScoredSample> samples;
  samples.reserve(gt.size());
  for (const auto& g : gt) {
    const auto it = by_id.find(g.id);
    const PredictionImage empty{g.id, {}};
    const PredictionImage& p = it == by_id.end() ? empty : *it->second;
    const auto matches = match_detections(g, p, config.iou_thresh);
    all_matches.insert(all_matches.end(), matches.begin(), matches.end());
    const bool positive = g.label == ImageLabel::Abnormal;
    samples.push_back({image_score(p), positive});
    (positive ? report.positives : report.negatives) += 1;
  }

  report.roc = roc_curve(samples);
  report.auc = auc(report.roc);
  report.sensitivity = sensitivity_at_fpr(report.roc, config.target_fpr);
  report.accuracy = detection_accuracy(all_matches);

  std::vector<double> ious;
  for (const auto& m : all_matches) {
    if (m.pred_index) ious.push_back(m.iou);
  }
  report.iou_count = ious.size();
  if (!ious.empty()) {
    const double n = static_cast<double>(ious.size());
    const double mean = std::accumulate(ious.begin(), ious.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : ious) ss += (v - mean) * (v - mean);
    report.iou_mean = mean;
    report.iou_std = std::sqrt(ss / n);
  }
  return report;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

[[noreturn]] void schema_error(const std::string& what) { throw Error(ErrorKind::SchemaError, what); }

json parse_document(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    schema_error(std::string("malformed JSON: ") + e.what());
  }
}

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) schema_error(where + ": missing \"" + key + "\"");
  return obj.at(key);
}

double require_number(const json& obj, const char* key, const std::string& where) {
  const auto& v = require(obj, key, where);
  if (!v.is_number()) schema_error(where + ": \"" + key + "\" must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) schema_error(where + ": \"" + key + "\" must be finite");
  return d;
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
  const auto& v = require(obj, key, where);
  if (!v.is_string()) schema_error(where + ": \"" + key + "\" must be a string");
  return v.get<std::string>();
}

LesionClass parse_class(const json& obj, const std::string& where) {
  const auto name = require_string(obj, "class", where);
  if (name == "benign") return LesionClass::Benign;
  if (name == "malignant") return LesionClass::Malignant;
  schema_error(where + ": unknown class \"" + name + "\"");
}

Box parse_box(const json& obj, const std::string& where) {
  Box box{require_number(obj, "x0", where), require_number(obj, "y0", where),
          require_number(obj, "x1", where), require_number(obj, "y1", where)};
  if (!box.valid()) throw Error(ErrorKind::DegenerateBox, where + ": box must satisfy x0 < x1 and y0 < y1");
  return box;
}

const json& image_array(const json& doc) {
  const auto& images = require(doc, "images", "document");
  if (!images.is_array()) schema_error("\"images\" must be an array");
  return images;
}

const json& box_array(const json& image, const std::string& where) {
  const auto& boxes = require(image, "boxes", where);
  if (!boxes.is_array()) schema_error(where + ": \"boxes\" must be an array");
  return boxes;
}

std::string slurp_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::vector<GroundTruthImage> parse_ground_truth(std::string_view json_text) {
  const auto doc = parse_document(json_text);
  std::vector<GroundTruthImage> out;
  for (const auto& item : image_array(doc)) {
    const std::string where = "image " + std::to_string(out.size());
    GroundTruthImage img;
    img.id = require_string(item, "id", where);
    const auto label = require_string(item, "label", where);
    if (label == "normal") {
      img.label = ImageLabel::Normal;
    } else if (label == "abnormal") {
      img.label = ImageLabel::Abnormal;
    } else {
      schema_error(where + ": unknown label \"" + label + "\"");
    }
    for (const auto& b : box_array(item, where)) {
      img.boxes.push_back({parse_box(b, where), parse_class(b, where)});
    }
    if ((img.label == ImageLabel::Normal) != img.boxes.empty()) {
      schema_error(where + " ('" + img.id + "'): boxes must be present iff label is abnormal");
    }
    out.push_back(std::move(img));
  }
  return out;
}

std::vector<PredictionImage> parse_predictions(std::string_view json_text) {
  const auto doc = parse_document(json_text);
  std::vector<PredictionImage> out;
  for (const auto& item : image_array(doc)) {
    const std::string where = "prediction " + std::to_string(out.size());
    PredictionImage img;
    img.id = require_string(item, "id", where);
    for (const auto& b : box_array(item, where)) {
      const double score = require_number(b, "score", where);
      if (score < 0.0 || score > 1.0) schema_error(where + ": score outside [0, 1]");
      img.boxes.push_back({parse_box(b, where), parse_class(b, where), score});
    }
    out.push_back(std::move(img));
  }
  return out;
}

std::vector<GroundTruthImage> load_ground_truth(const std::filesystem::path& path) {
  return parse_ground_truth(slurp_text(path));
}

std::vector<PredictionImage> load_predictions(const std::filesystem::path& path) {
  return parse_predictions(slurp_text(path));
}

EvalReport evaluate_files(const std::filesystem::path& gt_path, const std::filesystem::path& pred_path,
                          const EvalConfig& config) {
  return evaluate(load_ground_truth(gt_path), load_predictions(pred_path), config);
}

std::string report_to_json(const EvalReport& report, int indent) {
  json roc = json::array();
  for (const auto& p : report.roc) {
    roc.push_back({{"fpr", p.fpr}, {"tpr", p.tpr}, {"threshold", number_or_null(p.threshold)}});
  }
  json doc = {
      {"images", report.images},
      {"positives", report.positives},
      {"negatives", report.negatives},
      {"auc", report.auc},
      {"roc", roc},
      {"sensitivity_at_fpr",
       {{"target_fpr", report.sensitivity.target_fpr},
        {"achieved_fpr", report.sensitivity.achieved_fpr},
        {"tpr", report.sensitivity.tpr},
        {"threshold", number_or_null(report.sensitivity.threshold)}}},
      {"accuracy",
       {{"matched", report.accuracy.matched},
        {"total", report.accuracy.total},
        {"fraction", report.accuracy.fraction},
        {"ci", {report.accuracy.ci.lo, report.accuracy.ci.hi}}}},
      {"iou",
       {{"count", report.iou_count},
        {"mean", report.iou_mean ? json(*report.iou_mean) : json(nullptr)},
        {"std", report.iou_std ? json(*report.iou_std) : json(nullptr)}}},
  };
  return doc.dump(indent);
}

void write_roc_csv(std::span<const RocPoint> curve, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot open " + path.string() + " for writing");
  out.precision(17);
  out << "fpr,tpr,threshold\n";
  for (const auto& p : curve) {
    out << p.fpr << ',' << p.tpr << ',';
    if (std::isfinite(p.threshold)) {
      out << p.threshold;
    } else {
      out << "inf";
    }
    out << '\n';
  }
  out.flush();
  if (!out) throw Error(ErrorKind::IoFailure, "failed writing " + path.string());
}

}  // namespace rxprep
