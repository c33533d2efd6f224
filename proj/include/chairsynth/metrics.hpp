#pragma once

#include "chairsynth/coco.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace chairsynth {

using Box = std::array<double, 4>;  // x, y, w, h

struct Detection {
  std::uint64_t id = 0;  // input position + 1 unless given
  std::uint64_t image_id = 0;
  int category_id = kPersonCategory;
  double score = 0.0;
  std::optional<Box> bbox;
  std::vector<double> keypoints;  // 51 values when present
};

// Reads a results file: a JSON array of {image_id, category_id, bbox and/or
// keypoints, score}.
std::vector<Detection> parse_detections(const nlohmann::json& j);
std::vector<Detection> read_detections(const std::filesystem::path& file);

double iou(const Box& a, const Box& b);

// Standard COCO per-keypoint sigmas; the tolerance constant is twice the sigma.
const std::array<double, kCocoKeypointCount>& coco_keypoint_sigmas();
double keypoint_kappa(std::size_t k);

// Similarity of a keypoint prediction to a labeled instance. Empty when the
// ground truth has no labeled keypoint.
std::optional<double> oks(const std::vector<double>& gt_keypoints, double gt_area,
                          const std::vector<double>& pred_keypoints);
// Single keypoint term exp(-d^2 / (2 s^2 kappa^2)).
double oks_term(double dx, double dy, double area, double kappa);

enum class IouType { BBox, Keypoints };

constexpr int kThresholdCount = 10;
constexpr int kRecallPoints = 101;
double iou_threshold(int t);  // 0.50, 0.55, ..., 0.95
double recall_threshold(int r);  // 0.00, 0.01, ..., 1.00

struct AreaRange {
  std::string name;
  double lo;
  double hi;
};
const std::vector<AreaRange>& area_ranges(IouType type);

struct AreaResult {
  std::string name;
  bool defined = false;  // false when no ground truth falls in the range
  // precision[t][r]; -1 where undefined.
  std::vector<std::array<double, kRecallPoints>> precision;
  std::array<double, kThresholdCount> recall{};
};

// One (detection, ground truth) correspondence from the greedy matcher.
struct MatchedPair {
  std::size_t det = 0;  // index into the detection list
  std::size_t gt = 0;   // index into the dataset annotations
};

struct ApResult {
  std::vector<AreaResult> areas;  // in area_ranges() order; "all" first
  // Pairs matched at threshold index 0 (0.50) over the "all" range.
  std::vector<MatchedPair> matches_at_50;

  // AP over recall points at one threshold index; empty when undefined.
  std::optional<double> ap(int threshold, const std::string& area = "all") const;
  // Mean over all thresholds and recall points.
  std::optional<double> map(const std::string& area = "all") const;
};

struct ApOptions {
  int max_detections = -1;  // -1 picks 100 for boxes and 20 for keypoints
};

ApResult coco_ap(const std::vector<Detection>& preds, const CocoDataset& gts, IouType type,
                 const ApOptions& options = {});

struct PerKeypoint {
  std::array<double, kCocoKeypointCount> pdj{};
  std::array<double, kCocoKeypointCount> pjpe{};
  std::array<double, kCocoKeypointCount> oks50{};
  std::array<double, kCocoKeypointCount> oks75{};
  std::array<std::size_t, kCocoKeypointCount> labeled{};
  std::size_t pairs = 0;
};

// Per-keypoint metrics over matched pairs; throws when `pairs` is empty.
// Keypoints that are never labeled report 0 with labeled = 0.
std::array<double, kCocoKeypointCount> pdj(const std::vector<Detection>& preds,
                                           const CocoDataset& gts,
                                           const std::vector<MatchedPair>& pairs,
                                           double fraction = 0.05);
std::array<double, kCocoKeypointCount> pjpe(const std::vector<Detection>& preds,
                                            const CocoDataset& gts,
                                            const std::vector<MatchedPair>& pairs);
std::array<double, kCocoKeypointCount> per_keypoint_oks_precision(
    const std::vector<Detection>& preds, const CocoDataset& gts,
    const std::vector<MatchedPair>& pairs, double threshold);
PerKeypoint per_keypoint_metrics(const std::vector<Detection>& preds, const CocoDataset& gts,
                                 const std::vector<MatchedPair>& pairs);

struct MetricReport {
  struct Bb {
    std::optional<double> map, ap50, ap75, small, medium, large;
  };
  struct Kp {
    std::optional<double> map, ap50, ap75, medium, large;
  };
  Bb bb;
  std::optional<Kp> kp;
  std::optional<PerKeypoint> per_keypoint;
};

// Every image id referenced by a prediction must exist in the ground truth;
// returns the offending ids.
std::vector<std::uint64_t> unknown_image_ids(const std::vector<Detection>& preds,
                                             const CocoDataset& gts);

MetricReport evaluate(const std::vector<Detection>& preds, const CocoDataset& gts);
nlohmann::json report_to_json(const MetricReport& r);
std::string report_table(const MetricReport& r);

// Mean and maximum absolute deviation of every numeric field across runs.
nlohmann::json aggregate_reports(const std::vector<nlohmann::json>& runs);

}  // namespace chairsynth
