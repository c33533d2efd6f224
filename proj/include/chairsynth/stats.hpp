#pragma once

#include "chairsynth/coco.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace chairsynth {

struct Histogram {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> counts;  // raw; values outside [lo, hi] land in the end bins
  std::size_t samples = 0;

  Histogram() = default;
  Histogram(double lo, double hi, std::size_t bins);
  void add(double v);
  std::vector<double> normalized() const;
  double bin_center(std::size_t i) const;
  std::size_t mode_bin() const;
};

constexpr int kHeatmapSize = 256;

// Square grid over the unit square; row 0 is the top (y = 0).
struct Heatmap {
  int size = kHeatmapSize;
  std::vector<double> mass = std::vector<double>(kHeatmapSize * kHeatmapSize, 0.0);
  std::size_t contributions = 0;

  double& at(int row, int col) { return mass[static_cast<std::size_t>(row) * size + col]; }
  double at(int row, int col) const { return mass[static_cast<std::size_t>(row) * size + col]; }
  // Spreads unit mass uniformly over the rectangle [u0,u1] x [v0,v1].
  void add_rect(double u0, double v0, double u1, double v1);
  void add_point(double u, double v);
  double total() const;
  std::pair<int, int> peak() const;  // (row, col), first maximum in row-major order
  std::vector<double> scaled(double divisor) const;
};

double relative_size(const std::array<double, 4>& bbox, int image_width, int image_height);

struct BBoxStats {
  // Fraction of images with k person boxes, k >= 1, indexed by k.
  std::vector<double> count_histogram;
  std::vector<double> relative_sizes;  // one per box
  Histogram size_histogram{0.0, 1.0, 20};
  Heatmap heatmap;  // bbox interiors, image-normalized
  std::size_t images_with_people = 0;
  std::size_t boxes = 0;
};

struct KeypointStats {
  std::size_t instances = 0;
  // P(v = 0, 1, 2 | keypoint).
  std::array<std::array<double, 3>, kCocoKeypointCount> visibility{};
  // Labeled keypoint locations relative to the bbox top-left, in bbox units.
  std::array<Heatmap, kCocoKeypointCount> heatmaps;
};

struct CameraPairSample {
  double elevation = 0.0;  // radians, positive when the camera is above the nose
  double azimuth = 0.0;    // radians, signed angle from the facing direction
  double distance = 0.0;   // meters
};

struct CameraStats {
  bool available = false;
  Histogram elevation{-kPi / 2, kPi / 2, 36};
  Histogram azimuth{-kPi, kPi, 72};
  Histogram distance{0.0, 50.0, 50};
  std::vector<CameraPairSample> coverage;  // every 100th instance
  std::size_t pairs = 0;
};

constexpr std::size_t kCoverageStride = 100;

struct DatasetStats {
  std::string name;
  std::size_t images = 0;
  std::size_t annotations = 0;
  BBoxStats bbox;
  std::optional<KeypointStats> keypoints;
  CameraStats camera;
};

BBoxStats bbox_stats(const CocoDataset& ds);
KeypointStats keypoint_stats(const CocoDataset& ds);
CameraPairSample camera_pair(const Vec3& camera, const Vec3& nose, const Vec3& heading);
CameraStats camera_stats(const std::vector<SidecarRecord>& records);

// `path` is a dataset directory (annotations.json and optional scenes.jsonl)
// or an annotation file.
DatasetStats analyze_dataset(const std::filesystem::path& path);

nlohmann::json stats_to_json(const DatasetStats& s);
// Aligned text table; a second column set when `other` is given.
std::string stats_table(const DatasetStats& s, const DatasetStats* other = nullptr);
// stats.json plus one CSV grid per heatmap.
void write_stats_report(const DatasetStats& s, const std::filesystem::path& out_dir);

}  // namespace chairsynth
