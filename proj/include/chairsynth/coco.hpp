#pragma once

#include "chairsynth/annotate.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace chairsynth {

inline constexpr const char* kAnnotationFile = "annotations.json";
inline constexpr const char* kSidecarFile = "scenes.jsonl";
constexpr int kPersonCategory = 1;

struct CocoImage {
  std::uint64_t id = 0;
  std::string file_name;
  int width = kImageWidth;
  int height = kImageHeight;
};

struct CocoAnnotation {
  std::uint64_t id = 0;
  std::uint64_t image_id = 0;
  int category_id = kPersonCategory;
  std::vector<double> keypoints;  // x1, y1, v1, ..., 51 values; empty for box-only
  int num_keypoints = 0;
  std::array<double, 4> bbox{};
  double area = 0.0;
  int iscrowd = 0;
  std::optional<double> occluded_fraction;
  std::string motion_id;
};

struct CocoDataset {
  std::vector<CocoImage> images;
  std::vector<CocoAnnotation> annotations;
};

// Camera and per-instance 3D records written next to the annotation file.
struct SidecarInstance {
  std::uint64_t annotation_id = 0;
  Vec3 nose = Vec3::Zero();
  Vec3 heading = Vec3::UnitZ();
};

struct SidecarRecord {
  std::uint64_t image_id = 0;
  std::uint64_t frame_index = 0;
  Vec3 camera_position = Vec3::Zero();
  Vec3 camera_rotation_deg = Vec3::Zero();
  double fov_deg = 0.0;
  std::vector<SidecarInstance> instances;
};

// Frames must be sorted by frame id. Image ids are 1..N in that order and
// annotation ids 1..M in (image, instance) order.
CocoDataset build_coco_dataset(const std::vector<AnnotatedFrame>& frames,
                               std::vector<SidecarRecord>* sidecar = nullptr);

nlohmann::json coco_to_json(const CocoDataset& ds);
CocoDataset coco_from_json(const nlohmann::json& j);
CocoDataset read_coco_dataset(const std::filesystem::path& file);

// Checks the structural rules of a keypoint dataset: unique image and
// annotation ids, dense 1..N numbering, 51-value keypoint arrays, v in
// {0,1,2}, num_keypoints consistent, positive bbox area, known image ids.
// Returns the first problem found, or an empty string.
std::string validate_coco_dataset(const CocoDataset& ds, bool require_dense = true);

nlohmann::json sidecar_to_json(const SidecarRecord& r);
SidecarRecord sidecar_from_json(const nlohmann::json& j);

// Writes annotations.json and, when `scenes` is given, scenes.jsonl with the
// full sampled scene of every frame. Returns the dataset written.
CocoDataset write_coco_dataset(const std::vector<AnnotatedFrame>& frames,
                               const std::filesystem::path& out_dir,
                               const std::vector<SceneSample>* scenes = nullptr);

std::vector<SidecarRecord> read_sidecar(const std::filesystem::path& file);

}  // namespace chairsynth
