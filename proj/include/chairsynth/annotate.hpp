#pragma once

#include "chairsynth/camera.hpp"
#include "chairsynth/motion.hpp"
#include "chairsynth/proxy.hpp"
#include "chairsynth/visibility.hpp"

#include <array>
#include <optional>
#include <vector>

namespace chairsynth {

// Processed, seated animation clips indexed like the scene's animation pool.
struct MotionLibrary {
  std::vector<RotationSequence> clips;

  AnimationPool pool() const;
};

struct AnnotatedKeypoint {
  double x = 0.0;
  double y = 0.0;
  Visibility v = Visibility::NotVisible;
};

struct AnnotatedInstance {
  int human = 0;  // index into the scene's humans
  std::string motion_id;
  std::size_t pose_frame = 0;
  std::array<AnnotatedKeypoint, kCocoKeypointCount> keypoints;
  std::array<double, 4> bbox{};  // x, y, w, h in pixels
  double occluded_fraction = 0.0;
  int num_keypoints = 0;  // keypoints with v > 0
  Vec3 nose_world = Vec3::Zero();
  Vec3 heading = Vec3::UnitZ();  // horizontal facing direction, world frame
};

struct AnnotatedFrame {
  std::uint64_t frame_id = 0;
  CameraModel camera;
  std::vector<AnnotatedInstance> instances;
};

struct AnnotateOptions {
  double occlusion_threshold = kOcclusionThreshold;
  // Silhouette points per sphere (a capsule uses two).
  int circle_samples = 32;
};

// Everything needed to label or draw one scene.
struct PosedScene {
  SceneGeometry geometry;
  std::vector<Coco17> keypoints;          // world space, per human
  std::vector<std::array<int, kCocoKeypointCount>> keypoint_joints;  // source joint per keypoint
};

PosedScene pose_scene(const SceneSample& scene, const MotionLibrary& library,
                      const SkeletonDefinition& skeleton, const ResolvedSchema& schema);

// Tight pixel box over sampled silhouette points of the given solids, as
// seen from the camera. Empty when no sample lies in front of the camera.
std::optional<std::array<double, 4>> silhouette_bbox(const std::vector<const Solid*>& solids,
                                                     const CameraModel& cam, int circle_samples = 32);

AnnotatedFrame annotate_scene(const SceneSample& scene, const MotionLibrary& library,
                              const SkeletonDefinition& skeleton, const ResolvedSchema& schema,
                              const AnnotateOptions& options = {});

}  // namespace chairsynth
