#pragma once

#include "chairsynth/camera.hpp"
#include "chairsynth/proxy.hpp"

#include <cstdint>
#include <vector>

namespace chairsynth {

constexpr double kOcclusionThreshold = 0.02;

// COCO visibility flags.
enum class Visibility : int { NotVisible = 0, Occluded = 1, Visible = 2 };

// Which solids a keypoint ray ignores: the bone capsules of its own human
// that have the keypoint's source joint as an endpoint.
struct KeypointOwner {
  int human = -1;
  int joint = -1;
};

class OcclusionTester {
 public:
  explicit OcclusionTester(const SceneGeometry& geom);

  // Nearest solid entry along the segment from `from` towards `to`, ignoring
  // the owner's exempt capsules; +inf when nothing lies in [0, limit).
  double nearest_hit(const Vec3& from, const Vec3& to, double limit, const KeypointOwner& owner);
  bool occluded(const Vec3& eye, const Vec3& point, const KeypointOwner& owner,
                double threshold = kOcclusionThreshold);

 private:
  const SceneGeometry& geom_;
  std::vector<std::uint8_t> skip_boxes_;
  std::vector<std::uint8_t> skip_rounds_;
  std::vector<std::uint8_t> skip_cylinders_;

  void set_skip(const KeypointOwner& owner, std::uint8_t value);
};

Visibility classify_visibility(const Vec3& keypoint, const SceneGeometry& geom,
                               const CameraModel& cam, const KeypointOwner& owner = {},
                               double threshold = kOcclusionThreshold);

}  // namespace chairsynth
