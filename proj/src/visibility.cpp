#include "chairsynth/visibility.hpp"

#include <algorithm>
#include <limits>

namespace chairsynth {

OcclusionTester::OcclusionTester(const SceneGeometry& geom)
    : geom_(geom),
      skip_boxes_(geom.boxes().padded(), 0),
      skip_rounds_(geom.rounds().padded(), 0),
      skip_cylinders_(geom.cylinders().padded(), 0) {}

void OcclusionTester::set_skip(const KeypointOwner& owner, std::uint8_t value) {
  if (owner.human < 0 || owner.joint < 0) {
    return;
  }
  const auto& solids = geom_.solids();
  for (std::size_t i = 0; i < solids.size(); ++i) {
    const Solid& s = solids[i];
    if (s.owner == owner.human && s.kind == PrimitiveKind::Capsule &&
        (s.joint_a == owner.joint || s.joint_b == owner.joint)) {
      skip_rounds_[geom_.batch_slot(i)] = value;
    }
  }
}

double OcclusionTester::nearest_hit(const Vec3& from, const Vec3& to, double limit,
                                    const KeypointOwner& owner) {
  const Vec3 delta = to - from;
  const double len = delta.norm();
  if (!(len > 0.0) || !(limit > 0.0)) {
    return std::numeric_limits<double>::infinity();
  }
  const Vec3 d = delta / len;
  set_skip(owner, 1);
  const auto& k = simd::kernels();
  simd::RayQuery q{{from.x(), from.y(), from.z()}, {d.x(), d.y(), d.z()}, limit, nullptr};
  q.skip = skip_boxes_.data();
  double best = k.nearest_box(geom_.boxes(), q);
  q.skip = skip_rounds_.data();
  best = std::min(best, k.nearest_capsule(geom_.rounds(), q));
  q.skip = skip_cylinders_.data();
  best = std::min(best, k.nearest_cylinder(geom_.cylinders(), q));
  set_skip(owner, 0);
  return best;
}

bool OcclusionTester::occluded(const Vec3& eye, const Vec3& point, const KeypointOwner& owner,
                               double threshold) {
  const double dist = (point - eye).norm();
  const double limit = dist - threshold;
  return nearest_hit(eye, point, limit, owner) < limit;
}

Visibility classify_visibility(const Vec3& keypoint, const SceneGeometry& geom,
                               const CameraModel& cam, const KeypointOwner& owner,
                               double threshold) {
  if (!cam.project(keypoint)) {
    return Visibility::NotVisible;
  }
  OcclusionTester tester(geom);
  return tester.occluded(cam.position, keypoint, owner, threshold) ? Visibility::Occluded
                                                                    : Visibility::Visible;
}

}  // namespace chairsynth
