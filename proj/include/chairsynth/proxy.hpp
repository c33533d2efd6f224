#pragma once

#include "chairsynth/scene.hpp"
#include "chairsynth/simd/kernels.hpp"

#include <vector>

namespace chairsynth {

// Canonical shapes: cube [-1,1]^3, unit sphere, cylinder x^2+z^2 <= 1 with
// |y| <= 1, and the capsule around the segment (0,-h,0)-(0,h,0) with radius 1.
// A solid is the canonical shape mapped by p = center + A q.
struct Solid {
  enum class Role { Body, Chair, Occluder };

  PrimitiveKind kind = PrimitiveKind::Cube;
  Mat3 A = Mat3::Identity();
  Mat3 inv = Mat3::Identity();
  Vec3 center = Vec3::Zero();
  double h = 0.0;  // capsule half-length in canonical units
  Role role = Role::Occluder;
  int owner = -1;    // human index; -1 for occluders
  int joint_a = -1;  // bone capsules: the two joints the axis runs between
  int joint_b = -1;

  // Canonical radius bound: every canonical point q has |q| <= this.
  double canonical_radius() const;
  bool contains(const Vec3& p) const;
};

Solid make_solid(PrimitiveKind kind, const Mat3& A, const Vec3& center, double h = 0.0);

// All solids of one scene plus SIMD batches grouped by canonical shape.
class SceneGeometry {
 public:
  void add(const Solid& s);
  void finalize();

  const std::vector<Solid>& solids() const { return solids_; }
  const simd::SolidBatch& boxes() const { return boxes_; }
  const simd::SolidBatch& rounds() const { return rounds_; }  // capsules and spheres
  const simd::SolidBatch& cylinders() const { return cylinders_; }
  // Position of solid i inside its batch.
  std::size_t batch_slot(std::size_t i) const { return slot_[i]; }

 private:
  std::vector<Solid> solids_;
  std::vector<std::size_t> slot_;
  simd::SolidBatch boxes_;
  simd::SolidBatch rounds_;
  simd::SolidBatch cylinders_;
  bool finalized_ = false;
};

// Rigid-plus-scale placement of a body: world = position + linear * body.
struct Placement {
  Mat3 linear = Mat3::Identity();
  Vec3 position = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return position + linear * p; }
  static Placement from_instance(const HumanInstance& h);
};

// Proxy radius of the capsule on the bone ending at `joint`, before girth.
double bone_radius(const SkeletonDefinition& skeleton, int joint, double bone_length);

// Torso box half-widths (lateral, depth) before stature and girth scaling.
constexpr double kTorsoHalfWidth = 0.09;
constexpr double kTorsoHalfDepth = 0.07;

// Appends body capsules, torso box, head sphere and wheelchair solids of one
// posed human. `pose`/`world` are in the body frame (root at the origin).
void add_human_solids(SceneGeometry& geom, int owner, const SkeletonDefinition& skeleton,
                      const Pose3D& pose, const std::vector<Quat>& world, const BodyParams& body,
                      const WheelchairDims& chair, const Placement& placement);

void add_occluder_solid(SceneGeometry& geom, const OccluderInstance& occ);

// Skeleton with each rest offset multiplied by the body's bone scale.
SkeletonDefinition scaled_skeleton(const SkeletonDefinition& skeleton, const BodyParams& body);

}  // namespace chairsynth
