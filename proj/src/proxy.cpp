#include "chairsynth/proxy.hpp"

#include <algorithm>
#include <cmath>

namespace chairsynth {

double Solid::canonical_radius() const {
  switch (kind) {
    case PrimitiveKind::Cube:
      return std::sqrt(3.0);
    case PrimitiveKind::Sphere:
      return 1.0;
    case PrimitiveKind::Cylinder:
      return std::sqrt(2.0);
    case PrimitiveKind::Capsule:
      return 1.0 + h;
  }
  return 1.0;
}

bool Solid::contains(const Vec3& p) const {
  const Vec3 q = inv * (p - center);
  switch (kind) {
    case PrimitiveKind::Cube:
      return q.cwiseAbs().maxCoeff() <= 1.0;
    case PrimitiveKind::Sphere:
      return q.squaredNorm() <= 1.0;
    case PrimitiveKind::Cylinder:
      return q.x() * q.x() + q.z() * q.z() <= 1.0 && std::abs(q.y()) <= 1.0;
    case PrimitiveKind::Capsule: {
      const double y = std::clamp(q.y(), -h, h);
      return Vec3(q.x(), q.y() - y, q.z()).squaredNorm() <= 1.0;
    }
  }
  return false;
}

Solid make_solid(PrimitiveKind kind, const Mat3& A, const Vec3& center, double h) {
  Solid s;
  s.kind = kind;
  s.A = A;
  s.inv = A.inverse();
  s.center = center;
  s.h = kind == PrimitiveKind::Capsule ? h : 0.0;
  if (!s.inv.allFinite()) {
    throw InvalidArgument("solid has a singular shape matrix");
  }
  return s;
}

void SceneGeometry::add(const Solid& s) {
  solids_.push_back(s);
  finalized_ = false;
}

void SceneGeometry::finalize() {
  boxes_.clear();
  rounds_.clear();
  cylinders_.clear();
  slot_.assign(solids_.size(), 0);
  for (std::size_t i = 0; i < solids_.size(); ++i) {
    const Solid& s = solids_[i];
    double inv[9];
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        inv[3 * r + c] = s.inv(r, c);
      }
    }
    const double center[3] = {s.center.x(), s.center.y(), s.center.z()};
    simd::SolidBatch* batch = &boxes_;
    if (s.kind == PrimitiveKind::Sphere || s.kind == PrimitiveKind::Capsule) {
      batch = &rounds_;
    } else if (s.kind == PrimitiveKind::Cylinder) {
      batch = &cylinders_;
    }
    slot_[i] = batch->count;
    batch->push(inv, center, s.h);
  }
  boxes_.finalize();
  rounds_.finalize();
  cylinders_.finalize();
  finalized_ = true;
}

Placement Placement::from_instance(const HumanInstance& h) {
  Placement p;
  p.linear = euler_zxy_deg(h.rotation_deg).toRotationMatrix() * h.scale.asDiagonal();
  p.position = h.position;
  return p;
}

double bone_radius(const SkeletonDefinition& skeleton, int joint, double bone_length) {
  const std::string& name = skeleton.joints[joint];
  double factor = 0.2;
  if (name == joints::kNeckTop) {
    factor = 0.45;
  } else if (name.ends_with("hand_end")) {
    factor = 0.35;
  } else if (skeleton.parent[joint] >= 0 && skeleton.parent[skeleton.parent[joint]] < 0) {
    factor = 0.25;  // pelvis bones off the root
  }
  return factor * bone_length;
}

SkeletonDefinition scaled_skeleton(const SkeletonDefinition& skeleton, const BodyParams& body) {
  SkeletonDefinition s = skeleton;
  if (body.bone_scale.size() == s.size()) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      s.rest_offsets[j] *= body.bone_scale[j];
    }
  }
  return s;
}

namespace {

bool is_spine_bone(const SkeletonDefinition& skeleton, int joint) {
  const std::string& n = skeleton.joints[joint];
  return n == joints::kLowerSpine || n == joints::kUpperSpine || n == joints::kUpperChest ||
         n == joints::kNeckBase || n == joints::kHeadTop;
}

void add_transformed(SceneGeometry& geom, PrimitiveKind kind, const Mat3& body_A,
                     const Vec3& body_center, double h, const Placement& placement,
                     Solid::Role role, int owner, int ja = -1, int jb = -1) {
  Solid s = make_solid(kind, placement.linear * body_A, placement.apply(body_center), h);
  s.role = role;
  s.owner = owner;
  s.joint_a = ja;
  s.joint_b = jb;
  geom.add(s);
}

}  // namespace

void add_human_solids(SceneGeometry& geom, int owner, const SkeletonDefinition& skeleton,
                      const Pose3D& pose, const std::vector<Quat>& world, const BodyParams& body,
                      const WheelchairDims& chair, const Placement& placement) {
  const bool named = skeleton.index_of(joints::kNeckBase) >= 0 &&
                     skeleton.index_of(joints::kHeadTop) >= 0 &&
                     skeleton.index_of(joints::kNeckTop) >= 0;
  for (std::size_t j = 0; j < skeleton.size(); ++j) {
    const int p = skeleton.parent[j];
    if (p < 0 || (named && is_spine_bone(skeleton, static_cast<int>(j)))) {
      continue;
    }
    const Vec3 a = pose[p];
    const Vec3 b = pose[j];
    const double len = (b - a).norm();
    if (!(len > 1e-9)) {
      continue;
    }
    const double r = bone_radius(skeleton, static_cast<int>(j), len) * body.girth;
    const Mat3 R = Quat::FromTwoVectors(Vec3::UnitY(), (b - a) / len).toRotationMatrix();
    add_transformed(geom, PrimitiveKind::Capsule, r * R, 0.5 * (a + b), 0.5 * len / r, placement,
                    Solid::Role::Body, owner, p, static_cast<int>(j));
  }
  if (named) {
    const int root = skeleton.root();
    const int neck_base = skeleton.require(joints::kNeckBase);
    const int neck_top = skeleton.require(joints::kNeckTop);
    const int head = skeleton.require(joints::kHeadTop);
    const Vec3 bottom = pose[root];
    const Vec3 top = pose[neck_base];
    const Vec3 axis = top - bottom;
    const double len = axis.norm();
    if (len > 1e-9) {
      const Vec3 y = axis / len;
      const int spine = skeleton.index_of(joints::kUpperSpine) >= 0
                            ? skeleton.require(joints::kUpperSpine)
                            : root;
      Vec3 x = world[spine] * Vec3::UnitX();
      x = (x - x.dot(y) * y);
      x = x.norm() > 1e-9 ? Vec3(x.normalized()) : Vec3(y.unitOrthogonal());
      const Vec3 z = x.cross(y);
      Mat3 A;
      A.col(0) = x * (kTorsoHalfWidth * body.stature * body.girth);
      A.col(1) = y * (0.5 * len);
      A.col(2) = z * (kTorsoHalfDepth * body.stature * body.girth);
      add_transformed(geom, PrimitiveKind::Cube, A, 0.5 * (bottom + top), 0.0, placement,
                      Solid::Role::Body, owner);
    }
    const double head_scale = body.bone_scale.size() == skeleton.size() ? body.bone_scale[head] : 1.0;
    const double r = kHeadRadius * head_scale;
    add_transformed(geom, PrimitiveKind::Sphere, r * Mat3::Identity(),
                    0.5 * (pose[neck_top] + pose[head]), 0.0, placement, Solid::Role::Body, owner);
  }
  for (const double side : {1.0, -1.0}) {
    Mat3 A = Mat3::Zero();
    A(1, 0) = chair.wheel_radius;
    A(0, 1) = chair.wheel_half_width;
    A(2, 2) = chair.wheel_radius;
    const Vec3 c(side * chair.wheel_center.x(), chair.wheel_center.y(), chair.wheel_center.z());
    add_transformed(geom, PrimitiveKind::Cylinder, A, c, 0.0, placement, Solid::Role::Chair, owner);
  }
  add_transformed(geom, PrimitiveKind::Cube, chair.seat_half.asDiagonal(), chair.seat_center, 0.0,
                  placement, Solid::Role::Chair, owner);
  add_transformed(geom, PrimitiveKind::Cube, chair.footplate_half.asDiagonal(),
                  chair.footplate_center, 0.0, placement, Solid::Role::Chair, owner);
}

void add_occluder_solid(SceneGeometry& geom, const OccluderInstance& occ) {
  const Mat3 RS = euler_zxy_deg(occ.rotation_deg).toRotationMatrix() * occ.scale.asDiagonal();
  Solid s;
  switch (occ.kind) {
    case PrimitiveKind::Cube:
    case PrimitiveKind::Sphere:
      s = make_solid(occ.kind, 0.5 * RS, occ.position);
      break;
    case PrimitiveKind::Cylinder:
      s = make_solid(occ.kind, RS * Vec3(0.5, 1.0, 0.5).asDiagonal(), occ.position);
      break;
    case PrimitiveKind::Capsule:
      s = make_solid(occ.kind, 0.5 * RS, occ.position, 1.0);
      break;
  }
  s.role = Solid::Role::Occluder;
  geom.add(s);
}

}  // namespace chairsynth
