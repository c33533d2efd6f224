#pragma once

#include "chairsynth/common.hpp"

#include "json.hpp"

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace chairsynth {

// World-space joint positions in meters, one entry per skeleton joint.
using Pose3D = std::vector<Vec3>;

constexpr std::size_t kDefaultJointCount = 23;
constexpr std::size_t kCocoKeypointCount = 17;

// Joint hierarchy with rest-pose offsets. Rest pose: T-pose, Y up, facing +Z,
// character's left on +X. Every joint's rest frame is aligned with world.
struct SkeletonDefinition {
  std::vector<std::string> joints;
  std::vector<int> parent;  // -1 for the root
  std::vector<Vec3> rest_offsets;
  std::vector<Vec3> twist_axis;

  std::size_t size() const { return joints.size(); }
  int index_of(std::string_view name) const;  // -1 when absent
  int require(std::string_view name) const;   // throws NotFound
  int root() const;
  std::vector<std::vector<int>> children() const;
  // Parents always precede children.
  std::vector<int> topological_order() const;
  Pose3D rest_positions() const;
  double bone_length(int joint) const { return rest_offsets[joint].norm(); }
  // Fills twist_axis from the offsets: along the first child, or along the
  // joint's own offset for leaves.
  void compute_twist_axes();
};

enum class SkeletonError { None, WrongJointCount, NoRoot, MultipleRoots, UnknownParent, Cycle, ZeroLengthBone, DuplicateName };

struct ValidationResult {
  SkeletonError error = SkeletonError::None;
  std::string message;
  bool ok() const { return error == SkeletonError::None; }
  explicit operator bool() const { return ok(); }
};

ValidationResult validate_skeleton(const SkeletonDefinition& def,
                                   std::size_t expected_joints = kDefaultJointCount);

SkeletonDefinition default_skeleton();

// Joint names of the default skeleton that are used elsewhere by name.
namespace joints {
inline constexpr std::string_view kMidHip = "mid_hip";
inline constexpr std::string_view kLowerSpine = "lower_spine";
inline constexpr std::string_view kUpperSpine = "upper_spine";
inline constexpr std::string_view kUpperChest = "upper_chest";
inline constexpr std::string_view kNeckBase = "neck_base";
inline constexpr std::string_view kNeckTop = "neck_top";
inline constexpr std::string_view kHeadTop = "head_top";
}  // namespace joints

// How one COCO keypoint is derived from skeleton joints.
struct KeypointRule {
  enum class Kind { Joint, Midpoint };
  Kind kind = Kind::Joint;
  std::string joint_a;
  std::string joint_b;  // Midpoint only
  // Offset in meters, expressed in the frame of the bone that ends at
  // joint_a (the root uses its own frame).
  Vec3 offset = Vec3::Zero();
};

struct KeypointSchema {
  std::array<KeypointRule, kCocoKeypointCount> rules;
};

const std::array<std::string_view, kCocoKeypointCount>& coco_keypoint_names();
// 1-based limb pairs of the standard COCO person skeleton.
const std::vector<std::array<int, 2>>& coco_skeleton_links();

// Head proxy used by the default schema and the proxy builder.
constexpr double kHeadRadius = 0.10;

KeypointSchema default_schema();
// Default schema with each hip keypoint raised `lift` meters up the torso.
KeypointSchema raised_hip_schema(double lift = 0.09);

// Schema with joint names replaced by indices.
struct ResolvedSchema {
  struct Rule {
    KeypointRule::Kind kind;
    int a;
    int b;
    Vec3 offset;
  };
  std::array<Rule, kCocoKeypointCount> rules;
};

ResolvedSchema resolve_schema(const KeypointSchema& schema, const SkeletonDefinition& skeleton);

// World rotation of every joint recovered from positions alone (twist about
// single-child bones inherited from the parent).
std::vector<Quat> world_rotations_from_positions(const Pose3D& pose,
                                                 const SkeletonDefinition& skeleton);

using Coco17 = std::array<Vec3, kCocoKeypointCount>;

Coco17 map_pose_to_coco17(const Pose3D& pose, const SkeletonDefinition& skeleton,
                          const KeypointSchema& schema);
// Same mapping when world rotations are already known (e.g. from FK).
// `offset_scale`, when given, multiplies each rule's offset by the entry of
// its source joint (bodies with rescaled bones).
Coco17 map_pose_to_coco17(const Pose3D& pose, const std::vector<Quat>& world_rotations,
                          const SkeletonDefinition& skeleton, const ResolvedSchema& schema,
                          const std::vector<double>* offset_scale = nullptr);

nlohmann::json skeleton_to_json(const SkeletonDefinition& def);
SkeletonDefinition skeleton_from_json(const nlohmann::json& j);
nlohmann::json schema_to_json(const KeypointSchema& schema);
KeypointSchema schema_from_json(const nlohmann::json& j);

}  // namespace chairsynth
