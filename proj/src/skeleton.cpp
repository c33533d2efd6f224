#include "chairsynth/skeleton.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <set>

namespace chairsynth {

int SkeletonDefinition::index_of(std::string_view name) const {
  const auto it = std::find(joints.begin(), joints.end(), name);
  return it == joints.end() ? -1 : static_cast<int>(it - joints.begin());
}

int SkeletonDefinition::require(std::string_view name) const {
  const int idx = index_of(name);
  if (idx < 0) {
    throw NotFound("unknown joint '" + std::string(name) + "'");
  }
  return idx;
}

int SkeletonDefinition::root() const {
  for (std::size_t i = 0; i < parent.size(); ++i) {
    if (parent[i] < 0) {
      return static_cast<int>(i);
    }
  }
  throw InvalidArgument("skeleton has no root");
}

std::vector<std::vector<int>> SkeletonDefinition::children() const {
  std::vector<std::vector<int>> out(size());
  for (std::size_t i = 0; i < size(); ++i) {
    if (parent[i] >= 0) {
      out[parent[i]].push_back(static_cast<int>(i));
    }
  }
  return out;
}

std::vector<int> SkeletonDefinition::topological_order() const {
  const auto kids = children();
  std::vector<int> order;
  order.reserve(size());
  order.push_back(root());
  for (std::size_t head = 0; head < order.size(); ++head) {
    for (const int c : kids[order[head]]) {
      order.push_back(c);
    }
  }
  return order;
}

Pose3D SkeletonDefinition::rest_positions() const {
  Pose3D pos(size(), Vec3::Zero());
  for (const int j : topological_order()) {
    pos[j] = parent[j] < 0 ? Vec3::Zero() : Vec3(pos[parent[j]] + rest_offsets[j]);
  }
  return pos;
}

void SkeletonDefinition::compute_twist_axes() {
  const auto kids = children();
  twist_axis.assign(size(), Vec3::UnitY());
  for (std::size_t j = 0; j < size(); ++j) {
    Vec3 axis = kids[j].empty() ? rest_offsets[j] : rest_offsets[kids[j].front()];
    if (axis.norm() > 0.0) {
      twist_axis[j] = axis.normalized();
    }
  }
}

ValidationResult validate_skeleton(const SkeletonDefinition& def, std::size_t expected_joints) {
  auto fail = [](SkeletonError e, std::string msg) { return ValidationResult{e, std::move(msg)}; };
  const std::size_t n = def.joints.size();
  if (n != expected_joints) {
    return fail(SkeletonError::WrongJointCount,
                "expected " + std::to_string(expected_joints) + " joints, got " + std::to_string(n));
  }
  if (def.parent.size() != n || def.rest_offsets.size() != n) {
    return fail(SkeletonError::WrongJointCount, "parent/offset arrays do not match joint count");
  }
  std::set<std::string> names(def.joints.begin(), def.joints.end());
  if (names.size() != n) {
    return fail(SkeletonError::DuplicateName, "duplicate joint names");
  }
  int roots = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (def.parent[i] < 0) {
      ++roots;
    } else if (def.parent[i] >= static_cast<int>(n)) {
      return fail(SkeletonError::UnknownParent, "joint '" + def.joints[i] + "' has an unknown parent");
    }
  }
  if (roots > 1) {
    return fail(SkeletonError::MultipleRoots, std::to_string(roots) + " root joints");
  }
  // Walking up from any joint must reach the root within n steps.
  for (std::size_t i = 0; i < n; ++i) {
    int cur = static_cast<int>(i);
    std::size_t steps = 0;
    while (cur >= 0 && steps <= n) {
      cur = def.parent[cur];
      ++steps;
    }
    if (cur >= 0) {
      return fail(SkeletonError::Cycle, "cycle in parent map through joint '" + def.joints[i] + "'");
    }
  }
  if (roots == 0) {
    return fail(SkeletonError::NoRoot, "no root joint");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (def.parent[i] >= 0 && !(def.rest_offsets[i].norm() > 0.0)) {
      return fail(SkeletonError::ZeroLengthBone, "zero-length bone ending at '" + def.joints[i] + "'");
    }
    if (!def.rest_offsets[i].allFinite()) {
      return fail(SkeletonError::ZeroLengthBone, "non-finite offset at '" + def.joints[i] + "'");
    }
  }
  return {};
}

SkeletonDefinition default_skeleton() {
  SkeletonDefinition s;
  auto add = [&s](std::string name, std::string_view parent, Vec3 offset) {
    s.joints.push_back(std::move(name));
    s.parent.push_back(parent.empty() ? -1 : s.index_of(parent));
    s.rest_offsets.push_back(offset);
  };
  add("mid_hip", "", Vec3::Zero());
  add("lower_spine", "mid_hip", {0, 0.10, 0});
  add("upper_spine", "lower_spine", {0, 0.12, 0});
  add("upper_chest", "upper_spine", {0, 0.12, 0});
  add("neck_base", "upper_chest", {0, 0.10, 0});
  add("neck_top", "neck_base", {0, 0.10, 0});
  add("head_top", "neck_top", {0, 0.18, 0});
  for (const double side : {1.0, -1.0}) {
    const std::string p = side > 0 ? "left_" : "right_";
    add(p + "shoulder", "upper_chest", {side * 0.18, 0.08, 0});
    add(p + "elbow", p + "shoulder", {side * 0.28, 0, 0});
    add(p + "wrist", p + "elbow", {side * 0.25, 0, 0});
    add(p + "hand_end", p + "wrist", {side * 0.08, 0, 0});
  }
  for (const double side : {1.0, -1.0}) {
    const std::string p = side > 0 ? "left_" : "right_";
    add(p + "hip", "mid_hip", {side * 0.10, -0.05, 0});
    add(p + "knee", p + "hip", {0, -0.42, 0});
    add(p + "ankle", p + "knee", {0, -0.40, 0});
    add(p + "toe", p + "ankle", {0, -0.05, 0.14});
  }
  s.compute_twist_axes();
  return s;
}

const std::array<std::string_view, kCocoKeypointCount>& coco_keypoint_names() {
  static const std::array<std::string_view, kCocoKeypointCount> names = {
      "nose",          "left_eye",       "right_eye",  "left_ear",    "right_ear",
      "left_shoulder", "right_shoulder", "left_elbow", "right_elbow", "left_wrist",
      "right_wrist",   "left_hip",       "right_hip",  "left_knee",   "right_knee",
      "left_ankle",    "right_ankle"};
  return names;
}

const std::vector<std::array<int, 2>>& coco_skeleton_links() {
  static const std::vector<std::array<int, 2>> links = {
      {16, 14}, {14, 12}, {17, 15}, {15, 13}, {12, 13}, {6, 12}, {7, 13},
      {6, 7},   {6, 8},   {7, 9},   {8, 10},  {9, 11},  {2, 3},  {1, 2},
      {1, 3},   {2, 4},   {3, 5},   {4, 6},   {5, 7}};
  return links;
}

namespace {

// Point on the head sphere, relative to head_top, in the head frame.
Vec3 head_surface(double x, double y, double z) {
  const Vec3 center_from_top(0.0, -0.09, 0.0);
  return center_from_top + kHeadRadius * Vec3(x, y, z).normalized();
}

KeypointRule joint_rule(std::string joint, Vec3 offset = Vec3::Zero()) {
  KeypointRule r;
  r.kind = KeypointRule::Kind::Joint;
  r.joint_a = std::move(joint);
  r.offset = offset;
  return r;
}

}  // namespace

KeypointSchema default_schema() {
  KeypointSchema s;
  const std::string head(joints::kHeadTop);
  s.rules[0] = joint_rule(head, head_surface(0, 0, 1));
  s.rules[1] = joint_rule(head, head_surface(0.35, 0.30, 0.89));
  s.rules[2] = joint_rule(head, head_surface(-0.35, 0.30, 0.89));
  s.rules[3] = joint_rule(head, head_surface(0.94, 0.10, 0.33));
  s.rules[4] = joint_rule(head, head_surface(-0.94, 0.10, 0.33));
  const char* body[] = {"shoulder", "elbow", "wrist", "hip", "knee", "ankle"};
  for (int i = 0; i < 6; ++i) {
    s.rules[5 + 2 * i] = joint_rule(std::string("left_") + body[i]);
    s.rules[6 + 2 * i] = joint_rule(std::string("right_") + body[i]);
  }
  return s;
}

KeypointSchema raised_hip_schema(double lift) {
  KeypointSchema s = default_schema();
  s.rules[11].offset = Vec3(0, lift, 0);
  s.rules[12].offset = Vec3(0, lift, 0);
  return s;
}

ResolvedSchema resolve_schema(const KeypointSchema& schema, const SkeletonDefinition& skeleton) {
  ResolvedSchema out;
  for (std::size_t k = 0; k < kCocoKeypointCount; ++k) {
    const auto& rule = schema.rules[k];
    if (!rule.offset.allFinite()) {
      throw InvalidArgument("non-finite offset for keypoint " + std::string(coco_keypoint_names()[k]));
    }
    ResolvedSchema::Rule r{rule.kind, skeleton.require(rule.joint_a), -1, rule.offset};
    if (rule.kind == KeypointRule::Kind::Midpoint) {
      r.b = skeleton.require(rule.joint_b);
    }
    out.rules[k] = r;
  }
  return out;
}

namespace {

// Rotation best aligning unit vectors `from` onto `to` (Kabsch).
Mat3 kabsch(const std::vector<Vec3>& from, const std::vector<Vec3>& to) {
  Mat3 h = Mat3::Zero();
  for (std::size_t i = 0; i < from.size(); ++i) {
    h += to[i] * from[i].transpose();
  }
  Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0 ? -1.0 : 1.0;
  return svd.matrixU() * d * svd.matrixV().transpose();
}

bool spans_plane(const std::vector<Vec3>& dirs) {
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    for (std::size_t k = i + 1; k < dirs.size(); ++k) {
      if (dirs[i].cross(dirs[k]).norm() > 1e-6) {
        return true;
      }
    }
  }
  return false;
}

}  // namespace

std::vector<Quat> world_rotations_from_positions(const Pose3D& pose,
                                                 const SkeletonDefinition& skeleton) {
  if (pose.size() != skeleton.size()) {
    throw InvalidArgument("pose has " + std::to_string(pose.size()) + " joints, skeleton has " +
                          std::to_string(skeleton.size()));
  }
  const auto kids = skeleton.children();
  std::vector<Quat> world(skeleton.size(), Quat::Identity());
  for (const int j : skeleton.topological_order()) {
    const Quat parent_rot = skeleton.parent[j] < 0 ? Quat::Identity() : world[skeleton.parent[j]];
    const auto& cs = kids[j];
    if (cs.empty()) {
      world[j] = parent_rot;
      continue;
    }
    std::vector<Vec3> rest_dirs;
    std::vector<Vec3> target_dirs;
    for (const int c : cs) {
      const Vec3 bone = pose[c] - pose[j];
      const double len = bone.norm();
      if (!(len > 0.0)) {
        throw InvalidArgument("degenerate bone '" + skeleton.joints[j] + "' -> '" +
                              skeleton.joints[c] + "': zero direction");
      }
      rest_dirs.push_back(skeleton.rest_offsets[c].normalized());
      target_dirs.push_back(bone / len);
    }
    if (cs.size() >= 2 && spans_plane(rest_dirs)) {
      world[j] = Quat(kabsch(rest_dirs, target_dirs)).normalized();
    } else {
      const Vec3 local_target = parent_rot.conjugate() * target_dirs.front();
      const Quat swing = Quat::FromTwoVectors(rest_dirs.front(), local_target);
      world[j] = (parent_rot * swing).normalized();
    }
  }
  return world;
}

Coco17 map_pose_to_coco17(const Pose3D& pose, const std::vector<Quat>& world_rotations,
                          const SkeletonDefinition& skeleton, const ResolvedSchema& schema,
                          const std::vector<double>* offset_scale) {
  Coco17 out;
  for (std::size_t k = 0; k < kCocoKeypointCount; ++k) {
    const auto& r = schema.rules[k];
    const int frame_joint = skeleton.parent[r.a] < 0 ? r.a : skeleton.parent[r.a];
    const double s = offset_scale != nullptr ? (*offset_scale)[r.a] : 1.0;
    const Vec3 offset = world_rotations[frame_joint] * (r.offset * s);
    if (r.kind == KeypointRule::Kind::Midpoint) {
      out[k] = 0.5 * (pose[r.a] + pose[r.b]) + offset;
    } else {
      out[k] = pose[r.a] + offset;
    }
  }
  return out;
}

Coco17 map_pose_to_coco17(const Pose3D& pose, const SkeletonDefinition& skeleton,
                          const KeypointSchema& schema) {
  const ResolvedSchema resolved = resolve_schema(schema, skeleton);
  return map_pose_to_coco17(pose, world_rotations_from_positions(pose, skeleton), skeleton,
                            resolved);
}

namespace {

Vec3 vec_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) {
    throw ParseError("expected a 3-element array");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

nlohmann::json skeleton_to_json(const SkeletonDefinition& def) {
  nlohmann::json joints = nlohmann::json::array();
  for (std::size_t i = 0; i < def.size(); ++i) {
    const auto& o = def.rest_offsets[i];
    joints.push_back({{"name", def.joints[i]},
                      {"parent", def.parent[i] < 0 ? nlohmann::json(nullptr)
                                                   : nlohmann::json(def.joints[def.parent[i]])},
                      {"offset", {o.x(), o.y(), o.z()}}});
  }
  return {{"joints", joints}};
}

SkeletonDefinition skeleton_from_json(const nlohmann::json& j) {
  SkeletonDefinition s;
  try {
    const auto& arr = j.at("joints");
    for (const auto& e : arr) {
      s.joints.push_back(e.at("name").get<std::string>());
    }
    for (const auto& e : arr) {
      const auto& p = e.at("parent");
      if (p.is_null()) {
        s.parent.push_back(-1);
      } else {
        const int idx = s.index_of(p.get<std::string>());
        if (idx < 0) {
          throw ParseError("joint '" + e.at("name").get<std::string>() + "' has unknown parent '" +
                           p.get<std::string>() + "'");
        }
        s.parent.push_back(idx);
      }
      s.rest_offsets.push_back(vec_from_json(e.at("offset")));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("skeleton: ") + e.what());
  }
  s.compute_twist_axes();
  return s;
}

nlohmann::json schema_to_json(const KeypointSchema& schema) {
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t k = 0; k < kCocoKeypointCount; ++k) {
    const auto& r = schema.rules[k];
    nlohmann::json e = {{"name", coco_keypoint_names()[k]}};
    if (r.kind == KeypointRule::Kind::Midpoint) {
      e["midpoint"] = {r.joint_a, r.joint_b};
    } else {
      e["joint"] = r.joint_a;
    }
    e["offset"] = {r.offset.x(), r.offset.y(), r.offset.z()};
    arr.push_back(e);
  }
  return {{"keypoints", arr}};
}

KeypointSchema schema_from_json(const nlohmann::json& j) {
  KeypointSchema s;
  std::array<bool, kCocoKeypointCount> seen{};
  try {
    for (const auto& e : j.at("keypoints")) {
      const auto name = e.at("name").get<std::string>();
      const auto& names = coco_keypoint_names();
      const auto it = std::find(names.begin(), names.end(), name);
      if (it == names.end()) {
        throw ParseError("unknown COCO keypoint '" + name + "'");
      }
      const auto k = static_cast<std::size_t>(it - names.begin());
      if (seen[k]) {
        throw ParseError("keypoint '" + name + "' has more than one rule");
      }
      seen[k] = true;
      KeypointRule r;
      if (e.contains("midpoint")) {
        r.kind = KeypointRule::Kind::Midpoint;
        r.joint_a = e.at("midpoint").at(0).get<std::string>();
        r.joint_b = e.at("midpoint").at(1).get<std::string>();
      } else {
        r.joint_a = e.at("joint").get<std::string>();
      }
      if (e.contains("offset")) {
        r.offset = vec_from_json(e.at("offset"));
      }
      s.rules[k] = r;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("keypoint schema: ") + e.what());
  }
  for (std::size_t k = 0; k < kCocoKeypointCount; ++k) {
    if (!seen[k]) {
      throw ParseError("keypoint '" + std::string(coco_keypoint_names()[k]) + "' has no rule");
    }
  }
  return s;
}

}  // namespace chairsynth
