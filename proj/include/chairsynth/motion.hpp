#pragma once

#include "chairsynth/skeleton.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace chairsynth {

constexpr double kDefaultFrameRate = 20.0;

struct MotionSequence {
  double frame_rate = kDefaultFrameRate;
  std::vector<Pose3D> frames;  // joints in skeleton order
  std::string source;
  std::string id;  // file stem when loaded from disk

  std::size_t size() const { return frames.size(); }
};

// Per-frame local joint rotations over a skeleton, plus the root trajectory.
struct RotationSequence {
  SkeletonDefinition skeleton;
  double frame_rate = kDefaultFrameRate;
  std::vector<Vec3> root_positions;
  std::vector<std::vector<Quat>> rotations;  // [frame][joint], parent-relative
  std::string source;
  std::string id;

  std::size_t size() const { return rotations.size(); }
};

// Parses the motion file format. Joints are matched to `skeleton` by name;
// an optional "joint_sources" object maps a skeleton joint to one file joint
// (alias) or a list of file joints (averaged).
MotionSequence parse_motion(const nlohmann::json& j, const SkeletonDefinition& skeleton);
MotionSequence load_motion(const std::filesystem::path& path, const SkeletonDefinition& skeleton);
nlohmann::json motion_to_json(const MotionSequence& seq, const SkeletonDefinition& skeleton);
void save_motion(const MotionSequence& seq, const SkeletonDefinition& skeleton,
                 const std::filesystem::path& path);

// Rotation-channel variant: {frame_rate, joint_names, root_positions, rotations[w,x,y,z]}.
nlohmann::json rotations_to_json(const RotationSequence& seq);
RotationSequence parse_rotations(const nlohmann::json& j, const SkeletonDefinition& skeleton);
void save_rotations(const RotationSequence& seq, const std::filesystem::path& path);
RotationSequence load_rotations(const std::filesystem::path& path,
                                const SkeletonDefinition& skeleton);

// Motion files (*.json) in a directory, sorted by file name.
std::vector<std::filesystem::path> list_motion_files(const std::filesystem::path& dir);

}  // namespace chairsynth
