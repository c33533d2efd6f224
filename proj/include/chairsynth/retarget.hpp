#pragma once

#include "chairsynth/motion.hpp"

namespace chairsynth {

// Local rotations whose forward kinematics reproduces every bone direction of
// the input. Twist about single-child bones is inherited from the parent.
RotationSequence positions_to_rotations(const MotionSequence& seq,
                                        const SkeletonDefinition& skeleton);
std::vector<Quat> pose_to_local_rotations(const Pose3D& pose, const SkeletonDefinition& skeleton);

// Rest offsets rotated down the hierarchy and added to the root position.
// When `world` is non-null it receives each joint's world rotation.
Pose3D forward_kinematics(const SkeletonDefinition& skeleton, const Vec3& root_position,
                          const std::vector<Quat>& local, std::vector<Quat>* world = nullptr);
Pose3D forward_kinematics(const RotationSequence& rots, std::size_t frame,
                          std::vector<Quat>* world = nullptr);

// Input pose with every bone rescaled to the skeleton's rest length, keeping
// its direction and the root position.
Pose3D normalize_bone_lengths(const Pose3D& pose, const SkeletonDefinition& skeleton);

}  // namespace chairsynth
