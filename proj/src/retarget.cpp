#include "chairsynth/retarget.hpp"

namespace chairsynth {

std::vector<Quat> pose_to_local_rotations(const Pose3D& pose, const SkeletonDefinition& skeleton) {
  const auto world = world_rotations_from_positions(pose, skeleton);
  std::vector<Quat> local(skeleton.size());
  for (std::size_t j = 0; j < skeleton.size(); ++j) {
    const int p = skeleton.parent[j];
    local[j] = p < 0 ? world[j] : (world[p].conjugate() * world[j]).normalized();
  }
  return local;
}

RotationSequence positions_to_rotations(const MotionSequence& seq,
                                        const SkeletonDefinition& skeleton) {
  RotationSequence out;
  out.skeleton = skeleton;
  out.frame_rate = seq.frame_rate;
  out.source = seq.source;
  out.id = seq.id;
  const int root = skeleton.root();
  out.root_positions.reserve(seq.size());
  out.rotations.reserve(seq.size());
  for (std::size_t f = 0; f < seq.size(); ++f) {
    try {
      out.rotations.push_back(pose_to_local_rotations(seq.frames[f], skeleton));
    } catch (const InvalidArgument& e) {
      throw InvalidArgument("frame " + std::to_string(f) + ": " + e.what());
    }
    out.root_positions.push_back(seq.frames[f][root]);
  }
  return out;
}

Pose3D forward_kinematics(const SkeletonDefinition& skeleton, const Vec3& root_position,
                          const std::vector<Quat>& local, std::vector<Quat>* world) {
  if (local.size() != skeleton.size()) {
    throw InvalidArgument("rotation count does not match skeleton");
  }
  Pose3D pos(skeleton.size());
  std::vector<Quat> w(skeleton.size());
  for (const int j : skeleton.topological_order()) {
    const int p = skeleton.parent[j];
    if (p < 0) {
      pos[j] = root_position;
      w[j] = local[j];
    } else {
      pos[j] = pos[p] + w[p] * skeleton.rest_offsets[j];
      w[j] = w[p] * local[j];
    }
  }
  if (world != nullptr) {
    *world = std::move(w);
  }
  return pos;
}

Pose3D forward_kinematics(const RotationSequence& rots, std::size_t frame, std::vector<Quat>* world) {
  if (frame >= rots.size()) {
    throw InvalidArgument("frame index " + std::to_string(frame) + " out of range (" +
                          std::to_string(rots.size()) + " frames)");
  }
  return forward_kinematics(rots.skeleton, rots.root_positions[frame], rots.rotations[frame], world);
}

Pose3D normalize_bone_lengths(const Pose3D& pose, const SkeletonDefinition& skeleton) {
  Pose3D out(pose.size());
  for (const int j : skeleton.topological_order()) {
    const int p = skeleton.parent[j];
    if (p < 0) {
      out[j] = pose[j];
    } else {
      const Vec3 bone = pose[j] - pose[p];
      out[j] = out[p] + bone.normalized() * skeleton.bone_length(j);
    }
  }
  return out;
}

}  // namespace chairsynth
