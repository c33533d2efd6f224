#pragma once

#include "chairsynth/motion.hpp"
#include "chairsynth/rng.hpp"

#include <map>
#include <string>
#include <vector>

namespace chairsynth {

constexpr double kHipFixDeg = 35.0;
constexpr double kNoiseAmplitudeDeg = 10.0;

// Anatomical angles in degrees: flexion/extension, abduction/adduction,
// internal/external rotation.
struct JointAngles {
  double flexion = 0.0;
  double abduction = 0.0;
  double rotation = 0.0;
};

// Axes of a joint's anatomical frame, in the joint's parent-relative frame.
// flexion is -X, the bone axis points along the first child's rest offset,
// abduction completes the right-handed triple.
struct AnatomicalFrame {
  Vec3 flexion;
  Vec3 abduction;
  Vec3 bone;
};

AnatomicalFrame anatomical_frame(const SkeletonDefinition& skeleton, int joint);
Quat angles_to_rotation(const AnatomicalFrame& frame, const JointAngles& angles);
JointAngles rotation_to_angles(const AnatomicalFrame& frame, const Quat& q);

// Seated leg posture keyed by joint name (hips, knees, ankles, toes).
struct LowerBodyTemplate {
  std::map<std::string, JointAngles> joints;
};

LowerBodyTemplate seated_template();
const std::vector<std::string>& lower_body_joints();
// Joints whose three anatomical channels receive noise: hip, knee, ankle per leg.
const std::vector<std::string>& noised_joints();

// Sets every lower-body joint to the template and adds `hip_fix_deg` of
// flexion at both hips. Every other channel is copied untouched.
RotationSequence fix_lower_body(const RotationSequence& rots, const LowerBodyTemplate& tmpl,
                                double hip_fix_deg = kHipFixDeg);

struct NoiseSpec {
  int n = 1;
  double gap_mean = 0.25;
  double gap_std = 1.0 / 32.0;
  double amplitude = kNoiseAmplitudeDeg;

  static NoiseSpec for_frames(int n);
  void validate() const;
};

struct InterpolatedNoise {
  std::vector<int> knots;  // strictly increasing, starts at 0
  std::vector<double> values;  // length n
};

InterpolatedNoise generate_noise_with_knots(const NoiseSpec& spec, RandomSource& rng);
std::vector<double> generate_interpolated_noise(const NoiseSpec& spec, RandomSource& rng);

// Adds an independent noise array to each anatomical channel of every joint in
// noised_joints(). Frames where all three offsets of a joint are zero keep the
// input rotation bit for bit.
RotationSequence apply_lower_body_noise(const RotationSequence& rots, RandomSource& rng,
                                        double amplitude = kNoiseAmplitudeDeg);

// Moves the clip into the wheelchair frame: root translation zeroed, root yaw
// dropped, remaining root tilt pushed onto the upper body so the legs stay
// level with the seat.
RotationSequence seat_pose(const RotationSequence& rots);

}  // namespace chairsynth
