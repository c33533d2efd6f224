#include "chairsynth/lower_body.hpp"

#include <algorithm>
#include <cmath>

namespace chairsynth {

AnatomicalFrame anatomical_frame(const SkeletonDefinition& skeleton, int joint) {
  const auto kids = skeleton.children();
  const Vec3 along = kids[joint].empty() ? skeleton.rest_offsets[joint]
                                         : skeleton.rest_offsets[kids[joint].front()];
  AnatomicalFrame f;
  f.flexion = -Vec3::UnitX();
  const Vec3 ortho = along - along.dot(f.flexion) * f.flexion;
  if (!(ortho.norm() > 1e-9)) {
    throw InvalidArgument("joint '" + skeleton.joints[joint] +
                          "' has a bone parallel to its flexion axis");
  }
  f.bone = ortho.normalized();
  f.abduction = f.bone.cross(f.flexion);
  return f;
}

namespace {

Mat3 basis(const AnatomicalFrame& f) {
  Mat3 b;
  b.col(0) = f.flexion;
  b.col(1) = f.abduction;
  b.col(2) = f.bone;
  return b;
}

}  // namespace

Quat angles_to_rotation(const AnatomicalFrame& frame, const JointAngles& a) {
  const Quat q = Quat(Eigen::AngleAxisd(deg2rad(a.flexion), frame.flexion)) *
                 Quat(Eigen::AngleAxisd(deg2rad(a.abduction), frame.abduction)) *
                 Quat(Eigen::AngleAxisd(deg2rad(a.rotation), frame.bone));
  return q.normalized();
}

JointAngles rotation_to_angles(const AnatomicalFrame& frame, const Quat& q) {
  const Mat3 b = basis(frame);
  const Mat3 m = b.transpose() * q.toRotationMatrix() * b;
  JointAngles a;
  a.abduction = rad2deg(std::asin(std::clamp(m(0, 2), -1.0, 1.0)));
  a.flexion = rad2deg(std::atan2(-m(1, 2), m(2, 2)));
  a.rotation = rad2deg(std::atan2(-m(0, 1), m(0, 0)));
  return a;
}

const std::vector<std::string>& lower_body_joints() {
  static const std::vector<std::string> names = {"left_hip",   "left_knee",  "left_ankle",
                                                 "left_toe",   "right_hip",  "right_knee",
                                                 "right_ankle", "right_toe"};
  return names;
}

const std::vector<std::string>& noised_joints() {
  static const std::vector<std::string> names = {"left_hip",  "left_knee",  "left_ankle",
                                                 "right_hip", "right_knee", "right_ankle"};
  return names;
}

LowerBodyTemplate seated_template() {
  LowerBodyTemplate t;
  for (const char* side : {"left_", "right_"}) {
    const std::string s(side);
    t.joints[s + "hip"] = {55.0, 0.0, 0.0};
    t.joints[s + "knee"] = {-90.0, 0.0, 0.0};
    t.joints[s + "ankle"] = {0.0, 0.0, 0.0};
    t.joints[s + "toe"] = {0.0, 0.0, 0.0};
  }
  return t;
}

RotationSequence fix_lower_body(const RotationSequence& rots, const LowerBodyTemplate& tmpl,
                                double hip_fix_deg) {
  struct Target {
    int joint;
    Quat q;
  };
  std::vector<Target> targets;
  for (const auto& name : lower_body_joints()) {
    const auto it = tmpl.joints.find(name);
    if (it == tmpl.joints.end()) {
      throw InvalidArgument("lower-body template has no entry for '" + name + "'");
    }
    const int j = rots.skeleton.require(name);
    JointAngles a = it->second;
    if (name.ends_with("_hip")) {
      a.flexion += hip_fix_deg;
    }
    targets.push_back({j, angles_to_rotation(anatomical_frame(rots.skeleton, j), a)});
  }
  RotationSequence out = rots;
  for (auto& frame : out.rotations) {
    for (const auto& t : targets) {
      frame[t.joint] = t.q;
    }
  }
  return out;
}

NoiseSpec NoiseSpec::for_frames(int n) {
  NoiseSpec s;
  s.n = n;
  s.gap_mean = n / 4.0;
  s.gap_std = n / 32.0;
  return s;
}

void NoiseSpec::validate() const {
  if (n < 1) {
    throw InvalidArgument("noise length n must be >= 1, got " + std::to_string(n));
  }
  if (!(gap_std > 0.0) || !(gap_mean > 0.0)) {
    throw InvalidArgument("noise gap distribution must have positive mean and deviation");
  }
  if (!(amplitude >= 0.0)) {
    throw InvalidArgument("noise amplitude must be non-negative");
  }
}

InterpolatedNoise generate_noise_with_knots(const NoiseSpec& spec, RandomSource& rng) {
  spec.validate();
  InterpolatedNoise out;
  out.knots.push_back(0);
  double x = 0.0;
  for (;;) {
    double k = rng.normal(spec.gap_mean, spec.gap_std);
    while (!(k > 0.0)) {
      k = rng.normal(spec.gap_mean, spec.gap_std);
    }
    x += k;
    const double r = std::round(x);
    if (r >= spec.n) {
      break;
    }
    const int idx = static_cast<int>(r);
    if (idx != out.knots.back()) {
      out.knots.push_back(idx);
    }
  }
  std::vector<double> at_knots(out.knots.size());
  for (auto& v : at_knots) {
    v = rng.uniform(-spec.amplitude, spec.amplitude);
  }
  out.values.assign(spec.n, 0.0);
  for (std::size_t i = 0; i < out.knots.size(); ++i) {
    const int k0 = out.knots[i];
    const double v0 = at_knots[i];
    if (i + 1 == out.knots.size()) {
      for (int f = k0; f < spec.n; ++f) {
        out.values[f] = v0;
      }
      break;
    }
    const int k1 = out.knots[i + 1];
    const double v1 = at_knots[i + 1];
    const double span = k1 - k0;
    for (int f = k0; f < k1; ++f) {
      out.values[f] = v0 + (v1 - v0) * ((f - k0) / span);
    }
  }
  return out;
}

std::vector<double> generate_interpolated_noise(const NoiseSpec& spec, RandomSource& rng) {
  return generate_noise_with_knots(spec, rng).values;
}

RotationSequence apply_lower_body_noise(const RotationSequence& rots, RandomSource& rng,
                                        double amplitude) {
  RotationSequence out = rots;
  if (rots.size() == 0) {
    return out;
  }
  NoiseSpec spec = NoiseSpec::for_frames(static_cast<int>(rots.size()));
  spec.amplitude = amplitude;
  for (const auto& name : noised_joints()) {
    const int j = rots.skeleton.require(name);
    const AnatomicalFrame frame = anatomical_frame(rots.skeleton, j);
    const auto flex = generate_interpolated_noise(spec, rng);
    const auto abd = generate_interpolated_noise(spec, rng);
    const auto rot = generate_interpolated_noise(spec, rng);
    for (std::size_t f = 0; f < rots.size(); ++f) {
      if (flex[f] == 0.0 && abd[f] == 0.0 && rot[f] == 0.0) {
        continue;
      }
      JointAngles a = rotation_to_angles(frame, rots.rotations[f][j]);
      a.flexion += flex[f];
      a.abduction += abd[f];
      a.rotation += rot[f];
      out.rotations[f][j] = angles_to_rotation(frame, a);
    }
  }
  return out;
}


RotationSequence seat_pose(const RotationSequence& rots) {
  RotationSequence out = rots;
  const SkeletonDefinition& sk = rots.skeleton;
  const int root = sk.root();
  std::vector<bool> leg(sk.size(), false);
  for (const auto& name : lower_body_joints()) {
    const int j = sk.index_of(name);
    if (j >= 0) {
      leg[j] = true;
    }
  }
  std::vector<int> upper;
  for (std::size_t j = 0; j < sk.size(); ++j) {
    if (sk.parent[j] == root && !leg[j]) {
      upper.push_back(static_cast<int>(j));
    }
  }
  for (std::size_t f = 0; f < out.size(); ++f) {
    auto& q = out.rotations[f];
    const Vec3 fwd = q[root] * Vec3::UnitZ();
    const double yaw = std::atan2(fwd.x(), fwd.z());
    const Quat tilt = (Quat(Eigen::AngleAxisd(yaw, Vec3::UnitY())).conjugate() * q[root]).normalized();
    for (int j : upper) {
      q[j] = (tilt * q[j]).normalized();
    }
    q[root] = Quat::Identity();
  }
  for (auto& p : out.root_positions) {
    p = Vec3::Zero();
  }
  return out;
}

}  // namespace chairsynth
