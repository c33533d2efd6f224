#include "chairsynth/demo_motions.hpp"

#include "chairsynth/retarget.hpp"
#include "chairsynth/rng.hpp"

#include <cmath>
#include <cstdio>

namespace chairsynth {

namespace {

Quat axis_deg(const Vec3& axis, double deg) { return Quat(Eigen::AngleAxisd(deg2rad(deg), axis)); }

const char* const kKinds[] = {"wave", "reach", "push", "lean", "look"};

}  // namespace

MotionSequence demo_motion(const SkeletonDefinition& skeleton, std::uint64_t seed,
                           std::size_t index) {
  Rng rng(derive_seed(seed, hash_string("demo-motion"), index));
  const std::size_t kind = index % 5;
  const std::size_t frames = static_cast<std::size_t>(rng.integer(40, 120));
  const double fps = kDefaultFrameRate;
  const double freq = rng.uniform(0.3, 1.2);
  const double phase = rng.uniform(0.0, 2 * kPi);
  const double yaw = rng.uniform(-30.0, 30.0);
  const double amp = rng.uniform(0.6, 1.0);
  const bool left = rng.bernoulli(0.5);

  auto j = [&](std::string_view name) { return skeleton.index_of(name); };
  MotionSequence seq;
  seq.frame_rate = fps;
  seq.source = std::string("demo:") + kKinds[kind];
  for (std::size_t f = 0; f < frames; ++f) {
    const double t = static_cast<double>(f) / fps;
    const double s = std::sin(2 * kPi * freq * t + phase);
    std::vector<Quat> local(skeleton.size(), Quat::Identity());
    auto set = [&](std::string_view name, const Quat& q) {
      const int i = j(name);
      if (i >= 0) {
        local[i] = q;
      }
    };
    // Resting posture: arms down at the sides, elbows bent, seated legs.
    double l_down = -70.0;
    double r_down = 70.0;
    double l_fwd = -20.0;
    double r_fwd = 20.0;
    double l_elbow = -40.0;
    double r_elbow = 40.0;
    double lean = 5.0;
    double head = 0.0;
    switch (kind) {
      case 0: {  // wave
        double& down = left ? l_down : r_down;
        double& elbow = left ? l_elbow : r_elbow;
        down = left ? 40.0 : -40.0;
        elbow = (left ? -1.0 : 1.0) * (60.0 + 30.0 * amp * s);
        break;
      }
      case 1: {  // reach forward and back
        const double reach = 0.5 * (1.0 + s) * amp;
        l_fwd = -20.0 - 60.0 * reach;
        r_fwd = 20.0 + 60.0 * reach;
        l_down = -70.0 + 50.0 * reach;
        r_down = 70.0 - 50.0 * reach;
        l_elbow = -40.0 * (1.0 - reach);
        r_elbow = 40.0 * (1.0 - reach);
        lean = 5.0 + 15.0 * reach;
        break;
      }
      case 2: {  // wheel push
        l_fwd = -20.0 - 35.0 * amp * s;
        r_fwd = 20.0 + 35.0 * amp * s;
        l_elbow = -50.0 - 20.0 * s;
        r_elbow = 50.0 + 20.0 * s;
        lean = 10.0 + 8.0 * s;
        break;
      }
      case 3:  // lean and shrug
        lean = 5.0 + 20.0 * amp * s;
        l_down = -70.0 + 15.0 * std::abs(s);
        r_down = 70.0 - 15.0 * std::abs(s);
        break;
      default:  // look around
        head = 50.0 * amp * s;
        break;
    }
    set("lower_spine", axis_deg(Vec3::UnitX(), lean));
    set("neck_top", axis_deg(Vec3::UnitY(), head));
    set("left_shoulder", axis_deg(Vec3::UnitY(), l_fwd) * axis_deg(Vec3::UnitZ(), l_down));
    set("right_shoulder", axis_deg(Vec3::UnitY(), r_fwd) * axis_deg(Vec3::UnitZ(), r_down));
    set("left_elbow", axis_deg(Vec3::UnitY(), l_elbow));
    set("right_elbow", axis_deg(Vec3::UnitY(), r_elbow));
    for (const char* side : {"left_", "right_"}) {
      const std::string p(side);
      set(p + "hip", axis_deg(Vec3::UnitX(), -80.0 + 5.0 * s));
      set(p + "knee", axis_deg(Vec3::UnitX(), 80.0));
    }
    const int root = skeleton.root();
    local[root] = axis_deg(Vec3::UnitY(), yaw + 3.0 * s);
    const Vec3 root_pos(0.02 * s, 0.9, 0.01 * t);
    seq.frames.push_back(forward_kinematics(skeleton, root_pos, local));
  }
  return seq;
}

std::vector<std::filesystem::path> write_demo_motions(const std::filesystem::path& dir,
                                                      std::size_t count, std::uint64_t seed,
                                                      const SkeletonDefinition& skeleton) {
  std::vector<std::filesystem::path> out;
  for (std::size_t i = 0; i < count; ++i) {
    char name[48];
    std::snprintf(name, sizeof name, "motion_%03zu.json", i);
    MotionSequence m = demo_motion(skeleton, seed, i);
    const auto path = dir / name;
    save_motion(m, skeleton, path);
    out.push_back(path);
  }
  return out;
}

}  // namespace chairsynth
