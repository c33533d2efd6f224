#pragma once

#include "chairsynth/config.hpp"
#include "chairsynth/rng.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace chairsynth {

enum class PrimitiveKind { Cube, Sphere, Cylinder, Capsule };

std::string_view primitive_name(PrimitiveKind k);
PrimitiveKind parse_primitive(std::string_view name);

// Wheelchair proxy dimensions in meters, in the body frame before the
// placement scale. Seat and footplate are boxes given by centre and
// half-extents; the two wheels are cylinders with their axle along X.
struct WheelchairDims {
  double wheel_radius = 0.30;
  double wheel_half_width = 0.02;
  Vec3 wheel_center{0.30, -0.20, 0.10};  // left wheel; the right one mirrors in X
  Vec3 seat_center{0.0, -0.165, 0.20};
  Vec3 seat_half{0.22, 0.025, 0.22};
  Vec3 footplate_center{0.0, -0.53, 0.47};
  Vec3 footplate_half{0.20, 0.015, 0.10};

  WheelchairDims scaled(double s) const;
};

// One body in the generated human pool.
struct BodyParams {
  double age = 0.0;
  double height = 0.0;  // normalized
  double weight = 0.0;  // normalized
  std::string sex;
  std::string ethnicity;
  double stature = 1.0;  // overall bone length multiplier
  double girth = 1.0;    // proxy radius multiplier
  std::vector<double> bone_scale;  // per joint, applied to that joint's rest offset
};

struct HumanPool {
  std::uint64_t epoch = 0;
  std::vector<BodyParams> bodies;
};

struct HumanInstance {
  std::size_t pool_index = 0;
  std::size_t motion = 0;  // index into the animation pool
  std::size_t frame = 0;
  Vec3 position = Vec3::Zero();
  Vec3 rotation_deg = Vec3::Zero();  // Euler, applied Z, X, Y
  Vec3 scale = Vec3::Ones();
  WheelchairDims chair;
  BodyParams body;
};

struct OccluderInstance {
  PrimitiveKind kind = PrimitiveKind::Cube;
  Vec3 position = Vec3::Zero();
  Vec3 rotation_deg = Vec3::Zero();
  Vec3 scale = Vec3::Ones();
  int texture = 0;
  double hue_offset = 0.0;
};

struct CameraSample {
  Vec3 position = Vec3::Zero();
  Vec3 rotation_deg = Vec3::Zero();
  double fov_deg = 45.0;
  double focal_length_mm = 20.0;
};

struct LightSample {
  Vec3 position = Vec3::Zero();
  Vec3 rotation_deg = Vec3::Zero();
  double intensity = 0.0;
  std::array<double, 4> color{1, 1, 1, 1};
  bool enabled = true;
};

struct SunSample {
  double hour = 12.0;
  double day = 180.0;
  double latitude = 0.0;
};

struct PostSample {
  double vignette = 0.0;
  double exposure = 0.0;
  double white_balance = 0.0;
  double focus_distance = 0.0;
  double contrast = 0.0;
  double saturation = 0.0;
};

struct SceneSample {
  std::uint64_t seed = 0;
  std::uint64_t frame_index = 0;
  std::vector<HumanInstance> humans;
  std::vector<OccluderInstance> occluders;
  int background = 0;
  CameraSample camera;
  SunSample sun;
  std::vector<LightSample> lights;
  PostSample post;
};

// Frame counts of the animation clips humans draw poses from.
struct AnimationPool {
  std::vector<std::size_t> lengths;
  std::vector<std::string> ids;
};

// Pool content is a pure function of (seed, iteration / pool_refresh).
HumanPool refresh_human_pool(const RandomizerConfig& config, std::uint64_t seed,
                             std::uint64_t iteration, const SkeletonDefinition& skeleton);

// Deterministic in (config, seed, frame_index); independent of call order.
SceneSample sample_scene(const RandomizerConfig& config, std::uint64_t seed,
                         std::uint64_t frame_index, const AnimationPool& animations,
                         const SkeletonDefinition& skeleton);
// Same, reusing a pool the caller already built for this frame's epoch.
SceneSample sample_scene(const RandomizerConfig& config, std::uint64_t seed,
                         std::uint64_t frame_index, const AnimationPool& animations,
                         const HumanPool& pool);

nlohmann::json scene_to_json(const SceneSample& scene);

}  // namespace chairsynth
