#pragma once

#include "chairsynth/distribution.hpp"
#include "chairsynth/skeleton.hpp"

#include <filesystem>

namespace chairsynth {

struct OccluderConfig {
  Distribution placement;   // Cartesian
  Distribution separation;  // Cartesian; the largest component is used
  int max_count = 2;
  Distribution scale;     // Cartesian
  Distribution rotation;  // Euler, degrees
  Distribution hue_offset;
  Distribution kind;  // Categorical over cube, sphere, cylinder, capsule
  int texture_count = 8;
};

struct HumanConfig {
  Distribution count;
  int pool_size = 50;
  int pool_refresh = 400;
  Distribution age;
  Distribution height;  // normalized 0..1
  Distribution weight;  // normalized 0..1
  Distribution sex;
  Distribution ethnicity;
  double limb_jitter = 0.05;  // relative per-limb bone scale spread
  Distribution placement;     // Cartesian
  Distribution rotation;      // Euler, degrees
  Distribution scale;         // Cartesian
};

struct SunConfig {
  Distribution hour;
  Distribution day;
  Distribution latitude;
};

struct LightConfig {
  int count = 3;
  Distribution intensity;
  Distribution color;  // RGBA
  Distribution enabled;  // Bernoulli
  Distribution position;  // Cartesian offset
  Distribution rotation;  // Euler offset
};

struct CameraConfig {
  Vec3 base_position{0.0, 0.0, -21.5};
  Vec3 base_rotation_deg{0.0, 0.0, 0.0};
  Distribution fov;
  Distribution focal_length;
  Distribution position;
  Distribution rotation;
};

struct PostConfig {
  Distribution vignette;
  Distribution exposure;
  Distribution white_balance;
  Distribution focus_distance;
  Distribution contrast;
  Distribution saturation;
};

struct RandomizerConfig {
  OccluderConfig occluders;
  HumanConfig humans;
  SunConfig sun;
  LightConfig lights;
  CameraConfig camera;
  PostConfig post;
  int background_count = 16;

  void validate() const;
};

struct MotionConfig {
  double cutoff_hz = 5.0;
  double hip_fix_deg = 35.0;
  double noise_amplitude_deg = 10.0;
};

struct AnnotationConfig {
  double occlusion_threshold = 0.02;
  bool render_debug = false;
};

// Everything a generation run reads from its config file.
struct GeneratorConfig {
  RandomizerConfig randomizers;
  MotionConfig motion;
  AnnotationConfig annotation;
  SkeletonDefinition skeleton;
  KeypointSchema schema;
};

RandomizerConfig default_randomizer_config();
GeneratorConfig default_generator_config();

// Missing keys fall back to the defaults.
GeneratorConfig parse_generator_config(const nlohmann::json& j);
GeneratorConfig load_generator_config(const std::filesystem::path& path);
nlohmann::json generator_config_to_json(const GeneratorConfig& config);

}  // namespace chairsynth
