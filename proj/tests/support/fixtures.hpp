#pragma once

#include "chairsynth/demo_motions.hpp"
#include "chairsynth/pipeline.hpp"

namespace fixtures {

// A few processed demo clips, enough to pose every scene.
inline chairsynth::MotionLibrary demo_library(const chairsynth::GeneratorConfig& config,
                                              std::size_t clips = 6, std::uint64_t seed = 1) {
  chairsynth::MotionLibrary lib;
  for (std::size_t i = 0; i < clips; ++i) {
    auto m = chairsynth::demo_motion(config.skeleton, seed, i);
    m.id = "demo_" + std::to_string(i);
    lib.clips.push_back(chairsynth::prepare_clip(m, config, seed));
  }
  return lib;
}

}  // namespace fixtures
