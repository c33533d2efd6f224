#pragma once

#include "chairsynth/motion.hpp"

#include <filesystem>
#include <vector>

namespace chairsynth {

// Procedural upper-body clips (waving, reaching, pushing, leaning, looking
// around) standing in for a text-to-motion model's output. Leg channels are
// arbitrary; the pipeline replaces them.
MotionSequence demo_motion(const SkeletonDefinition& skeleton, std::uint64_t seed,
                           std::size_t index);

// Writes motion_000.json ... into `dir`; returns the paths in order.
std::vector<std::filesystem::path> write_demo_motions(const std::filesystem::path& dir,
                                                      std::size_t count, std::uint64_t seed,
                                                      const SkeletonDefinition& skeleton);

}  // namespace chairsynth
