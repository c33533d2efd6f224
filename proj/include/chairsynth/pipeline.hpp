#pragma once

#include "chairsynth/annotate.hpp"
#include "chairsynth/coco.hpp"
#include "chairsynth/config.hpp"
#include "chairsynth/evalsvc.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace chairsynth {

// Low-pass, rotations, seated legs, noise seeded by (seed, clip id), then the
// seat transform.
RotationSequence prepare_clip(const MotionSequence& motion, const GeneratorConfig& config,
                              std::uint64_t seed);

// Loads every motion file in `dir`, drops the ones the manifest removes and
// prepares the rest in file-name order.
MotionLibrary load_library(const std::filesystem::path& dir, const GeneratorConfig& config,
                           std::uint64_t seed, const FilterManifest* manifest = nullptr,
                           int workers = 1);

struct FrameBatch {
  std::vector<SceneSample> scenes;
  std::vector<AnnotatedFrame> frames;
};

// Samples and annotates frames [first, first + count). `schedule`, when
// given, is the order workers pick frames in; results never depend on it.
FrameBatch generate_frames(const GeneratorConfig& config, const MotionLibrary& library,
                           std::uint64_t seed, std::uint64_t first, std::size_t count,
                           int workers = 1, const std::vector<std::size_t>* schedule = nullptr);

struct GenerateOptions {
  std::uint64_t seed = 0;
  std::size_t count = 0;
  std::filesystem::path motions;
  std::optional<std::filesystem::path> filter;
  std::filesystem::path out;
  int workers = 1;
};

struct GenerateSummary {
  std::size_t frames = 0;
  std::size_t annotations = 0;
  std::size_t motions = 0;
  std::size_t motions_removed = 0;
  double seconds = 0.0;
  double frames_per_second() const { return seconds > 0 ? frames / seconds : 0.0; }
};

GenerateSummary generate_dataset(const GeneratorConfig& config, const GenerateOptions& options);

}  // namespace chairsynth
