#pragma once

#include "chairsynth/annotate.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace chairsynth {

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel

  std::size_t foreground_pixels() const;
};

constexpr std::uint8_t kBackgroundLevel = 32;

// Depth-shaded preview of the proxy geometry; nearer surfaces are brighter.
// When `frame` is given its keypoints are drawn on top (green visible, red
// occluded).
Image render_debug_frame(const PosedScene& posed, const CameraModel& cam,
                         const AnnotatedFrame* frame = nullptr);

void write_ppm(const Image& image, const std::filesystem::path& path);

}  // namespace chairsynth
