#include "chairsynth/render.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace chairsynth {

std::size_t Image::foreground_pixels() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i + 2 < rgb.size(); i += 3) {
    if (rgb[i] != kBackgroundLevel || rgb[i + 1] != kBackgroundLevel ||
        rgb[i + 2] != kBackgroundLevel) {
      ++n;
    }
  }
  return n;
}

namespace {

void dot(Image& img, double x, double y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const int cx = static_cast<int>(std::lround(x));
  const int cy = static_cast<int>(std::lround(y));
  for (int dy = -2; dy <= 2; ++dy) {
    for (int dx = -2; dx <= 2; ++dx) {
      const int px = cx + dx;
      const int py = cy + dy;
      if (px < 0 || py < 0 || px >= img.width || py >= img.height) {
        continue;
      }
      auto* p = &img.rgb[3 * (static_cast<std::size_t>(py) * img.width + px)];
      p[0] = r;
      p[1] = g;
      p[2] = b;
    }
  }
}

}  // namespace

Image render_debug_frame(const PosedScene& posed, const CameraModel& cam,
                         const AnnotatedFrame* frame) {
  Image img;
  img.width = cam.width;
  img.height = cam.height;
  img.rgb.assign(static_cast<std::size_t>(img.width) * img.height * 3, kBackgroundLevel);
  OcclusionTester tester(posed.geometry);
  constexpr double kFar = 60.0;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const Ray ray = cam.unproject({x + 0.5, y + 0.5});
      const double t = tester.nearest_hit(ray.origin, ray.origin + ray.direction, kFar, {});
      if (!(t < kFar)) {
        continue;
      }
      const double shade = 1.0 - std::min(t, kFar) / kFar;
      const auto level = static_cast<std::uint8_t>(std::lround(64.0 + 191.0 * shade));
      auto* p = &img.rgb[3 * (static_cast<std::size_t>(y) * img.width + x)];
      p[0] = p[1] = p[2] = level;
    }
  }
  if (frame != nullptr) {
    for (const auto& inst : frame->instances) {
      for (const auto& kp : inst.keypoints) {
        if (kp.v == Visibility::Visible) {
          dot(img, kp.x, kp.y, 0, 220, 0);
        } else if (kp.v == Visibility::Occluded) {
          dot(img, kp.x, kp.y, 220, 0, 0);
        }
      }
    }
  }
  return img;
}

void write_ppm(const Image& image, const std::filesystem::path& path) {
  std::string data = "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) +
                     "\n255\n";
  data.append(reinterpret_cast<const char*>(image.rgb.data()), image.rgb.size());
  write_text_file(path, data);
}

}  // namespace chairsynth
