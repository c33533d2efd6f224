#pragma once

#include "chairsynth/scene.hpp"

#include <optional>

namespace chairsynth {

constexpr int kImageWidth = 1280;
constexpr int kImageHeight = 720;

struct Pixel {
  double x = 0.0;
  double y = 0.0;
};

struct Ray {
  Vec3 origin;
  Vec3 direction;  // unit length
};

// Pinhole camera. Local +Z looks forward, +Y is up; vertical FOV in degrees.
struct CameraModel {
  Vec3 position = Vec3::Zero();
  Quat rotation = Quat::Identity();
  double fov_deg = 60.0;
  double focal_length_mm = 20.0;  // metadata only
  int width = kImageWidth;
  int height = kImageHeight;

  static CameraModel from_sample(const CameraSample& s);

  Vec3 forward() const { return rotation * Vec3::UnitZ(); }
  Vec3 up() const { return rotation * Vec3::UnitY(); }
  Vec3 right() const { return forward().cross(up()); }
  double focal_px() const;

  // Projection without the frustum test; depth is along forward().
  Pixel project_unchecked(const Vec3& p, double* depth = nullptr) const;
  bool in_view(const Pixel& px, double depth) const;
  // Empty when the point is behind the camera or outside the image.
  std::optional<Pixel> project(const Vec3& p) const;
  Ray unproject(const Pixel& px) const;

  void validate() const;
};

}  // namespace chairsynth
