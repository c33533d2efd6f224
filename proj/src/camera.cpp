#include "chairsynth/camera.hpp"

#include <cmath>

namespace chairsynth {

CameraModel CameraModel::from_sample(const CameraSample& s) {
  CameraModel c;
  c.position = s.position;
  c.rotation = euler_zxy_deg(s.rotation_deg);
  c.fov_deg = s.fov_deg;
  c.focal_length_mm = s.focal_length_mm;
  c.validate();
  return c;
}

void CameraModel::validate() const {
  if (!(fov_deg > 0.0 && fov_deg < 180.0)) {
    throw InvalidArgument("camera FOV must lie in (0, 180) degrees");
  }
  if (width <= 0 || height <= 0) {
    throw InvalidArgument("camera resolution must be positive");
  }
}

double CameraModel::focal_px() const { return 0.5 * height / std::tan(deg2rad(fov_deg) / 2.0); }

Pixel CameraModel::project_unchecked(const Vec3& p, double* depth) const {
  const Vec3 rel = p - position;
  const double z = rel.dot(forward());
  const double f = focal_px();
  if (depth != nullptr) {
    *depth = z;
  }
  return {0.5 * width + f * rel.dot(right()) / z, 0.5 * height - f * rel.dot(up()) / z};
}

bool CameraModel::in_view(const Pixel& px, double depth) const {
  return depth > 0.0 && px.x >= 0.0 && px.x <= width && px.y >= 0.0 && px.y <= height;
}

std::optional<Pixel> CameraModel::project(const Vec3& p) const {
  double depth = 0.0;
  const Pixel px = project_unchecked(p, &depth);
  if (!in_view(px, depth)) {
    return std::nullopt;
  }
  return px;
}

Ray CameraModel::unproject(const Pixel& px) const {
  const double f = focal_px();
  const Vec3 dir = forward() * f + right() * (px.x - 0.5 * width) - up() * (px.y - 0.5 * height);
  return {position, dir.normalized()};
}

}  // namespace chairsynth
