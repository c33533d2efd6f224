#include "chairsynth/common.hpp"

#include <fstream>
#include <sstream>

namespace chairsynth {

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out << text;
  out.flush();
  if (!out) {
    throw IoError("write failed for " + path.string());
  }
}

Quat euler_zxy_deg(const Vec3& deg) {
  const Quat qx(Eigen::AngleAxisd(deg2rad(deg.x()), Vec3::UnitX()));
  const Quat qy(Eigen::AngleAxisd(deg2rad(deg.y()), Vec3::UnitY()));
  const Quat qz(Eigen::AngleAxisd(deg2rad(deg.z()), Vec3::UnitZ()));
  return (qy * qx * qz).normalized();
}

}  // namespace chairsynth
