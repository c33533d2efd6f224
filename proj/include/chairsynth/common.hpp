#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <filesystem>
#include <stdexcept>
#include <string>

namespace chairsynth {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

// Base class for every error raised by the library. Callers that only care
// about "something went wrong" catch this; the subclasses carry intent.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file or config value.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Input violates a documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Lookup of an id/name that does not exist.
class NotFound : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// Euler triple in degrees: applied Z first, then X, then Y.
Quat euler_zxy_deg(const Vec3& deg);

}  // namespace chairsynth
