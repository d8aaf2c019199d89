#pragma once

#include <Eigen/Geometry>

#include <numbers>
#include <stdexcept>
#include <string>

namespace tropism {

using Vec3 = Eigen::Vector3d;
using Transform = Eigen::Isometry3d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument to a pure operation (non-positive length, negative curvature, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A tendon command that cannot be applied to the arm.
class InvalidCommand : public Error {
 public:
  using Error::Error;
};

// Configuration or CLI input rejected before any simulation step runs.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Filesystem failure; the message carries the offending path.
class IoError : public Error {
 public:
  using Error::Error;
};

// Spherical stimulus placed in the world.
struct Target {
  Vec3 center = Vec3::Zero();
  double radius = 0.05;

  void validate() const {
    if (!(radius > 0.0)) throw InvalidInput("target radius must be positive");
  }
};

// Wraps an angle to [0, 2*pi).
inline double wrap_two_pi(double angle) {
  double wrapped = std::fmod(angle, kTwoPi);
  if (wrapped < 0.0) wrapped += kTwoPi;
  if (wrapped >= kTwoPi) wrapped = 0.0;
  return wrapped;
}

}  // namespace tropism
