#pragma once

// Time-of-flight proximity sensors modelled as ideal rays cast against
// spherical targets.

#include "tropism/common.hpp"
#include "tropism/kinematics.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace tropism {

struct SensorMount {
  std::size_t section_index = 2;
  double axial_offset = 1.0;  // fraction of the section arc
  double azimuth = 0.0;       // in the local cross-section frame
  double tilt = kPi / 4.0;    // from the local tangent toward the outward radial
};

// Three mounts around the tip of the distal section.
inline std::vector<SensorMount> default_mounts(const ArmGeometry& geom) {
  std::vector<SensorMount> mounts;
  for (double a : kTendonAzimuths) mounts.push_back({geom.distal_index(), 1.0, a, kPi / 4.0});
  return mounts;
}

struct Ray {
  Vec3 origin = Vec3::Zero();
  Vec3 direction = Vec3::UnitZ();
};

struct SensorReading {
  int sensor_id = 1;  // 1-based
  std::optional<double> distance;
  long step = 0;

  bool detected() const { return distance.has_value(); }
};

struct SensorSettings {
  double range_max = 2.0;     // m
  double noise_stddev = 0.0;  // m, additive Gaussian

  void validate() const {
    if (!(range_max > 0.0)) throw ValidationError("sensors.range_max must be positive");
    if (!(noise_stddev >= 0.0)) throw ValidationError("sensors.noise_stddev must be >= 0");
  }
};

inline Ray sensor_ray(const ArmGeometry& geom, const ArmPose& pose, const SensorMount& mount) {
  const Transform frame = frame_along(pose, mount.section_index, mount.axial_offset);
  const Eigen::Matrix3d& r = frame.linear();
  const Vec3 radial = (std::cos(mount.azimuth) * r.col(0) + std::sin(mount.azimuth) * r.col(1)).normalized();
  const Vec3 tangent = r.col(2).normalized();
  Ray ray;
  ray.origin = frame.translation() + geom.sections.at(mount.section_index).radius() * radial;
  ray.direction = (std::cos(mount.tilt) * tangent + std::sin(mount.tilt) * radial).normalized();
  return ray;
}

// Distance along the ray to the sphere surface; 0 when the origin is inside.
inline std::optional<double> ray_sphere_distance(const Ray& ray, const Vec3& center, double radius) {
  if (!(radius > 0.0)) throw InvalidInput("sphere radius must be positive");
  const Vec3 oc = ray.origin - center;
  const double c = oc.squaredNorm() - radius * radius;
  if (c <= 0.0) return 0.0;
  const double b = ray.direction.dot(oc);
  if (b >= 0.0) return std::nullopt;  // outside and pointing away
  const double disc = b * b - c;
  if (disc < 0.0) return std::nullopt;
  // both roots positive here; take the nearer via the stable form c / (-b + sqrt)
  return c / (-b + std::sqrt(disc));
}

inline std::optional<double> cast(const Ray& ray, std::span<const Target> targets) {
  std::optional<double> best;
  for (const auto& t : targets) {
    const auto d = ray_sphere_distance(ray, t.center, t.radius);
    if (d && (!best || *d < *best)) best = d;
  }
  return best;
}

inline std::vector<SensorReading> read_sensors(const ArmGeometry& geom, const ArmPose& pose,
                                               std::span<const SensorMount> mounts, std::span<const Target> targets,
                                               const SensorSettings& settings, std::mt19937_64* rng = nullptr,
                                               long step = 0) {
  std::vector<SensorReading> readings;
  readings.reserve(mounts.size());
  for (std::size_t i = 0; i < mounts.size(); ++i) {
    SensorReading reading{static_cast<int>(i) + 1, std::nullopt, step};
    auto d = cast(sensor_ray(geom, pose, mounts[i]), targets);
    if (d && settings.noise_stddev > 0.0 && rng != nullptr) {
      std::normal_distribution<double> noise(0.0, settings.noise_stddev);
      d = std::max(0.0, *d + noise(*rng));
    }
    if (d && *d <= settings.range_max) reading.distance = d;
    readings.push_back(reading);
  }
  return readings;
}

struct BestReading {
  int sensor_id = 0;
  double distance = std::numeric_limits<double>::infinity();
};

// Closest detection; ties go to the lowest sensor id.
inline std::optional<BestReading> min_reading(std::span<const SensorReading> readings) {
  std::optional<BestReading> best;
  for (const auto& r : readings) {
    if (!r.distance) continue;
    if (!best || *r.distance < best->distance ||
        (*r.distance == best->distance && r.sensor_id < best->sensor_id))
      best = BestReading{r.sensor_id, *r.distance};
  }
  return best;
}

}  // namespace tropism
