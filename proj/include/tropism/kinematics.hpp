#pragma once

// Piecewise-constant-curvature forward model of a three-tendon modular arm.
//
// Each section bends as a circular arc whose curvature, bending-plane azimuth
// and arc length follow from its three tendon lengths. Section transforms are
// composed base to tip to produce the backbone and tip pose.

#include "tropism/common.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace tropism {

inline constexpr std::array<double, 3> kTendonAzimuths{0.0, kTwoPi / 3.0, 2.0 * kTwoPi / 3.0};

struct SectionGeometry {
  double diameter = 0.050;     // plate diameter, m
  double unit_length = 0.042;  // rest height of one activation unit, m
  int units_per_section = 2;
  std::array<double, 3> tendon_azimuths = kTendonAzimuths;

  double rest_length() const { return unit_length * units_per_section; }
  double radius() const { return 0.5 * diameter; }

  void validate() const {
    if (!(diameter > 0.0)) throw InvalidInput("section diameter must be positive");
    if (!(unit_length > 0.0)) throw InvalidInput("section unit_length must be positive");
    if (units_per_section < 1) throw InvalidInput("units_per_section must be >= 1");
    for (std::size_t i = 0; i < 3; ++i) {
      if (std::abs(tendon_azimuths[i] - kTendonAzimuths[i]) > 1e-12)
        throw InvalidInput("tendon azimuths must be {0, 2pi/3, 4pi/3}");
    }
  }
};

struct ArmGeometry {
  std::vector<SectionGeometry> sections;  // base -> tip
  Transform base_pose = Transform::Identity();

  // Three sections of two 42 mm units, tapering 50 -> 45 -> 40 mm.
  static ArmGeometry default_arm() {
    ArmGeometry arm;
    for (double d : {0.050, 0.045, 0.040}) arm.sections.push_back(SectionGeometry{d, 0.042, 2, kTendonAzimuths});
    return arm;
  }

  std::size_t section_count() const { return sections.size(); }
  std::size_t distal_index() const { return sections.size() - 1; }

  double total_rest_length() const {
    double total = 0.0;
    for (const auto& s : sections) total += s.rest_length();
    return total;
  }

  void validate() const {
    if (sections.empty()) throw InvalidInput("arm must have at least one section");
    for (std::size_t i = 0; i < sections.size(); ++i) {
      sections[i].validate();
      if (i > 0 && sections[i].diameter > sections[i - 1].diameter)
        throw InvalidInput("section diameters must be non-increasing from base to tip");
    }
  }
};

struct TendonLengths {
  std::array<double, 3> l{};

  double& operator[](std::size_t i) { return l[i]; }
  double operator[](std::size_t i) const { return l[i]; }
  double sum() const { return l[0] + l[1] + l[2]; }

  static TendonLengths uniform(double length) { return {{length, length, length}}; }
};

struct SectionShape {
  double kappa = 0.0;      // 1/m
  double phi = 0.0;        // bending-plane azimuth in [0, 2pi)
  double arc_length = 0.0; // m

  double bend() const { return kappa * arc_length; }
};

struct ArmPose {
  std::vector<SectionShape> shapes;
  // frames[i] is the base frame of section i; frames.back() is the tip frame.
  std::vector<Transform> frames;
  std::vector<Vec3> backbone;
  // backbone index of the first sample belonging to each section (after its base point)
  std::vector<std::size_t> section_first_sample;
  Vec3 tip_position = Vec3::Zero();
  Vec3 tip_tangent = Vec3::UnitZ();
};

// Rest lengths of every tendon, one triplet per section.
inline std::vector<TendonLengths> rest_lengths(const ArmGeometry& geom) {
  std::vector<TendonLengths> rest;
  rest.reserve(geom.sections.size());
  for (const auto& s : geom.sections) rest.push_back(TendonLengths::uniform(s.rest_length()));
  return rest;
}

// Curvature magnitude from the three tendon lengths and the section diameter.
// The squared-difference form is algebraically identical to the expanded
// quadratic and stays exact for equal lengths. Terms are summed in sorted
// order so that every permutation of the inputs yields the same bits.
inline double tendon_curvature(const TendonLengths& lengths, double diameter) {
  std::array<double, 3> sorted = lengths.l;
  std::sort(sorted.begin(), sorted.end());
  std::array<double, 3> sq{};
  sq[0] = (sorted[1] - sorted[0]) * (sorted[1] - sorted[0]);
  sq[1] = (sorted[2] - sorted[1]) * (sorted[2] - sorted[1]);
  sq[2] = (sorted[2] - sorted[0]) * (sorted[2] - sorted[0]);
  std::sort(sq.begin(), sq.end());
  const double radicand = 0.5 * ((sq[0] + sq[1]) + sq[2]);
  const double total = (sorted[0] + sorted[1]) + sorted[2];
  return 2.0 * std::sqrt(radicand) / (diameter * total);
}

inline SectionShape section_shape(const TendonLengths& lengths, const SectionGeometry& geom) {
  for (double v : lengths.l) {
    if (!(v > 0.0)) throw InvalidInput("tendon lengths must be strictly positive");
  }
  if (!(geom.diameter > 0.0)) throw InvalidInput("section diameter must be positive");
  const double total = lengths.sum();
  if (!(total > 0.0)) throw InvalidInput("degenerate tendon length sum");

  SectionShape shape;
  shape.kappa = tendon_curvature(lengths, geom.diameter);
  shape.arc_length = total / 3.0;
  if (shape.kappa == 0.0) {
    shape.phi = 0.0;
  } else {
    const double y = std::sqrt(3.0) * (lengths[2] - lengths[1]);
    const double x = lengths[1] + lengths[2] - 2.0 * lengths[0];
    shape.phi = wrap_two_pi(std::atan2(y, x));
  }
  return shape;
}

namespace detail {

inline constexpr double kSeriesThreshold = 1e-6;

// In-plane arc offsets (radial, axial) at arc position s for curvature kappa.
inline std::pair<double, double> arc_offsets(double kappa, double s) {
  const double theta = kappa * s;
  if (theta < kSeriesThreshold) {
    const double t2 = theta * theta;
    return {s * (theta / 2.0 - theta * t2 / 24.0), s * (1.0 - t2 / 6.0)};
  }
  return {(1.0 - std::cos(theta)) / kappa, std::sin(theta) / kappa};
}

}  // namespace detail

// Rigid transform from a section's base frame to the frame at arc position
// `s` along it (s = shape.arc_length gives the section tip).
inline Transform arc_transform(const SectionShape& shape, double s) {
  const auto [radial, axial] = detail::arc_offsets(shape.kappa, s);
  const double c = std::cos(shape.phi);
  const double sn = std::sin(shape.phi);
  Transform t = Transform::Identity();
  t.translation() = Vec3(c * radial, sn * radial, axial);
  const double theta = shape.kappa * s;
  if (theta != 0.0) t.linear() = Eigen::AngleAxisd(theta, Vec3(-sn, c, 0.0)).toRotationMatrix();
  return t;
}

inline Transform section_transform(const SectionShape& shape) {
  if (!(shape.kappa >= 0.0) || !(shape.arc_length > 0.0))
    throw InvalidInput("section shape requires kappa >= 0 and arc_length > 0");
  return arc_transform(shape, shape.arc_length);
}

inline ArmPose forward_kinematics(const ArmGeometry& geom, std::span<const TendonLengths> lengths,
                                  int samples_per_section = 20) {
  if (lengths.size() != geom.sections.size())
    throw InvalidInput("expected one tendon triplet per section, got " + std::to_string(lengths.size()) + " for " +
                       std::to_string(geom.sections.size()) + " sections");
  if (samples_per_section < 10) throw InvalidInput("samples_per_section must be >= 10");

  ArmPose pose;
  pose.shapes.reserve(geom.sections.size());
  pose.frames.reserve(geom.sections.size() + 1);
  pose.backbone.reserve(geom.sections.size() * samples_per_section + 1);

  Transform frame = geom.base_pose;
  pose.frames.push_back(frame);
  pose.backbone.push_back(frame.translation());

  for (std::size_t i = 0; i < geom.sections.size(); ++i) {
    SectionShape shape;
    try {
      shape = section_shape(lengths[i], geom.sections[i]);
    } catch (const InvalidInput& e) {
      throw InvalidInput("section " + std::to_string(i) + ": " + e.what());
    }
    // spacing never coarser than one activation unit
    const int samples = std::max(samples_per_section, geom.sections[i].units_per_section);
    pose.section_first_sample.push_back(pose.backbone.size());
    for (int k = 1; k <= samples; ++k) {
      const double s = shape.arc_length * static_cast<double>(k) / samples;
      pose.backbone.push_back((frame * arc_transform(shape, s)).translation());
    }
    frame = frame * arc_transform(shape, shape.arc_length);
    pose.frames.push_back(frame);
    pose.shapes.push_back(shape);
  }
  pose.tip_position = frame.translation();
  pose.backbone.back() = pose.tip_position;
  pose.tip_tangent = frame.linear().col(2).normalized();
  return pose;
}

inline ArmPose forward_kinematics(const ArmGeometry& geom, const std::vector<TendonLengths>& lengths,
                                  int samples_per_section = 20) {
  return forward_kinematics(geom, std::span<const TendonLengths>(lengths), samples_per_section);
}

// Frame at a fraction [0, 1] of the arc of one section.
inline Transform frame_along(const ArmPose& pose, std::size_t section, double fraction) {
  const auto& shape = pose.shapes.at(section);
  return pose.frames.at(section) * arc_transform(shape, std::clamp(fraction, 0.0, 1.0) * shape.arc_length);
}

// Angle between the base->tip chord and the base z axis.
inline double bending_angle(const ArmPose& pose) {
  if (pose.frames.empty()) throw InvalidInput("pose has no frames");
  const Transform& base = pose.frames.front();
  const Vec3 chord = pose.tip_position - base.translation();
  const double n = chord.norm();
  if (n < 1e-12) throw InvalidInput("bending angle undefined: tip coincides with base");
  const double c = std::clamp(chord.dot(base.linear().col(2)) / n, -1.0, 1.0);
  return std::acos(c);
}

}  // namespace tropism
