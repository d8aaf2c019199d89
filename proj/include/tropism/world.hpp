#pragma once

// Targets, contact, and the observable / reachable workspace partition.

#include "tropism/actuation.hpp"
#include "tropism/common.hpp"
#include "tropism/kinematics.hpp"
#include "tropism/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace tropism {

enum class WorkspaceClass { Unobservable, ObservableUnreachable, ObservableReachable };

inline std::string to_string(WorkspaceClass c) {
  switch (c) {
    case WorkspaceClass::Unobservable: return "unobservable";
    case WorkspaceClass::ObservableUnreachable: return "observable_unreachable";
    case WorkspaceClass::ObservableReachable: return "observable_reachable";
  }
  return "unknown";
}

struct Scenario {
  std::string label;
  std::vector<Target> targets;
};

// Signed distance from the backbone to the sphere surface (negative inside).
inline double surface_clearance(const ArmPose& pose, const Target& target) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : pose.backbone) best = std::min(best, (p - target.center).norm() - target.radius);
  return best;
}

inline bool contact_check(const ArmPose& pose, const Target& target, double eps) {
  if (!(eps >= 0.0)) throw InvalidInput("contact eps must be >= 0");
  return surface_clearance(pose, target) <= eps;
}

// Max tip radius from the base per (azimuth, polar) direction bin, read back
// with bilinear interpolation between bin centres. Empty bins read as 0.
class RadialBound {
 public:
  RadialBound(int azimuth_bins = 36, int polar_bins = 18)
      : az_bins_(azimuth_bins), pol_bins_(polar_bins), radius_(static_cast<std::size_t>(az_bins_ * pol_bins_), 0.0) {}

  void add(const Vec3& p) {
    const double r = p.norm();
    if (r <= 0.0) return;
    const auto [ia, ip] = bin_of(p);
    double& slot = radius_[index(ia, ip)];
    slot = std::max(slot, r);
    max_radius_ = std::max(max_radius_, r);
  }

  double operator()(const Vec3& direction) const {
    const Vec3 d = direction.normalized();
    const double fa = wrap_two_pi(std::atan2(d.y(), d.x())) / kTwoPi * az_bins_ - 0.5;
    const double fp = std::acos(std::clamp(d.z(), -1.0, 1.0)) / kPi * pol_bins_ - 0.5;
    const int a0 = static_cast<int>(std::floor(fa));
    const int p0 = static_cast<int>(std::floor(fp));
    const double ta = fa - a0;
    const double tp = fp - p0;
    auto at = [&](int a, int p) {
      a = ((a % az_bins_) + az_bins_) % az_bins_;
      p = std::clamp(p, 0, pol_bins_ - 1);
      return radius_[index(a, p)];
    };
    return (1 - ta) * (1 - tp) * at(a0, p0) + ta * (1 - tp) * at(a0 + 1, p0) + (1 - ta) * tp * at(a0, p0 + 1) +
           ta * tp * at(a0 + 1, p0 + 1);
  }

  double max_radius() const { return max_radius_; }

 private:
  std::pair<int, int> bin_of(const Vec3& p) const {
    const Vec3 d = p.normalized();
    int ia = static_cast<int>(wrap_two_pi(std::atan2(d.y(), d.x())) / kTwoPi * az_bins_);
    int ip = static_cast<int>(std::acos(std::clamp(d.z(), -1.0, 1.0)) / kPi * pol_bins_);
    return {std::clamp(ia, 0, az_bins_ - 1), std::clamp(ip, 0, pol_bins_ - 1)};
  }
  std::size_t index(int a, int p) const { return static_cast<std::size_t>(p * az_bins_ + a); }

  int az_bins_;
  int pol_bins_;
  std::vector<double> radius_;
  double max_radius_ = 0.0;
};

struct ReachableWorkspace {
  std::vector<Vec3> cloud;      // tip positions relative to the world frame
  std::vector<ArmPose> poses;   // one per cloud point
  RadialBound bound;
  double max_bending_angle = 0.0;
  int psi_samples = 0;        // poses are laid out amplitude-major
  int amplitude_samples = 0;
};

// Tip sweep over psi in [0, 2pi) x amplitude in [0, a_max], no antagonist.
inline ReachableWorkspace reachable_workspace(const ArmGeometry& geom, const ActuationConfig& actuation, double a_max,
                                              int psi_samples, int amplitude_samples) {
  if (psi_samples < 8 || amplitude_samples < 8) throw InvalidInput("workspace resolution must be >= 8 per axis");
  const auto rest = rest_lengths(geom);
  ReachableWorkspace ws;
  ws.psi_samples = psi_samples;
  ws.amplitude_samples = amplitude_samples;
  const Vec3 base = geom.base_pose.translation();
  for (int j = 0; j < amplitude_samples; ++j) {
    const double amp = a_max * static_cast<double>(j) / (amplitude_samples - 1);
    for (int i = 0; i < psi_samples; ++i) {
      const double psi = kTwoPi * static_cast<double>(i) / psi_samples;
      const auto cmd = compose_command(psi, amp, AntagonistMode::none(), 0.0, 1.0, actuation);
      ArmPose pose = forward_kinematics(geom, apply_command(geom, rest, cmd));
      ws.cloud.push_back(pose.tip_position);
      ws.bound.add(pose.tip_position - base);
      ws.max_bending_angle = std::max(ws.max_bending_angle, bending_angle(pose));
      ws.poses.push_back(std::move(pose));
    }
  }
  return ws;
}

// Sensor rays at every pose the exploration phase visits.
struct ExplorationSweep {
  std::vector<ArmPose> poses;
  std::vector<std::vector<Ray>> rays;
};

inline ExplorationSweep make_sweep(const ArmGeometry& geom, std::span<const SensorMount> mounts,
                                   std::vector<ArmPose> poses) {
  ExplorationSweep sweep;
  sweep.rays.reserve(poses.size());
  for (const auto& pose : poses) {
    std::vector<Ray> rays;
    for (const auto& m : mounts) rays.push_back(sensor_ray(geom, pose, m));
    sweep.rays.push_back(std::move(rays));
  }
  sweep.poses = std::move(poses);
  return sweep;
}

inline bool observed_in_sweep(const Target& target, const ExplorationSweep& sweep, double range_max) {
  const std::span<const Target> one(&target, 1);
  for (const auto& rays : sweep.rays)
    for (const auto& ray : rays)
      if (const auto d = cast(ray, one); d && *d <= range_max) return true;
  return false;
}

inline WorkspaceClass classify_target(const Target& target, const ReachableWorkspace& workspace,
                                      const ExplorationSweep& sweep, double range_max, double eps) {
  target.validate();
  if (!observed_in_sweep(target, sweep, range_max)) return WorkspaceClass::Unobservable;
  for (const auto& pose : workspace.poses)
    if (contact_check(pose, target, eps)) return WorkspaceClass::ObservableReachable;
  for (const auto& pose : sweep.poses)
    if (contact_check(pose, target, eps)) return WorkspaceClass::ObservableReachable;
  return WorkspaceClass::ObservableUnreachable;
}

enum class SuiteKind { Large5, Small13 };

inline std::string to_string(SuiteKind k) { return k == SuiteKind::Large5 ? "large5" : "small13"; }

struct SuiteContext {
  const ArmGeometry* geom = nullptr;
  const ReachableWorkspace* workspace = nullptr;
  const ExplorationSweep* sweep = nullptr;
  double range_max = 2.0;
  double contact_eps = 0.005;
  std::size_t steps_per_rotation = 100;
};

struct SuitePlacement {
  Scenario scenario;
  WorkspaceClass expected;
};

// Stratified synthetic placements: reachable targets touch a sampled
// workspace pose, observable-unreachable ones sit along an exploration sensor
// ray, unobservable ones lie beyond range or below the base. Every placement
// is verified with classify_target and redrawn on mismatch.
inline std::vector<SuitePlacement> target_suite(SuiteKind kind, std::uint64_t seed, const SuiteContext& ctx) {
  if (!ctx.geom || !ctx.workspace || !ctx.sweep || ctx.workspace->poses.empty() || ctx.sweep->poses.empty())
    throw InvalidInput("target suite needs a precomputed workspace and exploration sweep");

  const bool large = kind == SuiteKind::Large5;
  const double radius = large ? 0.080 : 0.050;
  const int n_reach = large ? 2 : 6;
  const int n_unreach = large ? 2 : 5;
  const int n_unobs = large ? 1 : 2;

  std::mt19937_64 rng(seed ^ (large ? 0x9e3779b97f4a7c15ULL : 0xc2b2ae3d27d4eb4fULL));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Vec3 base = ctx.geom->base_pose.translation();
  const auto& ws = *ctx.workspace;
  const auto& sweep = *ctx.sweep;

  auto classify = [&](const Target& t) { return classify_target(t, ws, sweep, ctx.range_max, ctx.contact_eps); };

  const auto psi_samples = static_cast<std::size_t>(ws.psi_samples);
  const auto amp_samples = static_cast<std::size_t>(ws.amplitude_samples);

  auto draw_reachable = [&](int j) {
    const double az = kTwoPi * (j + unit(rng)) / n_reach;
    // heights stratified through the amplitude range
    const double frac = 0.35 + 0.65 * (j + unit(rng)) / n_reach;
    const auto ia = std::min(amp_samples - 1, static_cast<std::size_t>(frac * (amp_samples - 1) + 0.5));
    const auto ip = static_cast<std::size_t>(az / kTwoPi * psi_samples) % psi_samples;
    const ArmPose& pose = ws.poses[ia * psi_samples + ip];
    Vec3 outward = pose.tip_position - base;
    outward.z() = 0.0;
    if (outward.norm() < 1e-9) outward = Vec3(std::cos(az), std::sin(az), 0.0);
    const Vec3 n = (pose.tip_tangent + (0.2 + 0.8 * unit(rng)) * outward.normalized()).normalized();
    const double gap = ctx.contact_eps * (unit(rng) - 0.5);
    return Target{pose.tip_position + (radius + gap) * n, radius};
  };

  auto draw_unreachable = [&](int j) {
    const double az = kTwoPi * (j + unit(rng)) / n_unreach;
    const std::size_t per_rotation = std::clamp<std::size_t>(ctx.steps_per_rotation, 1, sweep.poses.size());
    const std::size_t rotations = sweep.poses.size() / per_rotation;
    const std::size_t rot = static_cast<std::size_t>(unit(rng) * rotations) % rotations;
    const std::size_t step = static_cast<std::size_t>(az / kTwoPi * per_rotation) % per_rotation;
    const auto& rays = sweep.rays[std::min(sweep.rays.size() - 1, rot * per_rotation + step)];
    const Ray& ray = rays[static_cast<std::size_t>(unit(rng) * rays.size()) % rays.size()];
    // distances stratified over the sensing range
    const double d = 0.20 + 1.30 * (j + unit(rng)) / n_unreach;
    return Target{ray.origin + (d + radius) * ray.direction, radius};
  };

  auto draw_unobservable = [&](int j) {
    const double az = kTwoPi * (j + unit(rng)) / n_unobs;
    const Vec3 horizontal(std::cos(az), std::sin(az), 0.0);
    if (j % 2 == 0) {
      const double elevation = 0.6 * unit(rng);
      const double dist = 2.4 + 0.6 * unit(rng);
      Vec3 dir = std::cos(elevation) * horizontal + std::sin(elevation) * Vec3::UnitZ();
      return Target{base + dist * dir, radius};
    }
    const double reach = 0.05 + 0.15 * unit(rng);
    return Target{base + reach * horizontal - (0.4 + 0.4 * unit(rng)) * Vec3::UnitZ(), radius};
  };

  struct Slot {
    WorkspaceClass cls;
    int stratum;
  };
  std::vector<Slot> slots;
  // interleave classes so labels do not encode the class ordering
  for (int j = 0; j < std::max({n_reach, n_unreach, n_unobs}); ++j) {
    if (j < n_reach) slots.push_back({WorkspaceClass::ObservableReachable, j});
    if (j < n_unreach) slots.push_back({WorkspaceClass::ObservableUnreachable, j});
    if (j < n_unobs) slots.push_back({WorkspaceClass::Unobservable, j});
  }

  std::vector<SuitePlacement> out;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const Slot& slot = slots[i];
    Target t;
    bool ok = false;
    for (int attempt = 0; attempt < 500 && !ok; ++attempt) {
      switch (slot.cls) {
        case WorkspaceClass::ObservableReachable: t = draw_reachable(slot.stratum); break;
        case WorkspaceClass::ObservableUnreachable: t = draw_unreachable(slot.stratum); break;
        case WorkspaceClass::Unobservable: t = draw_unobservable(slot.stratum); break;
      }
      ok = classify(t) == slot.cls;
    }
    if (!ok) throw Error("could not place a " + to_string(slot.cls) + " target for suite " + to_string(kind));
    char label[32];
    std::snprintf(label, sizeof label, "%s-%02zu", to_string(kind).c_str(), i);
    out.push_back({Scenario{label, {t}}, slot.cls});
  }
  return out;
}

}  // namespace tropism
