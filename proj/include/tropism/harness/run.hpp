#pragma once

// End-to-end scenario execution: controller, plant and sensors in a loop,
// with one metrics sample per control step.

#include "tropism/controller.hpp"
#include "tropism/harness/config.hpp"
#include "tropism/kinematics.hpp"
#include "tropism/sensing.hpp"
#include "tropism/world.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace tropism {

// Precomputed per-configuration geometry shared by every scenario run.
struct Environment {
  ReachableWorkspace workspace;
  ExplorationSweep sweep;
};

inline Environment prepare_environment(const ExperimentConfig& cfg) {
  Environment env;
  env.workspace = reachable_workspace(cfg.arm, cfg.actuation, cfg.controller.a_max, cfg.harness.workspace_psi_samples,
                                      cfg.harness.workspace_amplitude_samples);
  env.sweep = make_sweep(cfg.arm, cfg.mounts, exploration_poses(cfg.arm, cfg.controller, cfg.actuation));
  return env;
}

inline SuiteContext suite_context(const ExperimentConfig& cfg, const Environment& env) {
  SuiteContext ctx;
  ctx.geom = &cfg.arm;
  ctx.workspace = &env.workspace;
  ctx.sweep = &env.sweep;
  ctx.range_max = cfg.sensors.range_max;
  ctx.contact_eps = cfg.controller.contact_eps;
  ctx.steps_per_rotation = static_cast<std::size_t>(cfg.controller.steps_per_rotation);
  return ctx;
}

// Scenario-level class: the most favourable class among its targets.
inline WorkspaceClass classify_scenario(const Scenario& s, const ExperimentConfig& cfg, const Environment& env) {
  WorkspaceClass best = WorkspaceClass::Unobservable;
  for (const auto& t : s.targets) {
    const auto c = classify_target(t, env.workspace, env.sweep, cfg.sensors.range_max, cfg.controller.contact_eps);
    if (static_cast<int>(c) > static_cast<int>(best)) best = c;
  }
  return best;
}

struct MetricsSample {
  long step = 0;
  double t = 0.0;  // s
  std::string phase;
  Vec3 tip_position = Vec3::Zero();
  double tip_speed = 0.0;  // m/s
  std::vector<double> kappa;  // per section
  double bending_angle = 0.0;
  double psi = 0.0;
  double amplitude = 0.0;
  std::optional<double> sensed_distance;
  std::optional<double> true_distance;
};

struct Trace {
  std::string label;
  std::string mode;
  nlohmann::json config;
  std::vector<MetricsSample> samples;
  std::vector<PhaseEvent> events;
  WorkspaceClass workspace_class = WorkspaceClass::Unobservable;
  std::string outcome;  // contact | failed | explored
  std::vector<KnowledgeEntry> knowledge;

  // Least ground-truth distance over the reaching samples (over all samples
  // when the run never reached); empty without targets.
  std::optional<double> best_distance() const {
    std::optional<double> best;
    bool any_reaching = false;
    for (const auto& s : samples) any_reaching = any_reaching || s.phase == "reaching";
    for (const auto& s : samples) {
      if (any_reaching && s.phase != "reaching") continue;
      if (s.true_distance && (!best || *s.true_distance < *best)) best = s.true_distance;
    }
    return best;
  }
};

// Ground-truth gap between the arm and the nearest target surface: the
// backbone and the sensor heads both count as the arm. Clamped at 0.
inline std::optional<double> true_distance(const ArmPose& pose, std::span<const Ray> sensor_rays,
                                           std::span<const Target> targets) {
  if (targets.empty()) return std::nullopt;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& t : targets) {
    best = std::min(best, surface_clearance(pose, t));
    for (const auto& r : sensor_rays) best = std::min(best, (r.origin - t.center).norm() - t.radius);
  }
  return std::max(0.0, best);
}

struct RunOptions {
  bool exploration_only = false;
};

inline Trace run_scenario(const Scenario& scenario, const ExperimentConfig& cfg, const Environment& env,
                          std::uint64_t seed, RunOptions options = {}) {
  Trace trace;
  trace.label = scenario.label;
  trace.mode = to_string(cfg.controller.mode.kind);
  trace.config = to_json(cfg);
  trace.workspace_class = classify_scenario(scenario, cfg, env);

  Controller controller(cfg.controller, cfg.actuation);
  std::mt19937_64 rng(seed);
  const auto rest = rest_lengths(cfg.arm);
  Vec3 previous_tip = forward_kinematics(cfg.arm, rest).tip_position;

  const long exploration_steps = static_cast<long>(cfg.controller.steps_per_rotation) * cfg.controller.rotations;
  const long step_cap = exploration_steps + static_cast<long>(cfg.controller.a_max / cfg.controller.reach_rate) +
                        cfg.controller.max_reach_steps + 16;

  std::optional<Observation> obs;
  for (long step = 0;; ++step) {
    TickOutput out = controller.tick(obs);
    for (auto& e : out.events) trace.events.push_back(std::move(e));
    if (options.exploration_only && !std::holds_alternative<phase::Exploring>(controller.phase())) break;
    if (!out.command) break;
    if (step >= step_cap) throw Error("scenario '" + scenario.label + "' exceeded the step budget");

    const auto lengths = apply_command(cfg.arm, rest, *out.command);
    const ArmPose pose = forward_kinematics(cfg.arm, lengths);
    auto readings = read_sensors(cfg.arm, pose, cfg.mounts, scenario.targets, cfg.sensors, &rng, step);
    std::vector<Ray> rays;
    for (const auto& m : cfg.mounts) rays.push_back(sensor_ray(cfg.arm, pose, m));

    bool contact = false;
    for (const auto& t : scenario.targets) contact = contact || contact_check(pose, t, cfg.controller.contact_eps);

    MetricsSample sample;
    sample.step = step;
    sample.t = static_cast<double>(step + 1) * cfg.harness.dt;
    sample.phase = phase_name(controller.phase());
    sample.tip_position = pose.tip_position;
    sample.tip_speed = (pose.tip_position - previous_tip).norm() / cfg.harness.dt;
    for (const auto& l : lengths) sample.kappa.push_back(section_shape(l, cfg.arm.sections[sample.kappa.size()]).kappa);
    sample.bending_angle = bending_angle(pose);
    sample.psi = out.psi;
    sample.amplitude = out.amplitude;
    if (const auto best = min_reading(readings)) sample.sensed_distance = best->distance;
    sample.true_distance = true_distance(pose, rays, scenario.targets);
    trace.samples.push_back(std::move(sample));
    previous_tip = pose.tip_position;

    obs = Observation{std::move(readings), contact, pose.shapes.back().kappa};
  }

  trace.knowledge = controller.knowledge().entries();
  if (options.exploration_only) {
    trace.outcome = "explored";
  } else {
    trace.outcome = std::holds_alternative<phase::Contact>(controller.phase()) ? "contact" : "failed";
  }
  return trace;
}

inline Scenario explicit_scenario(const ExperimentConfig& cfg) { return Scenario{"custom", cfg.targets}; }

inline std::vector<SuitePlacement> build_suite(const ExperimentConfig& cfg, const Environment& env,
                                               std::uint64_t seed) {
  return target_suite(cfg.suite.kind, seed, suite_context(cfg, env));
}

}  // namespace tropism
