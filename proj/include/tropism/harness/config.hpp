#pragma once

// Experiment configuration: a JSON document with nested sections. Every key
// is checked; unknown keys are rejected. Amplitude limits and the curvature
// normaliser are calibrated from the geometry unless given explicitly.

#include "tropism/actuation.hpp"
#include "tropism/common.hpp"
#include "tropism/controller.hpp"
#include "tropism/kinematics.hpp"
#include "tropism/sensing.hpp"
#include "tropism/world.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace tropism {

struct HarnessSettings {
  double dt = 0.1;  // s per control step
  int workspace_psi_samples = 36;
  int workspace_amplitude_samples = 12;
  int characterize_steps = 24;
};

struct CalibrationSettings {
  double bend_angle = kPi / 3.0;  // rad, max chord bending angle at a_max
  std::optional<double> a_max;
  std::optional<double> kappa_max;
  std::optional<double> a0;
  std::optional<double> delta_a;
};

struct SuiteSettings {
  SuiteKind kind = SuiteKind::Small13;
  std::optional<std::string> scenario;  // label picked by explore/reach
};

struct ExperimentConfig {
  ArmGeometry arm = ArmGeometry::default_arm();
  ActuationConfig actuation;
  std::vector<SensorMount> mounts = default_mounts(ArmGeometry::default_arm());
  SensorSettings sensors;
  ControllerConfig controller;
  double constant_restoring = 0.005;  // m, restoring length of the "constant" strategy
  CalibrationSettings calibration;
  HarnessSettings harness;
  SuiteSettings suite;
  std::vector<Target> targets;  // explicit scenario; overrides the suite when non-empty
};

inline AntagonistMode mode_from_name(const std::string& name, double constant_restoring) {
  if (name == "none") return AntagonistMode::none();
  if (name == "constant") return AntagonistMode::constant(constant_restoring);
  if (name == "proportional") return AntagonistMode::proportional();
  throw ValidationError("unknown antagonist mode '" + name + "' (expected none|constant|proportional)");
}

// Max over the six principal directions of the chord bending angle at `amplitude`.
inline double principal_bend_angle(const ArmGeometry& geom, const ActuationConfig& act, double amplitude,
                                   double* distal_kappa = nullptr) {
  const auto rest = rest_lengths(geom);
  double angle = 0.0;
  double kappa = 0.0;
  for (int k = 0; k < 6; ++k) {
    const auto cmd = principal_direction_command(k, amplitude, act).command;
    const auto pose = forward_kinematics(geom, apply_command(geom, rest, cmd));
    angle = std::max(angle, bending_angle(pose));
    kappa = std::max(kappa, pose.shapes.back().kappa);
  }
  if (distal_kappa) *distal_kappa = kappa;
  return angle;
}

// Amplitude whose maximum principal bending angle equals `target_angle`, by
// bisection over [0, delta_l_max] (the angle is monotone in amplitude).
inline double calibrate_a_max(const ArmGeometry& geom, const ActuationConfig& act, double target_angle) {
  double hi = act.limits.delta_l_max;
  for (const auto& s : geom.sections) hi = std::min(hi, 0.999 * s.rest_length());
  if (principal_bend_angle(geom, act, hi) < target_angle)
    throw ValidationError("calibration: bending angle target unreachable within actuation.delta_l_max");
  double lo = 0.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    (principal_bend_angle(geom, act, mid) < target_angle ? lo : hi) = mid;
  }
  return hi;
}

inline double calibrate_kappa_max(const ArmGeometry& geom, const ActuationConfig& act, double a_max) {
  double kappa = 0.0;
  principal_bend_angle(geom, act, a_max, &kappa);
  return kappa;
}

// Resolves calibrated parameters, then validates the whole configuration.
inline ExperimentConfig finalize(ExperimentConfig cfg) {
  try {
    cfg.arm.validate();
  } catch (const InvalidInput& e) {
    throw ValidationError(std::string("arm: ") + e.what());
  }
  cfg.actuation.validate(cfg.arm.section_count());
  cfg.sensors.validate();
  for (const auto& m : cfg.mounts) {
    if (m.section_index >= cfg.arm.section_count()) throw ValidationError("sensor mount section out of range");
    if (!(m.axial_offset >= 0.0 && m.axial_offset <= 1.0))
      throw ValidationError("sensor mount axial_offset must lie in [0, 1]");
  }
  for (const auto& t : cfg.targets)
    if (!(t.radius > 0.0)) throw ValidationError("target radius must be positive");
  if (!(cfg.harness.dt > 0.0)) throw ValidationError("harness.dt must be positive");
  if (cfg.harness.workspace_psi_samples < 8 || cfg.harness.workspace_amplitude_samples < 8)
    throw ValidationError("harness workspace resolution must be >= 8 per axis");
  if (cfg.harness.characterize_steps < 2) throw ValidationError("harness.characterize_steps must be >= 2");
  if (!(cfg.constant_restoring >= 0.0)) throw ValidationError("controller.constant_restoring must be >= 0");
  if (cfg.controller.rotations < 1) throw ValidationError("controller: rotations must be >= 1");

  auto& c = cfg.controller;
  c.a_max = cfg.calibration.a_max ? *cfg.calibration.a_max
                                  : calibrate_a_max(cfg.arm, cfg.actuation, cfg.calibration.bend_angle);
  if (c.a_max > cfg.actuation.limits.delta_l_max) throw ValidationError("controller: a_max exceeds delta_l_max");
  c.kappa_max = cfg.calibration.kappa_max ? *cfg.calibration.kappa_max
                                          : calibrate_kappa_max(cfg.arm, cfg.actuation, c.a_max);
  c.delta_a = cfg.calibration.delta_a ? *cfg.calibration.delta_a : c.a_max / c.rotations;
  c.a0 = cfg.calibration.a0 ? *cfg.calibration.a0 : c.delta_a;
  if (c.mode.kind == AntagonistMode::Kind::Constant) c.mode.restoring_length = cfg.constant_restoring;
  c.validate(cfg.actuation.limits);
  return cfg;
}

inline ExperimentConfig default_config() { return finalize(ExperimentConfig{}); }

namespace detail {

using nlohmann::json;

// Reads keys from one object and rejects any it did not consume.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(path_ + ": expected an object");
  }
  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, _] : j_.items())
      if (!seen_.count(key)) throw ValidationError("unknown config key '" + where(key) + "'");
  }
  Section(const Section&) = delete;
  Section& operator=(const Section&) = delete;

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) out = as_number(*v, key);
  }
  void number(const std::string& key, std::optional<double>& out) {
    if (const json* v = find(key); v && !v->is_null()) out = as_number(*v, key);
  }
  void integer(const std::string& key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) throw ValidationError(where(key) + ": expected an integer");
      out = v->get<int>();
    }
  }
  void boolean(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw ValidationError(where(key) + ": expected a boolean");
      out = v->get<bool>();
    }
  }
  void string(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ValidationError(where(key) + ": expected a string");
      out = v->get<std::string>();
    }
  }
  Vec3 vec3(const json& v, const std::string& key) const {
    if (!v.is_array() || v.size() != 3) throw ValidationError(where(key) + ": expected [x, y, z]");
    return {as_number(v[0], key), as_number(v[1], key), as_number(v[2], key)};
  }
  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  double as_number(const json& v, const std::string& key) const {
    if (!v.is_number()) throw ValidationError(where(key) + ": expected a number");
    return v.get<double>();
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& doc) {
  using detail::Section;
  ExperimentConfig cfg;
  Section root(doc, "");

  if (const auto* arm = root.find("arm")) {
    Section s(*arm, "arm");
    if (const auto* sections = s.find("sections")) {
      if (!sections->is_array() || sections->empty()) throw ValidationError("arm.sections: expected a non-empty array");
      cfg.arm.sections.clear();
      for (std::size_t i = 0; i < sections->size(); ++i) {
        Section sec((*sections)[i], "arm.sections[" + std::to_string(i) + "]");
        SectionGeometry g;
        sec.number("diameter", g.diameter);
        sec.number("unit_length", g.unit_length);
        sec.integer("units_per_section", g.units_per_section);
        cfg.arm.sections.push_back(g);
      }
      cfg.actuation.section_scale.assign(cfg.arm.sections.size(), 1.0);
      cfg.mounts = default_mounts(cfg.arm);
    }
    if (const auto* base = s.find("base_position")) cfg.arm.base_pose.translation() = s.vec3(*base, "base_position");
  }

  if (const auto* act = root.find("actuation")) {
    Section s(*act, "actuation");
    s.number("delta_l_max", cfg.actuation.limits.delta_l_max);
    s.number("rate_max", cfg.actuation.limits.rate_max);
    if (const auto* scale = s.find("section_scale")) {
      if (!scale->is_array()) throw ValidationError("actuation.section_scale: expected an array");
      cfg.actuation.section_scale.clear();
      for (const auto& v : *scale) {
        if (!v.is_number()) throw ValidationError("actuation.section_scale: expected numbers");
        cfg.actuation.section_scale.push_back(v.get<double>());
      }
    }
  }

  if (const auto* sensors = root.find("sensors")) {
    Section s(*sensors, "sensors");
    s.number("range_max", cfg.sensors.range_max);
    s.number("noise_stddev", cfg.sensors.noise_stddev);
    if (const auto* mounts = s.find("mounts")) {
      if (!mounts->is_array()) throw ValidationError("sensors.mounts: expected an array");
      cfg.mounts.clear();
      for (std::size_t i = 0; i < mounts->size(); ++i) {
        Section m((*mounts)[i], "sensors.mounts[" + std::to_string(i) + "]");
        SensorMount mount{cfg.arm.distal_index(), 1.0, 0.0, kPi / 4.0};
        int section = static_cast<int>(mount.section_index);
        m.integer("section", section);
        if (section < 0) throw ValidationError("sensors.mounts: section must be >= 0");
        mount.section_index = static_cast<std::size_t>(section);
        m.number("axial_offset", mount.axial_offset);
        m.number("azimuth", mount.azimuth);
        m.number("tilt", mount.tilt);
        cfg.mounts.push_back(mount);
      }
    }
  }

  if (const auto* ctl = root.find("controller")) {
    Section s(*ctl, "controller");
    auto& c = cfg.controller;
    s.integer("steps_per_rotation", c.steps_per_rotation);
    s.integer("rotations", c.rotations);
    s.number("a0", cfg.calibration.a0);
    s.number("delta_a", cfg.calibration.delta_a);
    s.number("a_max", cfg.calibration.a_max);
    s.number("kappa_max", cfg.calibration.kappa_max);
    s.number("constant_restoring", cfg.constant_restoring);
    std::string mode = to_string(c.mode.kind);
    s.string("mode", mode);
    c.mode = mode_from_name(mode, cfg.constant_restoring);
    s.number("contact_eps", c.contact_eps);
    s.number("reach_rate", c.reach_rate);
    s.integer("max_reach_steps", c.max_reach_steps);
    s.boolean("exploration_resistance", c.exploration_resistance_enabled);
    s.number("exploration_restoring", c.exploration_restoring);
  }

  if (const auto* cal = root.find("calibration")) {
    Section s(*cal, "calibration");
    s.number("bend_angle", cfg.calibration.bend_angle);
  }

  if (const auto* h = root.find("harness")) {
    Section s(*h, "harness");
    s.number("dt", cfg.harness.dt);
    s.integer("workspace_psi_samples", cfg.harness.workspace_psi_samples);
    s.integer("workspace_amplitude_samples", cfg.harness.workspace_amplitude_samples);
    s.integer("characterize_steps", cfg.harness.characterize_steps);
  }

  if (const auto* suite = root.find("suite")) {
    Section s(*suite, "suite");
    std::string kind = to_string(cfg.suite.kind);
    s.string("kind", kind);
    if (kind == "large5") cfg.suite.kind = SuiteKind::Large5;
    else if (kind == "small13") cfg.suite.kind = SuiteKind::Small13;
    else throw ValidationError("suite.kind: expected large5|small13");
    std::string label;
    s.string("scenario", label);
    if (!label.empty()) cfg.suite.scenario = label;
  }

  if (const auto* targets = root.find("targets")) {
    if (!targets->is_array()) throw ValidationError("targets: expected an array");
    for (std::size_t i = 0; i < targets->size(); ++i) {
      Section t((*targets)[i], "targets[" + std::to_string(i) + "]");
      Target target;
      if (const auto* c = t.find("center")) target.center = t.vec3(*c, "center");
      else throw ValidationError("targets[" + std::to_string(i) + "].center is required");
      t.number("radius", target.radius);
      cfg.targets.push_back(target);
    }
  }
  return finalize(cfg);
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("config file '" + path + "': " + e.what());
  }
  return parse_config(doc);
}

// Snapshot of the resolved configuration, in the same layout parse_config reads.
inline nlohmann::json to_json(const ExperimentConfig& cfg) {
  using nlohmann::json;
  json sections = json::array();
  for (const auto& s : cfg.arm.sections)
    sections.push_back({{"diameter", s.diameter}, {"unit_length", s.unit_length}, {"units_per_section", s.units_per_section}});
  const Vec3 base = cfg.arm.base_pose.translation();
  json mounts = json::array();
  for (const auto& m : cfg.mounts)
    mounts.push_back({{"section", m.section_index}, {"axial_offset", m.axial_offset}, {"azimuth", m.azimuth}, {"tilt", m.tilt}});
  json targets = json::array();
  for (const auto& t : cfg.targets)
    targets.push_back({{"center", {t.center.x(), t.center.y(), t.center.z()}}, {"radius", t.radius}});
  const auto& c = cfg.controller;
  json suite = {{"kind", to_string(cfg.suite.kind)}};
  if (cfg.suite.scenario) suite["scenario"] = *cfg.suite.scenario;
  return {
      {"arm", {{"sections", sections}, {"base_position", {base.x(), base.y(), base.z()}}}},
      {"actuation",
       {{"delta_l_max", cfg.actuation.limits.delta_l_max},
        {"rate_max", cfg.actuation.limits.rate_max},
        {"section_scale", cfg.actuation.section_scale}}},
      {"sensors", {{"range_max", cfg.sensors.range_max}, {"noise_stddev", cfg.sensors.noise_stddev}, {"mounts", mounts}}},
      {"controller",
       {{"steps_per_rotation", c.steps_per_rotation},
        {"rotations", c.rotations},
        {"a0", c.a0},
        {"delta_a", c.delta_a},
        {"a_max", c.a_max},
        {"kappa_max", c.kappa_max},
        {"mode", to_string(c.mode.kind)},
        {"constant_restoring", cfg.constant_restoring},
        {"contact_eps", c.contact_eps},
        {"reach_rate", c.reach_rate},
        {"max_reach_steps", c.max_reach_steps},
        {"exploration_resistance", c.exploration_resistance_enabled},
        {"exploration_restoring", c.exploration_restoring}}},
      {"calibration", {{"bend_angle", cfg.calibration.bend_angle}}},
      {"harness",
       {{"dt", cfg.harness.dt},
        {"workspace_psi_samples", cfg.harness.workspace_psi_samples},
        {"workspace_amplitude_samples", cfg.harness.workspace_amplitude_samples},
        {"characterize_steps", cfg.harness.characterize_steps}}},
      {"suite", suite},
      {"targets", targets},
  };
}

}  // namespace tropism
