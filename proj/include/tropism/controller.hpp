#pragma once

// Behaviour-based reaching controller.
//
// Exploring: a circular shift of the bending direction with amplitude stepped
// up after every full rotation (circumnutation), logging each visited
// configuration with its closest proximity reading. Reaching: the logged
// configuration with the least reading is re-applied and its amplitude grown
// at fixed azimuth, optionally pulling antagonists, until contact or until
// the amplitude has been saturated for too long.

#include "tropism/actuation.hpp"
#include "tropism/common.hpp"
#include "tropism/kinematics.hpp"
#include "tropism/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace tropism {

struct ControllerConfig {
  int steps_per_rotation = 100;
  int rotations = 5;
  double a0 = 0.0;       // m; first rotation amplitude
  double delta_a = 0.0;  // m added after each rotation
  double a_max = 0.0;    // m
  AntagonistMode mode = AntagonistMode::proportional();
  double kappa_max = 0.0;      // 1/m, distal section at a_max
  double contact_eps = 0.005;  // m
  double reach_rate = 0.001;   // m of amplitude per reaching step
  int max_reach_steps = 20;    // steps held at a_max before giving up
  bool exploration_resistance_enabled = false;
  double exploration_restoring = 0.0;  // m, constant antagonist while exploring when enabled

  void validate(const ActuationLimits& limits) const {
    auto fail = [](const std::string& m) { throw ValidationError("controller: " + m); };
    if (steps_per_rotation < 1) fail("steps_per_rotation must be >= 1");
    if (rotations < 1) fail("rotations must be >= 1");
    if (!(a_max > 0.0)) fail("a_max must be positive");
    if (a_max > limits.delta_l_max) fail("a_max exceeds actuation.delta_l_max");
    if (!(a0 >= 0.0) || !(delta_a >= 0.0)) fail("a0 and delta_a must be >= 0");
    if (a0 + (rotations - 1) * delta_a > a_max * (1.0 + 1e-9)) fail("amplitude schedule exceeds a_max");
    if (delta_a > limits.rate_max) fail("delta_a exceeds actuation.rate_max");
    if (!(kappa_max > 0.0)) fail("kappa_max must be positive");
    if (!(contact_eps >= 0.0)) fail("contact_eps must be >= 0");
    if (!(reach_rate > 0.0)) fail("reach_rate must be positive");
    if (reach_rate > limits.rate_max) fail("reach_rate exceeds actuation.rate_max");
    if (max_reach_steps < 1) fail("max_reach_steps must be >= 1");
    if (mode.kind == AntagonistMode::Kind::Constant &&
        (!(mode.restoring_length >= 0.0) || mode.restoring_length > limits.delta_l_max))
      fail("constant restoring length must lie in [0, delta_l_max]");
    if (!(exploration_restoring >= 0.0) || exploration_restoring > limits.delta_l_max)
      fail("exploration_restoring must lie in [0, delta_l_max]");
  }

  AntagonistMode exploration_mode() const {
    return exploration_resistance_enabled ? AntagonistMode::constant(exploration_restoring) : AntagonistMode::none();
  }
};

struct ExplorationState {
  double psi = 0.0;
  double amplitude = 0.0;
  int step_in_rotation = 0;
  int rotation_index = 0;

  static ExplorationState start(const ControllerConfig& cfg) { return {0.0, cfg.a0, 0, 0}; }
};

struct CircumnutationStep {
  std::optional<TendonCommand> command;  // empty: exploration complete
  ExplorationState issued;               // state the command was generated from
  ExplorationState next;
};

inline CircumnutationStep circumnutation_step(const ExplorationState& state, const ControllerConfig& cfg,
                                              const ActuationConfig& actuation) {
  CircumnutationStep out{std::nullopt, state, state};
  if (state.rotation_index >= cfg.rotations || state.amplitude > cfg.a_max * (1.0 + 1e-12)) return out;
  const double amplitude = std::min(state.amplitude, cfg.a_max);
  out.command = compose_command(state.psi, amplitude, cfg.exploration_mode(), 0.0, cfg.kappa_max, actuation);

  ExplorationState next = state;
  next.step_in_rotation += 1;
  if (next.step_in_rotation == cfg.steps_per_rotation) {
    next.step_in_rotation = 0;
    next.rotation_index += 1;
    next.amplitude = cfg.a0 + next.rotation_index * cfg.delta_a;
  }
  // computed from the index, not accumulated, so a rotation closes exactly
  next.psi = kTwoPi * next.step_in_rotation / cfg.steps_per_rotation;
  out.next = next;
  return out;
}

struct KnowledgeEntry {
  long step = 0;
  double psi = 0.0;
  double amplitude = 0.0;
  TendonCommand command;
  std::optional<double> best_reading;
  int best_sensor = 0;

  bool operator==(const KnowledgeEntry&) const = default;
};

class KnowledgeBase {
 public:
  void record(KnowledgeEntry entry) {
    if (!entries_.empty() && entry.step <= entries_.back().step)
      throw InvalidInput("knowledge entry step " + std::to_string(entry.step) + " does not follow step " +
                         std::to_string(entries_.back().step));
    entries_.push_back(std::move(entry));
  }

  const std::vector<KnowledgeEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

 private:
  std::vector<KnowledgeEntry> entries_;
};

// Entry with the least detected reading; the earliest step wins ties.
inline std::optional<KnowledgeEntry> select_best(const KnowledgeBase& kb) {
  if (kb.empty()) throw InvalidInput("knowledge base is empty");
  const KnowledgeEntry* best = nullptr;
  for (const auto& e : kb.entries()) {
    if (!e.best_reading) continue;
    if (!best || *e.best_reading < *best->best_reading) best = &e;
  }
  if (!best) return std::nullopt;
  return *best;
}

struct ReachingState {
  double psi = 0.0;
  double amplitude = 0.0;  // amplitude of the next command
  int steps = 0;
  int saturated_steps = 0;
  KnowledgeEntry selected;
};

struct ReachingStep {
  TendonCommand command;
  double amplitude = 0.0;  // amplitude actually commanded
  ReachingState next;
};

inline ReachingStep reaching_step(const ReachingState& state, const ControllerConfig& cfg,
                                  const ActuationConfig& actuation, double current_kappa) {
  ReachingStep out;
  out.amplitude = std::min(state.amplitude, cfg.a_max);
  out.command = compose_command(state.psi, out.amplitude, cfg.mode, current_kappa, cfg.kappa_max, actuation);
  out.next = state;
  out.next.steps += 1;
  if (out.amplitude >= cfg.a_max) out.next.saturated_steps += 1;
  out.next.amplitude = std::min(state.amplitude + cfg.reach_rate, cfg.a_max);
  return out;
}

namespace phase {
struct Exploring {};
struct Reaching {
  ReachingState state;
};
struct Contact {};
struct Failed {
  std::string reason;
};
}  // namespace phase

using ControllerPhase = std::variant<phase::Exploring, phase::Reaching, phase::Contact, phase::Failed>;

inline std::string phase_name(const ControllerPhase& p) {
  switch (p.index()) {
    case 0: return "exploring";
    case 1: return "reaching";
    case 2: return "contact";
    default: return "failed";
  }
}

// What the plant reports back after applying the previous command.
struct Observation {
  std::vector<SensorReading> readings;
  bool contact = false;
  double distal_kappa = 0.0;  // from the commanded lengths
};

struct PhaseEvent {
  long step = 0;
  std::string from;
  std::string to;
  std::string reason;
};

struct TickOutput {
  std::optional<TendonCommand> command;
  double psi = 0.0;
  double amplitude = 0.0;
  std::optional<KnowledgeEntry> entry;  // recorded from the observation of the previous command
  std::vector<PhaseEvent> events;
};

class Controller {
 public:
  Controller(ControllerConfig cfg, ActuationConfig actuation) : cfg_(std::move(cfg)), actuation_(std::move(actuation)) {
    explore_ = ExplorationState::start(cfg_);
  }

  // One control step. `obs` describes the result of the previously issued
  // command and is empty on the very first tick.
  TickOutput tick(const std::optional<Observation>& obs) {
    TickOutput out;
    if (obs && pending_) absorb(*obs, out);
    pending_ = false;

    if (std::holds_alternative<phase::Exploring>(phase_)) {
      auto step = circumnutation_step(explore_, cfg_, actuation_);
      if (step.command) {
        issue(std::move(*step.command), step.issued.psi, std::min(step.issued.amplitude, cfg_.a_max), out);
        explore_ = step.next;
        return out;
      }
      const auto best = select_best(kb_);
      if (!best) {
        transition(phase::Failed{"no detection during exploration"}, "no detection during exploration", out);
        return out;
      }
      ReachingState rs;
      rs.psi = best->psi;
      rs.amplitude = best->amplitude;
      rs.selected = *best;
      transition(phase::Reaching{rs}, "selected step " + std::to_string(best->step), out);
    }

    if (auto* reaching = std::get_if<phase::Reaching>(&phase_)) {
      const double kappa = obs ? obs->distal_kappa : 0.0;
      auto step = reaching_step(reaching->state, cfg_, actuation_, kappa);
      issue(std::move(step.command), reaching->state.psi, step.amplitude, out);
      reaching->state = step.next;
    }
    return out;
  }

  const ControllerPhase& phase() const { return phase_; }
  const KnowledgeBase& knowledge() const { return kb_; }
  const ControllerConfig& config() const { return cfg_; }
  long steps_issued() const { return step_; }
  bool finished() const {
    return std::holds_alternative<phase::Contact>(phase_) || std::holds_alternative<phase::Failed>(phase_);
  }

 private:
  void absorb(const Observation& obs, TickOutput& out) {
    const auto best = min_reading(obs.readings);
    if (std::holds_alternative<phase::Exploring>(phase_)) {
      KnowledgeEntry e{last_step_, last_psi_, last_amplitude_, last_command_, std::nullopt, 0};
      if (best) {
        e.best_reading = best->distance;
        e.best_sensor = best->sensor_id;
      }
      kb_.record(e);
      out.entry = std::move(e);
      return;
    }
    if (auto* reaching = std::get_if<phase::Reaching>(&phase_)) {
      if (obs.contact || (best && best->distance <= cfg_.contact_eps)) {
        transition(phase::Contact{}, obs.contact ? "backbone contact" : "proximity contact", out);
      } else if (reaching->state.saturated_steps >= cfg_.max_reach_steps) {
        transition(phase::Failed{"amplitude saturated without contact"}, "amplitude saturated without contact", out);
      }
    }
  }

  void issue(TendonCommand cmd, double psi, double amplitude, TickOutput& out) {
    last_step_ = step_++;
    last_psi_ = psi;
    last_amplitude_ = amplitude;
    last_command_ = cmd;
    pending_ = true;
    out.psi = psi;
    out.amplitude = amplitude;
    out.command = std::move(cmd);
  }

  void transition(ControllerPhase next, std::string reason, TickOutput& out) {
    out.events.push_back({step_, phase_name(phase_), phase_name(next), std::move(reason)});
    phase_ = std::move(next);
  }

  ControllerConfig cfg_;
  ActuationConfig actuation_;
  ControllerPhase phase_ = phase::Exploring{};
  ExplorationState explore_;
  KnowledgeBase kb_;
  long step_ = 0;
  bool pending_ = false;
  long last_step_ = 0;
  double last_psi_ = 0.0;
  double last_amplitude_ = 0.0;
  TendonCommand last_command_;
};

// Every command the exploration phase issues; independent of the world.
inline std::vector<TendonCommand> exploration_commands(const ControllerConfig& cfg, const ActuationConfig& actuation) {
  std::vector<TendonCommand> cmds;
  auto state = ExplorationState::start(cfg);
  while (true) {
    auto step = circumnutation_step(state, cfg, actuation);
    if (!step.command) break;
    cmds.push_back(std::move(*step.command));
    state = step.next;
  }
  return cmds;
}

inline std::vector<ArmPose> exploration_poses(const ArmGeometry& geom, const ControllerConfig& cfg,
                                              const ActuationConfig& actuation) {
  const auto rest = rest_lengths(geom);
  std::vector<ArmPose> poses;
  for (const auto& cmd : exploration_commands(cfg, actuation))
    poses.push_back(forward_kinematics(geom, apply_command(geom, rest, cmd)));
  return poses;
}

}  // namespace tropism
