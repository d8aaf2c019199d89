#pragma once

// Behavioural intents -> tendon pull commands.
//
// A bending intent is an azimuth psi and an amplitude A. Agonist pulls follow
// clipped-cosine weights around the three tendons; the antagonist restoring
// length is spread over the tendons the agonist leaves slack, so that a
// restoring length equal to the agonist pull shortens the arm uniformly.

#include "tropism/common.hpp"
#include "tropism/kinematics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace tropism {

using PullTriplet = std::array<double, 3>;

struct ActuationLimits {
  double delta_l_max = 0.050;  // m
  double rate_max = 0.010;     // m per control step

  void validate() const {
    if (!(delta_l_max > 0.0)) throw ValidationError("actuation.delta_l_max must be positive");
    if (!(rate_max > 0.0)) throw ValidationError("actuation.rate_max must be positive");
  }
};

struct ActuationConfig {
  ActuationLimits limits;
  // Per-section multiplier on the shared triplet; all 1.0 for coupled routing.
  std::vector<double> section_scale{1.0, 1.0, 1.0};

  void validate(std::size_t sections) const {
    limits.validate();
    if (section_scale.size() != sections)
      throw ValidationError("actuation.section_scale needs one entry per section");
    for (double s : section_scale)
      if (!(s >= 0.0)) throw ValidationError("actuation.section_scale entries must be >= 0");
  }
};

struct TendonCommand {
  std::vector<PullTriplet> pulls;  // per section, m of shortening per tendon
  bool clamped = false;            // some pull was saturated to [0, delta_l_max]

  static TendonCommand zero(std::size_t sections) { return {std::vector<PullTriplet>(sections, PullTriplet{}), false}; }

  bool operator==(const TendonCommand&) const = default;
};

struct AntagonistMode {
  enum class Kind { None, Constant, ProportionalToCurvature };

  Kind kind = Kind::None;
  double restoring_length = 0.0;  // used by Constant only

  static AntagonistMode none() { return {}; }
  static AntagonistMode constant(double length) { return {Kind::Constant, length}; }
  static AntagonistMode proportional() { return {Kind::ProportionalToCurvature, 0.0}; }

  bool operator==(const AntagonistMode&) const = default;
};

inline std::string to_string(AntagonistMode::Kind kind) {
  switch (kind) {
    case AntagonistMode::Kind::None: return "none";
    case AntagonistMode::Kind::Constant: return "constant";
    case AntagonistMode::Kind::ProportionalToCurvature: return "proportional";
  }
  return "unknown";
}

inline TendonCommand replicate(const PullTriplet& triplet, const ActuationConfig& cfg) {
  TendonCommand cmd;
  cmd.pulls.reserve(cfg.section_scale.size());
  for (double scale : cfg.section_scale)
    cmd.pulls.push_back({triplet[0] * scale, triplet[1] * scale, triplet[2] * scale});
  return cmd;
}

struct PrincipalDirection {
  PullTriplet weights{};
  TendonCommand command;
};

// Direction k in 0..5 sits at azimuth k*60 deg. Even k pulls tendon k/2 by the
// full amplitude, odd k pulls the two neighbouring tendons by half each.
inline PrincipalDirection principal_direction_command(int k, double amplitude, const ActuationConfig& cfg) {
  if (k < 0 || k > 5) throw InvalidInput("principal direction index must be in 0..5, got " + std::to_string(k));
  if (!(amplitude >= 0.0) || amplitude > cfg.limits.delta_l_max)
    throw InvalidInput("amplitude must lie in [0, delta_l_max]");
  PrincipalDirection out;
  if (k % 2 == 0) {
    out.weights[static_cast<std::size_t>(k / 2)] = 1.0;
  } else {
    out.weights[static_cast<std::size_t>((k - 1) / 2)] = 0.5;
    out.weights[static_cast<std::size_t>(((k + 1) / 2) % 3)] = 0.5;
  }
  out.command = replicate({amplitude * out.weights[0], amplitude * out.weights[1], amplitude * out.weights[2]}, cfg);
  return out;
}

inline PullTriplet direction_weights(double psi) {
  PullTriplet w{};
  for (std::size_t i = 0; i < 3; ++i) {
    const double c = std::cos(psi - kTendonAzimuths[i]);
    // cos(pi/2) rounds to ~6e-17; treat it as the exact zero it is
    w[i] = c > 1e-15 ? c : 0.0;
  }
  return w;
}

inline double antagonist_restoring(double agonist_pull, const AntagonistMode& mode, double kappa, double kappa_max) {
  if (!(agonist_pull >= 0.0)) throw InvalidInput("agonist pull must be >= 0");
  if (!(kappa >= 0.0)) throw InvalidInput("curvature must be >= 0");
  if (!(kappa_max > 0.0)) throw InvalidInput("kappa_max must be positive");
  switch (mode.kind) {
    case AntagonistMode::Kind::None: return 0.0;
    case AntagonistMode::Kind::Constant:
      if (!(mode.restoring_length >= 0.0)) throw InvalidInput("constant restoring length must be >= 0");
      return mode.restoring_length;
    case AntagonistMode::Kind::ProportionalToCurvature: {
      const double alpha = std::clamp(kappa / kappa_max, 0.0, 1.0);
      return alpha * agonist_pull;
    }
  }
  return 0.0;
}

// Share of the restoring length each tendon takes: 1 - w_i / max(w).
// The tendon opposite the bend takes all of it, the agonist none.
inline PullTriplet antagonist_weights(double psi) {
  const PullTriplet w = direction_weights(psi);
  const double peak = std::max({w[0], w[1], w[2]});
  return {1.0 - w[0] / peak, 1.0 - w[1] / peak, 1.0 - w[2] / peak};
}

inline TendonCommand compose_command(double psi, double amplitude, const AntagonistMode& mode, double kappa,
                                     double kappa_max, const ActuationConfig& cfg) {
  if (!(amplitude >= 0.0) || amplitude > cfg.limits.delta_l_max)
    throw InvalidInput("amplitude must lie in [0, delta_l_max]");
  const PullTriplet w = direction_weights(psi);
  const PullTriplet v = antagonist_weights(psi);
  const double agonist_pull = amplitude * std::max({w[0], w[1], w[2]});
  const double restoring = antagonist_restoring(agonist_pull, mode, kappa, kappa_max);

  PullTriplet triplet{};
  for (std::size_t i = 0; i < 3; ++i) triplet[i] = amplitude * w[i] + restoring * v[i];

  TendonCommand cmd = replicate(triplet, cfg);
  for (auto& section : cmd.pulls) {
    for (double& pull : section) {
      const double limited = std::clamp(pull, 0.0, cfg.limits.delta_l_max);
      cmd.clamped = cmd.clamped || limited != pull;
      pull = limited;
    }
  }
  return cmd;
}

inline std::vector<TendonLengths> apply_command(const ArmGeometry& geom, const std::vector<TendonLengths>& rest,
                                                const TendonCommand& cmd) {
  if (rest.size() != geom.sections.size() || cmd.pulls.size() != geom.sections.size())
    throw InvalidCommand("command and rest lengths must cover every section");
  std::vector<TendonLengths> out(rest.size());
  for (std::size_t s = 0; s < rest.size(); ++s) {
    for (std::size_t i = 0; i < 3; ++i) {
      const double length = rest[s][i] - cmd.pulls[s][i];
      if (!(length > 0.0))
        throw InvalidCommand("section " + std::to_string(s) + " tendon " + std::to_string(i + 1) +
                             ": pull leaves non-positive length");
      out[s][i] = length;
    }
  }
  return out;
}

}  // namespace tropism
