#pragma once

#include "tropism/harness/config.hpp"
#include "tropism/harness/run.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tropism {

struct CharacterizationPoint {
  int direction = 0;
  double amplitude = 0.0;
  double bending_angle = 0.0;
  std::vector<double> kappa;  // per section
  Vec3 tip_position = Vec3::Zero();
};

struct CharacterizationReport {
  std::vector<CharacterizationPoint> points;  // direction-major, amplitude ascending
  std::vector<double> max_bending_angle;      // per direction
  std::vector<double> max_distal_kappa;       // per direction
  double a_max = 0.0;
};

// Sweeps each of the six principal directions from zero to a_max.
inline CharacterizationReport characterize(const ArmGeometry& geom, const ActuationConfig& act, double a_max,
                                           int steps) {
  CharacterizationReport report;
  report.a_max = a_max;
  const auto rest = rest_lengths(geom);
  for (int k = 0; k < 6; ++k) {
    double max_angle = 0.0;
    double max_kappa = 0.0;
    for (int j = 0; j <= steps; ++j) {
      CharacterizationPoint p;
      p.direction = k;
      p.amplitude = a_max * static_cast<double>(j) / steps;
      const auto pose = forward_kinematics(geom, apply_command(geom, rest, principal_direction_command(k, p.amplitude, act).command));
      p.bending_angle = bending_angle(pose);
      for (const auto& s : pose.shapes) p.kappa.push_back(s.kappa);
      p.tip_position = pose.tip_position;
      max_angle = std::max(max_angle, p.bending_angle);
      max_kappa = std::max(max_kappa, pose.shapes.back().kappa);
      report.points.push_back(std::move(p));
    }
    report.max_bending_angle.push_back(max_angle);
    report.max_distal_kappa.push_back(max_kappa);
  }
  return report;
}

inline CharacterizationReport characterize(const ExperimentConfig& cfg) {
  return characterize(cfg.arm, cfg.actuation, cfg.controller.a_max, cfg.harness.characterize_steps);
}

struct RunRecord {
  std::string label;
  WorkspaceClass workspace_class = WorkspaceClass::Unobservable;
  std::string mode;
  std::string outcome;
  std::optional<double> best_distance;
  long steps = 0;

  bool operator==(const RunRecord&) const = default;
};

struct StrategyComparison {
  std::string cluster;  // reachable | not_reachable
  std::string pair;     // e.g. none_vs_proportional: mean of (none - proportional)
  double mean_diff = 0.0;
  double std_diff = 0.0;  // population standard deviation
  int n_trials = 0;

  bool operator==(const StrategyComparison&) const = default;
};

struct ComparisonReport {
  std::vector<RunRecord> runs;
  std::vector<StrategyComparison> comparisons;

  bool operator==(const ComparisonReport&) const = default;
};

inline std::optional<std::string> cluster_of(WorkspaceClass c) {
  if (c == WorkspaceClass::ObservableReachable) return "reachable";
  if (c == WorkspaceClass::ObservableUnreachable) return "not_reachable";
  return std::nullopt;
}

// Pairwise differences of best distances, aggregated per cluster, in the
// order the modes were given. Clusters without any trial are omitted.
inline std::vector<StrategyComparison> aggregate(const std::vector<RunRecord>& runs,
                                                 const std::vector<std::string>& modes) {
  std::vector<StrategyComparison> out;
  auto best_of = [&](const std::string& label, const std::string& mode) -> std::optional<double> {
    for (const auto& r : runs)
      if (r.label == label && r.mode == mode) return r.best_distance;
    return std::nullopt;
  };
  for (const std::string cluster : {"reachable", "not_reachable"}) {
    std::vector<std::string> labels;
    for (const auto& r : runs)
      if (cluster_of(r.workspace_class) == cluster && (labels.empty() || labels.back() != r.label))
        labels.push_back(r.label);
    for (std::size_t a = 0; a < modes.size(); ++a) {
      for (std::size_t b = a + 1; b < modes.size(); ++b) {
        std::vector<double> diffs;
        for (const auto& label : labels) {
          const auto da = best_of(label, modes[a]);
          const auto db = best_of(label, modes[b]);
          if (da && db) diffs.push_back(*da - *db);
        }
        if (diffs.empty()) continue;
        double mean = 0.0;
        for (double d : diffs) mean += d;
        mean /= static_cast<double>(diffs.size());
        double var = 0.0;
        for (double d : diffs) var += (d - mean) * (d - mean);
        var /= static_cast<double>(diffs.size());
        out.push_back({cluster, modes[a] + "_vs_" + modes[b], mean, std::sqrt(var), static_cast<int>(diffs.size())});
      }
    }
  }
  return out;
}

// Runs every scenario under each mode with everything else identical.
// Traces are handed to `on_trace` (if given) as they complete.
template <typename OnTrace>
ComparisonReport compare_strategies(const std::vector<Scenario>& suite, const ExperimentConfig& cfg,
                                    const Environment& env, std::uint64_t seed, const std::vector<std::string>& modes,
                                    OnTrace&& on_trace) {
  if (modes.empty()) throw ValidationError("compare needs at least one mode");
  ComparisonReport report;
  for (const auto& scenario : suite) {
    const WorkspaceClass cls = classify_scenario(scenario, cfg, env);
    for (const auto& mode : modes) {
      ExperimentConfig run_cfg = cfg;
      run_cfg.controller.mode = mode_from_name(mode, cfg.constant_restoring);
      const Trace trace = run_scenario(scenario, run_cfg, env, seed);
      report.runs.push_back({scenario.label, cls, mode, trace.outcome, trace.best_distance(),
                             static_cast<long>(trace.samples.size())});
      on_trace(trace);
    }
  }
  report.comparisons = aggregate(report.runs, modes);
  return report;
}

inline ComparisonReport compare_strategies(const std::vector<Scenario>& suite, const ExperimentConfig& cfg,
                                           const Environment& env, std::uint64_t seed,
                                           const std::vector<std::string>& modes = {"none", "constant",
                                                                                    "proportional"}) {
  return compare_strategies(suite, cfg, env, seed, modes, [](const Trace&) {});
}

}  // namespace tropism
