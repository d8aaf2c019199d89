#pragma once

// CSV / JSON serialisation. Floating-point values are written with twelve
// significant digits; an undetected distance is an empty CSV field or a JSON
// null.

#include "tropism/harness/experiments.hpp"
#include "tropism/harness/run.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace tropism {

enum class Format { Csv, Json };

inline std::string extension(Format f) { return f == Format::Csv ? ".csv" : ".json"; }

inline std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline double round_num(double v) { return std::strtod(fmt_num(v).c_str(), nullptr); }

inline std::string fmt_num(const std::optional<double>& v) { return v ? fmt_num(*v) : std::string(); }

inline nlohmann::json json_num(const std::optional<double>& v) {
  return v ? nlohmann::json(round_num(*v)) : nlohmann::json(nullptr);
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline constexpr const char* kTraceHeader =
    "step,t,phase,tip_x,tip_y,tip_z,tip_speed,kappa_1,kappa_2,kappa_3,bend_angle,psi,amplitude,sensed_dist,"
    "true_dist,outcome";

inline std::string trace_csv(const Trace& trace) {
  std::string out = std::string(kTraceHeader) + "\n";
  for (const auto& s : trace.samples) {
    std::string row = std::to_string(s.step) + "," + fmt_num(s.t) + "," + s.phase + "," + fmt_num(s.tip_position.x()) + "," +
                      fmt_num(s.tip_position.y()) + "," + fmt_num(s.tip_position.z()) + "," + fmt_num(s.tip_speed);
    for (std::size_t i = 0; i < 3; ++i) row += "," + (i < s.kappa.size() ? fmt_num(s.kappa[i]) : std::string());
    row += "," + fmt_num(s.bending_angle) + "," + fmt_num(s.psi) + "," + fmt_num(s.amplitude) + "," + fmt_num(s.sensed_distance) +
           "," + fmt_num(s.true_distance) + "," + trace.outcome;
    out += row + "\n";
  }
  return out;
}

inline nlohmann::json trace_json(const Trace& trace) {
  using nlohmann::json;
  json samples = json::array();
  for (const auto& s : trace.samples) {
    json k = json::array();
    for (double v : s.kappa) k.push_back(round_num(v));
    samples.push_back({{"step", s.step},
                       {"t", round_num(s.t)},
                       {"phase", s.phase},
                       {"tip_x", round_num(s.tip_position.x())},
                       {"tip_y", round_num(s.tip_position.y())},
                       {"tip_z", round_num(s.tip_position.z())},
                       {"tip_speed", round_num(s.tip_speed)},
                       {"kappa_1", k.size() > 0 ? k[0] : json(nullptr)},
                       {"kappa_2", k.size() > 1 ? k[1] : json(nullptr)},
                       {"kappa_3", k.size() > 2 ? k[2] : json(nullptr)},
                       {"bend_angle", round_num(s.bending_angle)},
                       {"psi", round_num(s.psi)},
                       {"amplitude", round_num(s.amplitude)},
                       {"sensed_dist", json_num(s.sensed_distance)},
                       {"true_dist", json_num(s.true_distance)},
                       {"outcome", trace.outcome}});
  }
  json events = json::array();
  for (const auto& e : trace.events)
    events.push_back({{"step", e.step}, {"from", e.from}, {"to", e.to}, {"reason", e.reason}});
  return {{"label", trace.label},   {"mode", trace.mode},     {"class", to_string(trace.workspace_class)},
          {"outcome", trace.outcome}, {"config", trace.config}, {"events", events},
          {"samples", samples}};
}

inline std::string knowledge_csv(const std::vector<KnowledgeEntry>& kb) {
  std::string out = "step,psi,amplitude,pull_1,pull_2,pull_3,best_sensor,best_reading\n";
  for (const auto& e : kb) {
    const PullTriplet p = e.command.pulls.empty() ? PullTriplet{} : e.command.pulls.front();
    out += std::to_string(e.step) + "," + fmt_num(e.psi) + "," + fmt_num(e.amplitude) + "," + fmt_num(p[0]) + "," + fmt_num(p[1]) +
           "," + fmt_num(p[2]) + "," + (e.best_reading ? std::to_string(e.best_sensor) : std::string()) + "," +
           fmt_num(e.best_reading) + "\n";
  }
  return out;
}

inline nlohmann::json knowledge_json(const std::vector<KnowledgeEntry>& kb) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& e : kb) {
    nlohmann::json pulls = nlohmann::json::array();
    for (const auto& section : e.command.pulls)
      pulls.push_back({round_num(section[0]), round_num(section[1]), round_num(section[2])});
    out.push_back({{"step", e.step},
                   {"psi", round_num(e.psi)},
                   {"amplitude", round_num(e.amplitude)},
                   {"pulls", pulls},
                   {"best_sensor", e.best_reading ? nlohmann::json(e.best_sensor) : nlohmann::json(nullptr)},
                   {"best_reading", json_num(e.best_reading)}});
  }
  return out;
}

inline std::string characterization_csv(const CharacterizationReport& r) {
  std::string out = "direction,amplitude,bend_angle,kappa_1,kappa_2,kappa_3,tip_x,tip_y,tip_z\n";
  for (const auto& p : r.points) {
    out += std::to_string(p.direction) + "," + fmt_num(p.amplitude) + "," + fmt_num(p.bending_angle);
    for (std::size_t i = 0; i < 3; ++i) out += "," + (i < p.kappa.size() ? fmt_num(p.kappa[i]) : std::string());
    out += "," + fmt_num(p.tip_position.x()) + "," + fmt_num(p.tip_position.y()) + "," + fmt_num(p.tip_position.z()) + "\n";
  }
  return out;
}

inline nlohmann::json characterization_json(const CharacterizationReport& r) {
  using nlohmann::json;
  json points = json::array();
  for (const auto& p : r.points) {
    json k = json::array();
    for (double v : p.kappa) k.push_back(round_num(v));
    points.push_back({{"direction", p.direction},
                      {"amplitude", round_num(p.amplitude)},
                      {"bend_angle", round_num(p.bending_angle)},
                      {"kappa", k},
                      {"tip", {round_num(p.tip_position.x()), round_num(p.tip_position.y()), round_num(p.tip_position.z())}}});
  }
  json maxima = json::array();
  for (std::size_t k = 0; k < r.max_bending_angle.size(); ++k)
    maxima.push_back({{"direction", k},
                      {"max_bend_angle", round_num(r.max_bending_angle[k])},
                      {"max_distal_kappa", round_num(r.max_distal_kappa[k])}});
  return {{"a_max", round_num(r.a_max)}, {"directions", maxima}, {"points", points}};
}

inline std::string runs_csv(const ComparisonReport& r) {
  std::string out = "label,class,mode,outcome,best_dist,steps\n";
  for (const auto& run : r.runs)
    out += run.label + "," + to_string(run.workspace_class) + "," + run.mode + "," + run.outcome + "," +
           fmt_num(run.best_distance) + "," + std::to_string(run.steps) + "\n";
  return out;
}

inline std::string comparison_csv(const ComparisonReport& r) {
  std::string out = "cluster,pair,mean_diff,std_diff,n_trials\n";
  for (const auto& c : r.comparisons)
    out += c.cluster + "," + c.pair + "," + fmt_num(c.mean_diff) + "," + fmt_num(c.std_diff) + "," +
           std::to_string(c.n_trials) + "\n";
  return out;
}

inline WorkspaceClass workspace_class_from_string(const std::string& s) {
  if (s == "unobservable") return WorkspaceClass::Unobservable;
  if (s == "observable_unreachable") return WorkspaceClass::ObservableUnreachable;
  if (s == "observable_reachable") return WorkspaceClass::ObservableReachable;
  throw ValidationError("unknown workspace class '" + s + "'");
}

inline nlohmann::json to_json(const ComparisonReport& r) {
  using nlohmann::json;
  json runs = json::array();
  for (const auto& run : r.runs)
    runs.push_back({{"label", run.label},
                    {"class", to_string(run.workspace_class)},
                    {"mode", run.mode},
                    {"outcome", run.outcome},
                    {"best_dist", json_num(run.best_distance)},
                    {"steps", run.steps}});
  json comps = json::array();
  for (const auto& c : r.comparisons)
    comps.push_back({{"cluster", c.cluster},
                     {"pair", c.pair},
                     {"mean_diff", round_num(c.mean_diff)},
                     {"std_diff", round_num(c.std_diff)},
                     {"n_trials", c.n_trials}});
  return {{"runs", runs}, {"comparisons", comps}};
}

inline ComparisonReport comparison_from_json(const nlohmann::json& j) {
  ComparisonReport r;
  for (const auto& run : j.at("runs")) {
    RunRecord rec;
    rec.label = run.at("label").get<std::string>();
    rec.workspace_class = workspace_class_from_string(run.at("class").get<std::string>());
    rec.mode = run.at("mode").get<std::string>();
    rec.outcome = run.at("outcome").get<std::string>();
    if (!run.at("best_dist").is_null()) rec.best_distance = run.at("best_dist").get<double>();
    rec.steps = run.at("steps").get<long>();
    r.runs.push_back(std::move(rec));
  }
  for (const auto& c : j.at("comparisons"))
    r.comparisons.push_back({c.at("cluster").get<std::string>(), c.at("pair").get<std::string>(),
                             c.at("mean_diff").get<double>(), c.at("std_diff").get<double>(),
                             c.at("n_trials").get<int>()});
  return r;
}

}  // namespace tropism
