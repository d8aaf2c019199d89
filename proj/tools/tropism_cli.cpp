// Command-line experiment runner.
//
//   tropism <characterize|explore|reach|suite|compare> [--config FILE] [--out DIR]
//           [--seed N] [--format csv|json] [--modes none,constant,proportional]
//
// Exit codes: 0 success, 1 validation error, 2 runtime error.

#include "tropism/tropism.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace tropism;

namespace {

struct Options {
  std::string config;
  std::string out = ".";
  std::uint64_t seed = 0;
  std::string format = "csv";
  std::string modes = "none,constant,proportional";
  std::string scenario;
};

Format parse_format(const std::string& s) {
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  throw ValidationError("--format must be csv or json");
}

std::vector<std::string> parse_modes(const std::string& s, double constant_restoring) {
  std::vector<std::string> modes;
  std::stringstream ss(s);
  for (std::string m; std::getline(ss, m, ',');) {
    if (m.empty()) continue;
    mode_from_name(m, constant_restoring);
    for (const auto& seen : modes)
      if (seen == m) throw ValidationError("--modes lists '" + m + "' twice");
    modes.push_back(m);
  }
  if (modes.empty()) throw ValidationError("--modes must name at least one mode");
  return modes;
}

ExperimentConfig load(const Options& o) { return o.config.empty() ? default_config() : load_config(o.config); }

fs::path prepare_out(const Options& o) {
  fs::path dir(o.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

void write_trace(const fs::path& dir, const std::string& stem, const Trace& trace, Format f) {
  const fs::path path = dir / (stem + extension(f));
  write_file(path, f == Format::Csv ? trace_csv(trace) : trace_json(trace).dump(2) + "\n");
}

std::vector<Scenario> scenarios(const ExperimentConfig& cfg, const Environment& env, std::uint64_t seed) {
  if (!cfg.targets.empty()) return {explicit_scenario(cfg)};
  std::vector<Scenario> out;
  for (auto& p : build_suite(cfg, env, seed)) out.push_back(std::move(p.scenario));
  return out;
}

Scenario pick(const ExperimentConfig& cfg, const Environment& env, const Options& o) {
  auto all = scenarios(cfg, env, o.seed);
  std::string label = !o.scenario.empty() ? o.scenario : cfg.suite.scenario.value_or("");
  if (label.empty()) return all.front();
  for (auto& s : all)
    if (s.label == label) return s;
  throw ValidationError("no scenario labelled '" + label + "'");
}

std::string describe(const std::optional<double>& d) { return d ? fmt_num(*d) + " m" : "n/a"; }

int cmd_characterize(const Options& o) {
  const auto cfg = load(o);
  const Format f = parse_format(o.format);
  const auto dir = prepare_out(o);
  const auto report = characterize(cfg);
  write_file(dir / ("characterize" + extension(f)),
             f == Format::Csv ? characterization_csv(report) : characterization_json(report).dump(2) + "\n");
  std::cout << "a_max " << fmt_num(report.a_max) << " m\n";
  for (std::size_t k = 0; k < report.max_bending_angle.size(); ++k)
    std::cout << "direction " << k << ": max bend " << fmt_num(report.max_bending_angle[k] * 180.0 / kPi)
              << " deg, distal kappa " << fmt_num(report.max_distal_kappa[k]) << " 1/m\n";
  return 0;
}

int cmd_explore(const Options& o) {
  const auto cfg = load(o);
  const Format f = parse_format(o.format);
  const auto dir = prepare_out(o);
  const auto env = prepare_environment(cfg);
  const Scenario s = pick(cfg, env, o);
  const Trace trace = run_scenario(s, cfg, env, o.seed, RunOptions{true});
  write_trace(dir, "explore_" + s.label, trace, f);
  write_file(dir / ("knowledge_" + s.label + extension(f)),
             f == Format::Csv ? knowledge_csv(trace.knowledge) : knowledge_json(trace.knowledge).dump(2) + "\n");
  KnowledgeBase kb;
  for (const auto& e : trace.knowledge) kb.record(e);
  const auto best = select_best(kb);
  std::cout << s.label << ": " << to_string(trace.workspace_class) << ", " << kb.size() << " entries, ";
  if (best)
    std::cout << "best reading " << fmt_num(*best->best_reading) << " m at step " << best->step << "\n";
  else
    std::cout << "no detection\n";
  return 0;
}

int cmd_reach(const Options& o) {
  const auto cfg = load(o);
  const Format f = parse_format(o.format);
  const auto dir = prepare_out(o);
  const auto env = prepare_environment(cfg);
  const Scenario s = pick(cfg, env, o);
  const Trace trace = run_scenario(s, cfg, env, o.seed);
  write_trace(dir, "trace_" + s.label, trace, f);
  std::cout << s.label << " [" << trace.mode << "]: " << to_string(trace.workspace_class) << ", " << trace.outcome
            << ", best distance " << describe(trace.best_distance()) << ", " << trace.samples.size() << " steps\n";
  return 0;
}

int cmd_suite(const Options& o) {
  const auto cfg = load(o);
  const Format f = parse_format(o.format);
  const auto dir = prepare_out(o);
  const auto env = prepare_environment(cfg);
  std::string csv = "label,center_x,center_y,center_z,radius,class,outcome,best_dist,steps\n";
  nlohmann::json js = nlohmann::json::array();
  for (const auto& s : scenarios(cfg, env, o.seed)) {
    const Trace trace = run_scenario(s, cfg, env, o.seed);
    write_trace(dir, "trace_" + s.label, trace, f);
    const Target t = s.targets.empty() ? Target{} : s.targets.front();
    csv += s.label + "," + fmt_num(t.center.x()) + "," + fmt_num(t.center.y()) + "," + fmt_num(t.center.z()) + "," +
           fmt_num(t.radius) + "," + to_string(trace.workspace_class) + "," + trace.outcome + "," +
           fmt_num(trace.best_distance()) + "," + std::to_string(trace.samples.size()) + "\n";
    js.push_back({{"label", s.label},
                  {"center", {round_num(t.center.x()), round_num(t.center.y()), round_num(t.center.z())}},
                  {"radius", round_num(t.radius)},
                  {"class", to_string(trace.workspace_class)},
                  {"outcome", trace.outcome},
                  {"best_dist", json_num(trace.best_distance())},
                  {"steps", trace.samples.size()}});
    std::cout << s.label << ": " << to_string(trace.workspace_class) << ", " << trace.outcome << ", best "
              << describe(trace.best_distance()) << "\n";
  }
  write_file(dir / ("suite" + extension(f)), f == Format::Csv ? csv : js.dump(2) + "\n");
  return 0;
}

int cmd_compare(const Options& o) {
  const auto cfg = load(o);
  const Format f = parse_format(o.format);
  const auto modes = parse_modes(o.modes, cfg.constant_restoring);
  const auto dir = prepare_out(o);
  const auto env = prepare_environment(cfg);
  const auto report = compare_strategies(scenarios(cfg, env, o.seed), cfg, env, o.seed, modes,
                                         [&](const Trace& t) { write_trace(dir, "trace_" + t.label + "_" + t.mode, t, f); });
  if (f == Format::Csv) {
    write_file(dir / "runs.csv", runs_csv(report));
    write_file(dir / "comparison.csv", comparison_csv(report));
  } else {
    write_file(dir / "comparison.json", to_json(report).dump(2) + "\n");
  }
  for (const auto& c : report.comparisons)
    std::cout << c.cluster << " " << c.pair << ": " << fmt_num(c.mean_diff * 1000.0) << " +- "
              << fmt_num(c.std_diff * 1000.0) << " mm (n=" << c.n_trials << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tendon-driven continuum arm: exploration and reaching experiments"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON configuration file");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--seed", o.seed, "seed for suite placement and sensor noise");
    sub->add_option("--format", o.format, "csv or json");
  };
  auto* characterize_cmd = app.add_subcommand("characterize", "sweep the six principal bending directions");
  auto* explore_cmd = app.add_subcommand("explore", "run the exploration phase on one scenario");
  auto* reach_cmd = app.add_subcommand("reach", "run exploration and reaching on one scenario");
  auto* suite_cmd = app.add_subcommand("suite", "run every scenario of the target suite");
  auto* compare_cmd = app.add_subcommand("compare", "compare antagonist strategies over the suite");
  for (auto* sub : {characterize_cmd, explore_cmd, reach_cmd, suite_cmd, compare_cmd}) add_common(sub);
  for (auto* sub : {explore_cmd, reach_cmd}) sub->add_option("--scenario", o.scenario, "scenario label");
  compare_cmd->add_option("--modes", o.modes, "comma-separated list of none,constant,proportional");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*characterize_cmd) return cmd_characterize(o);
    if (*explore_cmd) return cmd_explore(o);
    if (*reach_cmd) return cmd_reach(o);
    if (*suite_cmd) return cmd_suite(o);
    if (*compare_cmd) return cmd_compare(o);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
