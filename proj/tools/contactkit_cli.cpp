// contactkit command-line entry point.
//
// Exit codes: 0 success, 1 criteria failure, 2 usage or config error,
// 3 runtime fault.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "contactkit/errors.hpp"
#include "contactkit/figures.hpp"
#include "contactkit/io.hpp"
#include "contactkit/scenarios.hpp"
#include "contactkit/sensing.hpp"

namespace fs = std::filesystem;
using namespace contactkit;

namespace {

constexpr int kOk = 0;
constexpr int kCriteria = 1;
constexpr int kUsage = 2;
constexpr int kFault = 3;

fs::path default_out_root() {
  const char* env = std::getenv("CONTACTKIT_OUT");
  return env != nullptr && *env != '\0' ? fs::path(env) : fs::path("contactkit_out");
}

fs::path default_config_dir() {
  const char* env = std::getenv("CONTACTKIT_CONFIG_DIR");
  return env != nullptr && *env != '\0' ? fs::path(env) : fs::path("configs");
}

struct Options {
  std::string config;
  std::string out;
  std::string episode;
  std::string samples;
  std::string figure;
  std::uint64_t seed = 0;
  int trials = 0;
  bool quiet = false;
};

void print_metrics(const ScenarioReport& r) {
  std::cout << "scenario " << r.scenario_id << " seed=" << r.seed << " trials=" << r.trials
            << " config=" << r.config_hash << "\n";
  for (const auto& [k, v] : r.metrics) std::cout << "  " << k << " = " << format_double(v) << "\n";
  if (r.table) std::cout << "\n" << render_table(*r.table);
  for (const std::string& n : r.notes) std::cout << "note: " << n << "\n";
}

int cmd_run(const Options& o, const CLI::App& sub) {
  if (!fs::exists(o.config)) {
    std::cerr << "error: config file not found: " << o.config << "\n";
    return kUsage;
  }
  KeyValueConfig values = KeyValueConfig::load(o.config);
  if (sub.count("--seed") > 0) values.set("scenario.seed", std::to_string(o.seed));
  if (sub.count("--trials") > 0) values.set("scenario.trials", std::to_string(o.trials));
  const ScenarioConfig cfg = ScenarioConfig::from_values(values);

  const ScenarioReport report = run_scenario(cfg);
  const fs::path out = o.out.empty() ? default_out_root() / cfg.scenario_id : fs::path(o.out);
  write_report(report, out);
  if (!o.quiet) {
    print_metrics(report);
    std::cout << "report: " << (out / "report.json").string() << "\n";
  }
  const auto failed = failed_thresholds(report);
  for (const std::string& f : failed) std::cerr << "criterion failed: " << f << "\n";
  if (!o.quiet) std::cout << (report.success ? "PASS" : "FAIL") << "\n";
  return report.success ? kOk : kCriteria;
}

int cmd_calibrate(const Options& o) {
  if (!fs::exists(o.samples)) {
    std::cerr << "error: sample file not found: " << o.samples << "\n";
    return kUsage;
  }
  const auto samples = load_calibration_samples(o.samples);
  IdentifiedPayload p;
  try {
    p = identify_payload(samples);
  } catch (const IdentificationError& e) {
    std::cerr << "calibration failed: " << e.what() << "\n";
    return kCriteria;
  }
  const fs::path out = o.out.empty() ? default_out_root() / "payload.json" : fs::path(o.out);
  save_payload(out, p);
  if (!o.quiet) {
    std::cout << "samples " << samples.size() << "\n"
              << "mass " << format_double(p.mass) << "\n"
              << "com " << format_double(p.com.x()) << " " << format_double(p.com.y()) << " "
              << format_double(p.com.z()) << "\n"
              << "bias";
    for (int i = 0; i < 6; ++i) std::cout << " " << format_double(p.bias[i]);
    std::cout << "\nresidual_rms";
    for (int i = 0; i < 6; ++i) std::cout << " " << format_double(p.residual_rms[i]);
    std::cout << "\npayload: " << out.string() << "\n";
  }
  return kOk;
}

int cmd_validate(const Options& o) {
  if (!fs::is_directory(o.episode)) {
    std::cerr << "error: episode directory not found: " << o.episode << "\n";
    return kUsage;
  }
  const auto violations = validate_episode_dir(o.episode);
  for (const Violation& v : violations) {
    std::cout << "violation";
    if (!v.stream.empty()) std::cout << " stream '" << v.stream << "'";
    if (v.row > 0) std::cout << " row " << v.row;
    std::cout << ": " << v.message << "\n";
  }
  if (violations.empty() && !o.quiet) std::cout << "valid\n";
  return violations.empty() ? kOk : kCriteria;
}

int cmd_inspect(const Options& o) {
  const fs::path dir(o.episode);
  if (fs::exists(dir / "report.json")) {
    std::cout << read_text_file(dir / "report.json");
    const auto j = nlohmann::json::parse(read_text_file(dir / "report.json"));
    if (j.contains("table")) {
      ReportTable t{j["table"]["title"], j["table"]["columns"], j["table"]["rows"]};
      std::cout << "\n" << render_table(t);
    }
    return kOk;
  }
  const EpisodeRecord e = load_episode(dir);
  const EpisodeManifest& m = e.manifest();
  std::cout << "episode " << m.episode_id << " (" << m.format_version << ")\n"
            << "config_hash " << m.config_hash << "\n";
  const auto [lo, hi] = e.span();
  std::cout << "span " << format_double(lo) << " .. " << format_double(hi) << " s\n";
  for (const StreamSpec& s : m.streams) {
    const auto& rows = e.samples(s.name);
    std::cout << "  " << s.name << " [" << to_string(s.kind) << "] " << format_double(s.rate_hz) << " Hz, "
              << s.columns.size() << " columns, " << rows.size() << " rows\n";
  }
  return kOk;
}

int cmd_plot_data(const Options& o) {
  const EpisodeRecord e = load_episode(o.episode);
  const FigureTable f = figure_data(e, o.figure);
  const fs::path out = o.out.empty() ? default_out_root() / "plots" : fs::path(o.out);
  const fs::path file = out / (o.figure + ".csv");
  write_text_file(file, f.to_csv());
  if (!o.quiet) std::cout << f.rows.size() << " rows -> " << file.string() << "\n";
  return kOk;
}

int cmd_list(const Options& o) {
  std::cout << "scenarios:\n";
  for (const std::string& id : scenario_ids()) std::cout << "  " << id << "\n";
  const fs::path dir = o.config.empty() ? default_config_dir() : fs::path(o.config);
  if (fs::is_directory(dir)) {
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.path().extension() == ".ini") files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
    std::cout << "configs in " << dir.string() << ":\n";
    for (const std::string& f : files) std::cout << "  " << f << "\n";
  }
  std::cout << "figure kinds:\n";
  for (const std::string& k : figure_kinds()) std::cout << "  " << k << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"contactkit: contact-rich manipulation scenarios, calibration and episode tools"};
  app.require_subcommand(1, 1);
  Options o;

  CLI::App* run = app.add_subcommand("run", "Run a scenario config and write its report and episode");
  run->add_option("--config,config", o.config, "Scenario config file")->required();
  run->add_option("--out", o.out, "Output directory (default $CONTACTKIT_OUT/<scenario>)");
  run->add_option("--seed", o.seed, "Seed override");
  run->add_option("--trials", o.trials, "Trial count override")->check(CLI::PositiveNumber);
  run->add_flag("--quiet", o.quiet, "Only print failures");

  CLI::App* cal = app.add_subcommand("calibrate", "Identify a payload from a calibration sample CSV");
  cal->add_option("--samples,samples", o.samples, "Calibration sample CSV")->required();
  cal->add_option("--out", o.out, "Payload file to write (default $CONTACTKIT_OUT/payload.json)");
  cal->add_flag("--quiet", o.quiet, "Do not print the payload");

  CLI::App* val = app.add_subcommand("validate", "Check an episode directory against the format");
  val->add_option("--episode,episode", o.episode, "Episode directory")->required();
  val->add_flag("--quiet", o.quiet, "Only print violations");

  CLI::App* ins = app.add_subcommand("inspect", "Summarise an episode or a run directory");
  ins->add_option("--episode,path", o.episode, "Episode or run directory")->required();

  CLI::App* plot = app.add_subcommand("plot-data", "Write a plot-ready CSV for a figure analog");
  plot->add_option("--episode,episode", o.episode, "Episode directory")->required();
  plot->add_option("--figure,figure", o.figure, "Figure kind")->required()->check(CLI::IsMember(figure_kinds()));
  plot->add_option("--out", o.out, "Output directory (default $CONTACTKIT_OUT/plots)");
  plot->add_flag("--quiet", o.quiet, "Do not print the output path");

  CLI::App* list = app.add_subcommand("list", "List scenarios, configs and figure kinds");
  list->add_option("--config", o.config, "Config directory (default $CONTACTKIT_CONFIG_DIR or ./configs)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return cmd_run(o, *run);
    if (*cal) return cmd_calibrate(o);
    if (*val) return cmd_validate(o);
    if (*ins) return cmd_inspect(o);
    if (*plot) return cmd_plot_data(o);
    if (*list) return cmd_list(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return kUsage;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "runtime fault: " << e.what() << "\n";
    return kFault;
  }
  return kUsage;
}
