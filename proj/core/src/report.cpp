#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "contactkit/errors.hpp"
#include "contactkit/io.hpp"
#include "contactkit/scenarios.hpp"
#include "scenario_util.hpp"

namespace contactkit {

namespace detail {

MinJerk min_jerk(double tau) {
  const double t = std::clamp(tau, 0.0, 1.0);
  const double t2 = t * t;
  const double t3 = t2 * t;
  return {10.0 * t3 - 15.0 * t3 * t + 6.0 * t3 * t2, 30.0 * t2 - 60.0 * t3 + 30.0 * t2 * t2,
          60.0 * t - 180.0 * t2 + 120.0 * t3};
}

std::uint64_t trial_seed(std::uint64_t seed, int trial) {
  // splitmix64 step over (seed, trial).
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(trial + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double read_double(const ScenarioConfig& cfg, const std::string& key, double fallback) {
  return cfg.values.get_double(key, fallback);
}

int read_int(const ScenarioConfig& cfg, const std::string& key, int fallback) {
  return cfg.values.get_int(key, fallback);
}

StiffnessSchedule read_schedule(const ScenarioConfig& cfg) {
  StiffnessSchedule s;
  s.k_max = read_double(cfg, "compliance.k_max", s.k_max);
  s.k_min = read_double(cfg, "compliance.k_min", s.k_min);
  s.f_sat = read_double(cfg, "compliance.f_sat", s.f_sat);
  const std::string mode = cfg.values.get_string("compliance.mode", "per_axis");
  if (mode == "per_axis") {
    s.mode = StiffnessSchedule::Mode::kPerAxis;
  } else if (mode == "magnitude") {
    s.mode = StiffnessSchedule::Mode::kMagnitude;
  } else {
    throw ConfigError("compliance.mode must be per_axis or magnitude, got '" + mode + "'");
  }
  s.validate();
  return s;
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double rms(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s / static_cast<double>(v.size()));
}

std::string percent(double rate) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(1);
  out << 100.0 * rate;
  return out.str();
}

}  // namespace detail

bool Threshold::passes(double x) const {
  if (!std::isfinite(x)) return false;
  if (op == "<") return x < value;
  if (op == "<=") return x <= value;
  if (op == ">") return x > value;
  if (op == ">=") return x >= value;
  if (op == "==") return x == value;
  throw InvalidArgument("threshold: unknown operator '" + op + "'");
}

std::string Threshold::describe() const { return metric + " " + op + " " + format_double(value); }

Threshold Threshold::parse(const std::string& metric, const std::string& text) {
  std::string t = trim(text);
  if (t.size() >= 2 && t.front() == '"' && t.back() == '"') t = trim(t.substr(1, t.size() - 2));
  for (const char* op : {"<=", ">=", "==", "<", ">"}) {
    const std::string o(op);
    if (t.rfind(o, 0) == 0) {
      try {
        return {metric, o, parse_double(trim(t.substr(o.size())), metric)};
      } catch (const FormatError& e) {
        throw ConfigError(std::string("threshold ") + e.what());
      }
    }
  }
  throw ConfigError("threshold for '" + metric + "' must look like '<op> <value>', got '" + text + "'");
}

bool ScenarioReport::has_metric(const std::string& name) const {
  return std::any_of(metrics.begin(), metrics.end(), [&](const auto& m) { return m.first == name; });
}

double ScenarioReport::metric(const std::string& name) const {
  for (const auto& [k, v] : metrics) {
    if (k == name) return v;
  }
  throw InvalidArgument("report '" + scenario_id + "' has no metric '" + name + "'");
}

void ScenarioReport::set_metric(const std::string& name, double value) {
  for (auto& [k, v] : metrics) {
    if (k == name) {
      v = value;
      return;
    }
  }
  metrics.emplace_back(name, value);
}

std::vector<std::string> failed_thresholds(const ScenarioReport& report) {
  std::vector<std::string> failed;
  for (const Threshold& t : report.thresholds) {
    if (!report.has_metric(t.metric)) {
      failed.push_back(t.describe() + " (metric not reported)");
    } else if (!t.passes(report.metric(t.metric))) {
      failed.push_back(t.describe() + " (got " + format_double(report.metric(t.metric)) + ")");
    }
  }
  return failed;
}

bool evaluate_success(const ScenarioReport& report) { return failed_thresholds(report).empty(); }

std::string report_json(const ScenarioReport& report) {
  nlohmann::ordered_json j;
  j["scenario_id"] = report.scenario_id;
  j["variant"] = report.variant;
  j["seed"] = report.seed;
  j["trials"] = report.trials;
  j["config_hash"] = report.config_hash;
  j["success"] = report.success;
  nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
  for (const auto& [k, v] : report.metrics) metrics[k] = v;
  j["metrics"] = metrics;
  j["thresholds"] = nlohmann::ordered_json::array();
  for (const Threshold& t : report.thresholds) {
    const bool passed = report.has_metric(t.metric) && t.passes(report.metric(t.metric));
    j["thresholds"].push_back({{"metric", t.metric}, {"op", t.op}, {"value", t.value}, {"passed", passed}});
  }
  j["notes"] = report.notes;
  if (report.table) {
    j["table"] = {{"title", report.table->title}, {"columns", report.table->columns}, {"rows", report.table->rows}};
  }
  if (report.episode) j["episode"] = "episode/manifest.json";
  return j.dump(2) + "\n";
}

std::string render_table(const ReportTable& table) {
  std::vector<std::size_t> width(table.columns.size(), 0);
  for (std::size_t c = 0; c < table.columns.size(); ++c) width[c] = table.columns[c].size();
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size() && c < width.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  auto line = [&](const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t c = 0; c < width.size(); ++c) {
      const std::string cell = c < cells.size() ? cells[c] : "";
      out += (c == 0 ? "" : " | ") + cell + std::string(width[c] - cell.size(), ' ');
    }
    return out + "\n";
  };
  std::string out = table.title + "\n" + line(table.columns);
  std::string rule;
  for (std::size_t c = 0; c < width.size(); ++c) rule += (c == 0 ? "" : "-|-") + std::string(width[c], '-');
  out += rule + "\n";
  for (const auto& row : table.rows) out += line(row);
  return out;
}

void write_report(const ScenarioReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text_file(dir / "report.json", report_json(report));

  std::string csv = "# scenario=" + report.scenario_id + " seed=" + std::to_string(report.seed) +
                    " trials=" + std::to_string(report.trials) + "\nmetric,value\n";
  for (const auto& [k, v] : report.metrics) csv += k + "," + format_double(v) + "\n";
  write_text_file(dir / "metrics.csv", csv);

  if (report.table) {
    std::string t;
    for (std::size_t c = 0; c < report.table->columns.size(); ++c) {
      t += (c ? "," : "") + report.table->columns[c];
    }
    t += "\n";
    for (const auto& row : report.table->rows) {
      for (std::size_t c = 0; c < row.size(); ++c) t += (c ? "," : "") + row[c];
      t += "\n";
    }
    write_text_file(dir / "table.csv", t);
  }
  if (report.episode) export_csv(*report.episode, dir / "episode");
}

ScenarioConfig ScenarioConfig::from_values(const KeyValueConfig& values) {
  ScenarioConfig cfg;
  cfg.values = values;
  cfg.scenario_id = values.get_string("scenario.id");
  const std::string seed = values.get_string("scenario.seed", "1");
  try {
    std::size_t used = 0;
    cfg.seed = std::stoull(seed, &used);
    if (used != seed.size()) throw std::invalid_argument(seed);
  } catch (const std::exception&) {
    throw ConfigError("config key 'scenario.seed' is not an unsigned integer: " + seed);
  }
  cfg.trials = values.get_int("scenario.trials", 10);
  if (cfg.trials < 1) throw ConfigError("scenario.trials must be >= 1");
  const auto ids = scenario_ids();
  if (std::find(ids.begin(), ids.end(), cfg.scenario_id) == ids.end()) {
    throw ConfigError("unknown scenario id '" + cfg.scenario_id + "'");
  }
  return cfg;
}

ScenarioConfig ScenarioConfig::load(const std::filesystem::path& path) {
  return from_values(KeyValueConfig::load(path));
}

std::string ScenarioConfig::hash() const { return fnv1a_hex(values.canonical_text()); }

std::vector<Threshold> ScenarioConfig::thresholds(const std::vector<Threshold>& defaults) const {
  std::vector<Threshold> out = defaults;
  for (Threshold& t : out) {
    const std::string key = "thresholds." + t.metric;
    if (values.has(key)) t = Threshold::parse(t.metric, values.get_string(key));
  }
  return out;
}

std::vector<std::string> scenario_ids() {
  return {"gravity_verification", "bottle_pick", "wiping", "selective_release", "bilateral_signal_quality"};
}

namespace {

// Prefixes the metrics and thresholds of a variant report and appends them.
void merge_variant(ScenarioReport& into, const ScenarioReport& part, const std::string& prefix) {
  for (const auto& [k, v] : part.metrics) into.metrics.emplace_back(prefix + "." + k, v);
  for (Threshold t : part.thresholds) {
    t.metric = prefix + "." + t.metric;
    into.thresholds.push_back(t);
  }
  for (const std::string& n : part.notes) into.notes.push_back(prefix + ": " + n);
}

ScenarioReport paired(const ScenarioConfig& cfg, const ScenarioReport& without, const ScenarioReport& with,
                      const std::string& without_prefix, const std::string& with_prefix, ReportTable table) {
  ScenarioReport r;
  r.scenario_id = cfg.scenario_id;
  r.variant = "paired";
  r.seed = cfg.seed;
  r.trials = cfg.trials;
  r.config_hash = cfg.hash();
  merge_variant(r, without, without_prefix);
  merge_variant(r, with, with_prefix);
  std::vector<std::string> without_row = without.table->rows.front();
  std::vector<std::string> with_row = with.table->rows.front();
  table.rows = {without_row, with_row};
  r.table = table;
  r.episode = with.episode;
  r.notes.push_back("trial count " + std::to_string(r.trials) +
                    " per condition is a chosen value; the reference results are rates only");
  r.success = evaluate_success(r);
  return r;
}

}  // namespace

ScenarioReport run_scenario(const ScenarioConfig& cfg) {
  const std::string& id = cfg.scenario_id;
  ScenarioReport r;
  if (id == "gravity_verification") {
    r = run_gravity_verification(GravityVerificationConfig::from_config(cfg));
  } else if (id == "bottle_pick") {
    const BottlePickConfig c = BottlePickConfig::from_config(cfg);
    const ScenarioReport with = run_bottle_pick(c, true);
    r = paired(cfg, run_bottle_pick(c, false), with, "without_force", "with_force", *with.table);
  } else if (id == "wiping") {
    const WipingConfig c = WipingConfig::from_config(cfg);
    const ScenarioReport with = run_wiping(c, true);
    r = paired(cfg, run_wiping(c, false), with, "without_wrench", "with_wrench", *with.table);
  } else if (id == "selective_release") {
    const SelectiveReleaseConfig c = SelectiveReleaseConfig::from_config(cfg);
    const ScenarioReport with = run_selective_release(c, true);
    r = paired(cfg, run_selective_release(c, false), with, "without_tactile", "with_tactile", *with.table);
  } else if (id == "bilateral_signal_quality") {
    r = run_bilateral_signal_quality(BilateralQualityConfig::from_config(cfg));
  } else {
    throw ConfigError("unknown scenario id '" + id + "'");
  }
  r.config_hash = cfg.hash();
  return r;
}

}  // namespace contactkit
