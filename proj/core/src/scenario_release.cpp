#include <algorithm>
#include <cmath>
#include <numbers>

#include "contactkit/errors.hpp"
#include "contactkit/scenarios.hpp"
#include "scenario_util.hpp"

namespace contactkit {

namespace {

// Unit marker-offset pattern of a symmetric squeeze: radial displacement that
// grows toward the center of the 9 x 7 marker grid.
const std::vector<double>& squeeze_pattern() {
  static const std::vector<double> pattern = [] {
    std::vector<double> p;
    for (int r = 0; r < 9; ++r) {
      for (int c = 0; c < 7; ++c) {
        const double u = (c - 3.0) / 3.0;
        const double v = (r - 4.0) / 4.0;
        const double w = std::exp(-(u * u + v * v));
        p.push_back(w * u);
        p.push_back(w * v + 0.5 * w);
      }
    }
    double n = 0.0;
    for (double x : p) n += x * x;
    n = std::sqrt(n);
    for (double& x : p) x /= n;
    return p;
  }();
  return pattern;
}

struct ReleaseTrial {
  bool inner_held = true;
  bool outer_held = true;
  double final_width = 0.0;
};

ReleaseTrial run_release_trial(const SelectiveReleaseConfig& c, bool use_tactile, double w_inner,
                               std::uint64_t seed, EpisodeRecord* episode) {
  std::mt19937_64 rng(seed);
  const double w_outer = w_inner + c.outer_gap;
  const double dt = 1e-3;
  const double frame_period = 1.0 / c.tactile_rate_hz;
  const double target = use_tactile ? std::numeric_limits<double>::infinity() : c.fixed_width;

  ReleaseTrial out;
  double width = c.start_width;
  bool holding = false;
  double next_frame = 0.0;
  std::optional<double> prev_norm;
  const int ticks = static_cast<int>(std::llround(c.max_duration / dt));
  for (int i = 0; i <= ticks; ++i) {
    const double t = i * dt;
    out.inner_held = out.inner_held && width < w_inner;
    out.outer_held = out.outer_held && width < w_outer;

    if (t + 1e-12 >= next_frame) {
      next_frame += frame_period;
      const double squeeze_mm = out.outer_held ? std::max(0.0, (w_outer - width) * 1000.0) : 0.0;
      const TactileFrame frame = tactile_frame(c, squeeze_mm, out.inner_held && out.outer_held, rng);
      const double norm = marker_motion_magnitude(frame);
      if (use_tactile && prev_norm && *prev_norm - norm > c.drop_threshold) holding = true;
      prev_norm = norm;
      if (episode != nullptr) {
        episode->record("tactile", t, frame.marker_offsets);
        const std::vector<double> g = {width, out.inner_held ? 1.0 : 0.0, out.outer_held ? 1.0 : 0.0};
        episode->record("gripper", t, g);
      }
    }
    if (!holding) width = std::min(target, width + c.open_rate * dt);
  }
  out.final_width = width;
  return out;
}

}  // namespace

std::vector<Threshold> default_release_thresholds(bool tactile) {
  if (tactile) return {{"degenerate", "<=", 0.0}, {"selective_rate", ">=", 1.0}, {"both_retained_rate", "<=", 0.0}};
  return {{"degenerate", "<=", 0.0}, {"selective_rate", "<=", 0.3}};
}

SelectiveReleaseConfig SelectiveReleaseConfig::from_config(const ScenarioConfig& cfg) {
  SelectiveReleaseConfig c;
  c.seed = cfg.seed;
  c.config_hash = cfg.hash();
  c.trials = cfg.trials;
  c.start_width = detail::read_double(cfg, "release.start_width", c.start_width);
  c.open_rate = detail::read_double(cfg, "release.open_rate", c.open_rate);
  c.inner_min = detail::read_double(cfg, "release.inner_min", c.inner_min);
  c.inner_max = detail::read_double(cfg, "release.inner_max", c.inner_max);
  c.inner_jitter = detail::read_double(cfg, "release.inner_jitter", c.inner_jitter);
  c.outer_gap = detail::read_double(cfg, "release.outer_gap", c.outer_gap);
  c.fixed_width = detail::read_double(cfg, "release.fixed_width", c.fixed_width);
  c.tactile_rate_hz = detail::read_double(cfg, "release.tactile_rate_hz", c.tactile_rate_hz);
  c.tactile_noise = detail::read_double(cfg, "release.tactile_noise", c.tactile_noise);
  c.squeeze_gain = detail::read_double(cfg, "release.squeeze_gain", c.squeeze_gain);
  c.inner_load = detail::read_double(cfg, "release.inner_load", c.inner_load);
  c.drop_threshold = detail::read_double(cfg, "release.drop_threshold", c.drop_threshold);
  c.max_duration = detail::read_double(cfg, "release.max_duration", c.max_duration);
  if (!(c.open_rate > 0.0) || !(c.tactile_rate_hz > 0.0) || !(c.max_duration > 0.0)) {
    throw ConfigError("release: open_rate, tactile_rate_hz, max_duration must be > 0");
  }
  if (!(c.start_width < c.inner_min) || c.inner_max < c.inner_min) {
    throw ConfigError("release: need start_width < inner_min <= inner_max");
  }
  if (c.inner_jitter < 0.0 || c.inner_jitter > 1.0 || c.tactile_noise < 0.0 || !(c.drop_threshold > 0.0)) {
    throw ConfigError("release: inner_jitter in [0, 1], tactile_noise >= 0, drop_threshold > 0");
  }
  c.thresholds_with = cfg.thresholds(default_release_thresholds(true));
  c.thresholds_without = cfg.thresholds(default_release_thresholds(false));
  return c;
}

std::vector<double> sample_inner_widths(const SelectiveReleaseConfig& c) {
  std::mt19937_64 rng(c.seed);
  const double stratum = (c.inner_max - c.inner_min) / c.trials;
  std::vector<double> w;
  for (int k = 0; k < c.trials; ++k) {
    const double offset = 0.5 + c.inner_jitter * detail::uniform(rng, -0.5, 0.5);
    w.push_back(c.inner_min + (k + offset) * stratum);
  }
  return w;
}

TactileFrame tactile_frame(const SelectiveReleaseConfig& c, double squeeze_mm, bool inner_held,
                           std::mt19937_64& rng) {
  // The inner cup's load reaches the gel through the same contact patch, so
  // both terms share the squeeze pattern.
  const double amplitude = c.squeeze_gain * squeeze_mm + (inner_held ? c.inner_load : 0.0);
  std::normal_distribution<double> noise(0.0, c.tactile_noise);
  TactileFrame f;
  f.marker_offsets.reserve(kTactileDim);
  for (double p : squeeze_pattern()) f.marker_offsets.push_back(amplitude * p + (c.tactile_noise > 0.0 ? noise(rng) : 0.0));
  return f;
}

ScenarioReport run_selective_release(const SelectiveReleaseConfig& config, bool use_tactile) {
  ScenarioReport report;
  report.scenario_id = "selective_release";
  report.variant = use_tactile ? "with_tactile" : "without_tactile";
  report.seed = config.seed;
  report.trials = config.trials;
  report.config_hash = config.config_hash;
  report.thresholds = use_tactile ? config.thresholds_with : config.thresholds_without;

  const std::string label = use_tactile ? "w/ Tactile (Ours)" : "w/o Tactile";
  const ReportTable layout{"tactile_results",
                           {"Method", "Selective Release Success Rate (%)", "Both Cups Retained Rate (%)"},
                           {}};
  if (!(config.outer_gap > 0.0)) {
    report.set_metric("degenerate", 1.0);
    report.notes.push_back("degenerate config: outer release width does not exceed the inner one, "
                           "selective release is impossible");
    report.table = layout;
    report.table->rows.push_back({label, "n/a", "n/a"});
    report.success = evaluate_success(report);
    return report;
  }
  report.set_metric("degenerate", 0.0);

  EpisodeManifest manifest;
  manifest.episode_id = "selective_release-" + report.variant + "-" + std::to_string(config.seed);
  manifest.config_hash = config.config_hash;
  manifest.streams = {{"tactile", config.tactile_rate_hz, tactile_columns(), StreamKind::kTactile},
                      {"gripper", config.tactile_rate_hz, {"width", "inner_held", "outer_held"}, StreamKind::kGripper}};
  EpisodeRecord episode(manifest);

  const std::vector<double> inner = sample_inner_widths(config);
  int selective = 0;
  int both = 0;
  int dropped = 0;
  for (int k = 0; k < config.trials; ++k) {
    const ReleaseTrial trial = run_release_trial(config, use_tactile, inner[static_cast<std::size_t>(k)],
                                                 detail::trial_seed(config.seed, k), k == 0 ? &episode : nullptr);
    selective += (!trial.inner_held && trial.outer_held) ? 1 : 0;
    both += (trial.inner_held && trial.outer_held) ? 1 : 0;
    dropped += !trial.outer_held ? 1 : 0;
  }
  const double n = static_cast<double>(config.trials);
  report.set_metric("selective_rate", selective / n);
  report.set_metric("both_retained_rate", both / n);
  report.set_metric("both_released_rate", dropped / n);
  report.table = layout;
  report.table->rows.push_back({label, detail::percent(selective / n), detail::percent(both / n)});
  report.notes.push_back("inner release widths stratified over [" + format_double(config.inner_min) + ", " +
                         format_double(config.inner_max) + "] m, one stratum per trial");
  report.episode = std::move(episode);
  report.success = evaluate_success(report);
  return report;
}

}  // namespace contactkit
