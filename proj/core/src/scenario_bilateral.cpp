#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "contactkit/errors.hpp"
#include "contactkit/scenarios.hpp"
#include "scenario_util.hpp"

namespace contactkit {

namespace {

struct Profile {
  double force = 0.0;   // reference F_int
  double contact = 0.0; // 0 before the fingers reach the object, 1 after
  double contact_rate = 0.0;
  double force_rate = 0.0;
};

double profile_duration(const BilateralQualityConfig& c) {
  return c.approach_duration + c.ramp_duration + c.hold_duration + c.wipe_duration + c.release_duration;
}

// Pick (approach, ramp, hold), wipe (modulated squeeze), place (ramp down).
Profile reference_profile(const BilateralQualityConfig& c, double t) {
  Profile p;
  if (c.profile == "zero") return p;
  const double t_ramp = c.approach_duration;
  const double t_hold = t_ramp + c.ramp_duration;
  const double t_wipe = t_hold + c.hold_duration;
  const double t_release = t_wipe + c.wipe_duration;
  if (t < t_ramp) {
    const detail::MinJerk mj = detail::min_jerk(t / c.approach_duration);
    p.contact = mj.s;
    p.contact_rate = mj.ds / c.approach_duration;
    return p;
  }
  p.contact = 1.0;
  if (t < t_hold) {
    const detail::MinJerk mj = detail::min_jerk((t - t_ramp) / c.ramp_duration);
    p.force = c.force_hold * mj.s;
    p.force_rate = c.force_hold * mj.ds / c.ramp_duration;
  } else if (t < t_wipe) {
    p.force = c.force_hold;
  } else if (t < t_release) {
    const double w = 2.0 * std::numbers::pi * c.wipe_hz;
    p.force = c.force_hold + c.wipe_amplitude * std::sin(w * (t - t_wipe));
    p.force_rate = c.wipe_amplitude * w * std::cos(w * (t - t_wipe));
  } else {
    const detail::MinJerk mj = detail::min_jerk((t - t_release) / c.release_duration);
    p.force = c.force_hold * (1.0 - mj.s);
    p.force_rate = -c.force_hold * mj.ds / c.release_duration;
  }
  return p;
}

}  // namespace

std::vector<Threshold> default_bilateral_thresholds() { return {{"rms_reduction", ">", 0.0}}; }

BilateralQualityConfig BilateralQualityConfig::from_config(const ScenarioConfig& cfg) {
  BilateralQualityConfig c;
  c.seed = cfg.seed;
  c.config_hash = cfg.hash();
  c.trials = cfg.trials;
  c.profile = cfg.values.get_string("bilateral.profile", c.profile);
  c.force_hold = detail::read_double(cfg, "bilateral.force_hold", c.force_hold);
  c.wipe_amplitude = detail::read_double(cfg, "bilateral.wipe_amplitude", c.wipe_amplitude);
  c.wipe_hz = detail::read_double(cfg, "bilateral.wipe_hz", c.wipe_hz);
  c.approach_duration = detail::read_double(cfg, "bilateral.approach_duration", c.approach_duration);
  c.ramp_duration = detail::read_double(cfg, "bilateral.ramp_duration", c.ramp_duration);
  c.hold_duration = detail::read_double(cfg, "bilateral.hold_duration", c.hold_duration);
  c.wipe_duration = detail::read_double(cfg, "bilateral.wipe_duration", c.wipe_duration);
  c.release_duration = detail::read_double(cfg, "bilateral.release_duration", c.release_duration);
  c.object_width = detail::read_double(cfg, "bilateral.object_width", c.object_width);
  c.believed_stiffness = detail::read_double(cfg, "bilateral.believed_stiffness", c.believed_stiffness);
  c.stiffness_factor_min = detail::read_double(cfg, "bilateral.stiffness_factor_min", c.stiffness_factor_min);
  c.stiffness_factor_max = detail::read_double(cfg, "bilateral.stiffness_factor_max", c.stiffness_factor_max);
  c.onset_error = detail::read_double(cfg, "bilateral.onset_error", c.onset_error);
  c.operator_stiffness = detail::read_double(cfg, "bilateral.operator_stiffness", c.operator_stiffness);
  c.operator_damping = detail::read_double(cfg, "bilateral.operator_damping", c.operator_damping);
  c.dt = detail::read_double(cfg, "bilateral.dt", c.dt);
  c.gripper = GripperParams::from_config(cfg.values);
  if (c.profile != "pick-wipe-place" && c.profile != "zero") {
    throw ConfigError("bilateral.profile must be pick-wipe-place or zero, got '" + c.profile + "'");
  }
  if (!(c.approach_duration > 0.0 && c.ramp_duration > 0.0 && c.hold_duration >= 0.0 && c.wipe_duration >= 0.0 &&
        c.release_duration > 0.0)) {
    throw ConfigError("bilateral: phase durations must be positive");
  }
  if (!(c.object_width > 0.0 && c.object_width < c.gripper.w_max)) {
    throw ConfigError("bilateral.object_width must be in (0, gripper.w_max)");
  }
  if (!(c.believed_stiffness > 0.0) || !(c.stiffness_factor_min > 0.0) || c.stiffness_factor_max < c.stiffness_factor_min) {
    throw ConfigError("bilateral: need believed_stiffness > 0 and 0 < stiffness_factor_min <= stiffness_factor_max");
  }
  if (c.onset_error < 0.0 || !(c.operator_stiffness > 0.0) || c.operator_damping < 0.0) {
    throw ConfigError("bilateral: onset_error >= 0, operator_stiffness > 0, operator_damping >= 0");
  }
  if (!(c.dt > 0.0 && c.dt <= 0.005)) throw ConfigError("bilateral.dt must be in (0, 0.005]");
  c.thresholds = cfg.thresholds(default_bilateral_thresholds());
  return c;
}

BilateralTrace simulate_bilateral_setting(const BilateralQualityConfig& c, const GripperParams& gp,
                                          double stiffness_factor, double onset_error) {
  const double cw = gp.width_per_rad;
  // The operator plans in master angle using the expected object and the
  // device feel: object compliance, slave position loop and, when torque is
  // reflected, the series compliance of the rendered force.
  const double theta_contact = theta_for_width(c.object_width, gp);
  const double slave_compliance = 1.0 / (c.believed_stiffness * cw) + cw / gp.kp;
  const double feel = gp.reflection ? cw / (gp.a * c.operator_stiffness) : 0.0;
  // Actual object: stiffer than believed and with the surface offset.
  const GraspContactModel object{c.object_width - onset_error, c.believed_stiffness * stiffness_factor};
  const OperatorModel hand{c.operator_stiffness, c.operator_damping};

  BilateralTrace trace;
  BilateralState s;
  const int ticks = static_cast<int>(std::llround(profile_duration(c) / c.dt));
  std::vector<double> err;
  for (int i = 0; i < ticks; ++i) {
    const double t = i * c.dt;
    const Profile p = reference_profile(c, t);
    const double plan = ((theta_contact + gp.delta) * p.contact + p.force * slave_compliance) / gp.b + p.force * feel;
    const double plan_rate =
        ((theta_contact + gp.delta) * p.contact_rate + p.force_rate * slave_compliance) / gp.b + p.force_rate * feel;
    s = step_bilateral(s, hand.drive_torque(s, plan, plan_rate), &object, gp, c.dt);
    trace.t.push_back(s.time);
    trace.reference.push_back(p.force);
    trace.states.push_back(s);
    err.push_back(estimate_internal_force(s.current_s, gp) - p.force);
  }
  trace.rms_deviation = detail::rms(err);
  return trace;
}

ScenarioReport run_bilateral_signal_quality(const BilateralQualityConfig& config) {
  ScenarioReport report;
  report.scenario_id = "bilateral_signal_quality";
  report.variant = config.profile;
  report.seed = config.seed;
  report.trials = config.trials;
  report.config_hash = config.config_hash;
  report.thresholds = config.thresholds;

  GripperParams open_loop = config.gripper;
  open_loop.reflection = false;
  GripperParams bilateral = config.gripper;
  bilateral.reflection = true;

  std::mt19937_64 rng(config.seed);
  std::vector<double> rms_open;
  std::vector<double> rms_bilateral;
  std::optional<EpisodeRecord> episode;
  for (int k = 0; k < config.trials; ++k) {
    const double factor = detail::uniform(rng, config.stiffness_factor_min, config.stiffness_factor_max);
    const double onset = detail::uniform(rng, -config.onset_error, config.onset_error);
    const BilateralTrace a = simulate_bilateral_setting(config, open_loop, factor, onset);
    const BilateralTrace b = simulate_bilateral_setting(config, bilateral, factor, onset);
    rms_open.push_back(a.rms_deviation);
    rms_bilateral.push_back(b.rms_deviation);
    if (k == 0) {
      EpisodeManifest m;
      m.episode_id = "bilateral_signal_quality-" + std::to_string(config.seed);
      m.config_hash = config.config_hash;
      const double rate = 1.0 / config.dt;
      m.streams = {{"reference", rate, {"F_ref"}, StreamKind::kGripper},
                   {"gripper_open_loop", rate, gripper_columns(), StreamKind::kGripper},
                   {"gripper", rate, gripper_columns(), StreamKind::kGripper}};
      episode.emplace(m);
      for (std::size_t i = 0; i < a.t.size(); ++i) {
        const std::vector<double> ref = {a.reference[i]};
        episode->record("reference", a.t[i], ref);
        episode->record("gripper_open_loop", a.t[i], bilateral_row(a.states[i], open_loop));
        episode->record("gripper", b.t[i], bilateral_row(b.states[i], bilateral));
      }
    }
  }
  const double open_mean = detail::mean(rms_open);
  const double bil_mean = detail::mean(rms_bilateral);
  report.set_metric("rms_reference", 0.0);
  report.set_metric("rms_open_loop", open_mean);
  report.set_metric("rms_bilateral", bil_mean);
  report.set_metric("rms_reduction", open_mean - bil_mean);
  int wins = 0;
  for (std::size_t i = 0; i < rms_open.size(); ++i) wins += rms_bilateral[i] < rms_open[i] ? 1 : 0;
  report.set_metric("paired_win_rate", static_cast<double>(wins) / config.trials);
  if (config.profile == "zero") {
    // Nothing moves, so no setting can deviate from the reference.
    report.thresholds = {{"rms_open_loop", "==", 0.0}, {"rms_bilateral", "==", 0.0}};
  }

  auto fmt = [](double x) {
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(3);
    out << x;
    return out.str();
  };
  report.table = ReportTable{"grasp_force_signal_quality",
                             {"Setting", "RMS deviation of F_int from reference (N)"},
                             {{"Reference profile", fmt(0.0)},
                              {"Teleoperation w/o force feedback", fmt(open_mean)},
                              {"Bilateral (Ours)", fmt(bil_mean)}}};
  report.notes.push_back("signal-level proxy with a scripted operator model; not a human study");
  report.episode = std::move(episode);
  report.success = evaluate_success(report);
  return report;
}

}  // namespace contactkit
