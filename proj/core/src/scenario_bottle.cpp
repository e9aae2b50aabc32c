#include <algorithm>
#include <cmath>

#include "contactkit/errors.hpp"
#include "contactkit/scenarios.hpp"
#include "scenario_util.hpp"

namespace contactkit {

namespace {

struct BottleTrial {
  bool success = false;
  bool slipped = false;
  double grasp_force = 0.0;  // contact force at lift start
  double rise = 0.0;         // end-effector height gained
};

BottleTrial run_bottle_trial(const BottlePickConfig& cfg, bool use_grasp_force, std::uint64_t seed,
                             EpisodeRecord* episode) {
  std::mt19937_64 rng(seed);
  const double mass = detail::uniform(rng, cfg.mass_min, cfg.mass_max);
  const double mu = detail::uniform(rng, cfg.mu_min, cfg.mu_max);
  const double k_contact =
      cfg.contact_stiffness * (1.0 + detail::uniform(rng, -cfg.contact_stiffness_spread, cfg.contact_stiffness_spread));
  const double width_estimate = cfg.object_width + detail::uniform(rng, -cfg.width_error, cfg.width_error);

  const GripperParams& gp = cfg.gripper;
  const GraspContactModel contact{cfg.object_width, k_contact};
  const double c = gp.width_per_rad;
  // Series stiffness of object contact and slave position loop, nominal values.
  const double k_series = 1.0 / (1.0 / cfg.contact_stiffness + c * c / gp.kp);
  const double command_width = use_grasp_force ? width_estimate - cfg.grasp_force / k_series
                                               : width_estimate - cfg.width_only_squeeze;
  const double theta_open = theta_for_width(cfg.object_width + 0.01, gp);
  const double theta_close = theta_for_width(command_width, gp);

  BilateralState grip;
  grip.theta_m = grip.theta_s = theta_open;

  const ArmDynamicsModel model = reference_six_dof_dynamics();
  ImpedanceSession session(model, cfg.impedance);
  SimState arm = make_rest_state(model, reference_six_dof_home());
  const Pose start = forward_kinematics(model.chain, arm.q);

  const double dt = cfg.impedance.dt;
  const double t_lift = cfg.close_duration + cfg.settle_duration;
  const double t_end = t_lift + cfg.lift_duration + cfg.hold_duration;
  const int ticks = static_cast<int>(std::llround(t_end / dt));
  double integral = 0.0;
  double prev_theta_m = theta_open;
  BottleTrial out;

  for (int i = 0; i < ticks; ++i) {
    const double t = i * dt;
    // Master: kinematic closing profile plus, when force-aware, an integral
    // correction on the current-based force estimate.
    double theta_m = theta_open + (theta_close - theta_open) * detail::min_jerk(t / cfg.close_duration).s;
    if (use_grasp_force && t >= cfg.close_duration) {
      // Filtered estimate: the raw current carries the derivative term of the
      // slave loop, which would feed the integrator's own rate back.
      const double f_est = estimate_internal_force(grip.tau_s_filtered / gp.k_tau, gp);
      integral += cfg.force_gain * (cfg.grasp_force - f_est) * dt;
    }
    theta_m += integral;
    grip.theta_m = theta_m;
    grip.thetadot_m = (theta_m - prev_theta_m) / dt;
    prev_theta_m = theta_m;
    grip = step_bilateral(grip, 0.0, &contact, gp, dt);

    Pose ref = start;
    if (t >= t_lift) {
      ref.translation.z() += cfg.lift_height * detail::min_jerk((t - t_lift) / cfg.lift_duration).s;
      if (!arm.grasped_object) {
        arm.grasped_object = GraspedObject{mass, mu, grip.contact_force, false};
        out.grasp_force = grip.contact_force;
      }
      arm.grasped_object->internal_force = grip.contact_force;
    }
    ComplianceCommand cmd;
    cmd.reference = ref;
    cmd.virtual_target = ref;
    cmd.kp_diag = Vec3::Constant(cfg.impedance.k_max);
    const TickOutput tick = session.execute_tick(arm, cmd);

    if (episode != nullptr) {
      if (i % 2 == 0) {
        const auto row = bilateral_row(grip, gp);
        episode->record("gripper", t, row);
      }
      if (i % 5 == 0) {
        const Pose p = forward_kinematics(model.chain, arm.q);
        const Rot6D r6 = encode_rot6d(p.rotation);
        const std::vector<double> row = {p.translation.x(), p.translation.y(), p.translation.z(),
                                         r6.a1.x(), r6.a1.y(), r6.a1.z(), r6.a2.x(), r6.a2.y(), r6.a2.z()};
        episode->record("pose", t, row);
      }
    }
    arm = step(model, arm, tick.tau, nullptr, dt);
  }

  out.slipped = arm.grasped_object && arm.grasped_object->slipped;
  out.rise = forward_kinematics(model.chain, arm.q).translation.z() - start.translation.z();
  out.success = !out.slipped && out.rise >= 0.9 * cfg.lift_height;
  return out;
}

}  // namespace

std::vector<Threshold> default_bottle_thresholds(bool force_aware) {
  if (force_aware) return {{"success_rate", ">=", 1.0}, {"slip_rate", "<=", 0.0}};
  return {{"success_rate", "<=", 0.0}, {"slip_rate", ">=", 1.0}};
}

BottlePickConfig BottlePickConfig::from_config(const ScenarioConfig& cfg) {
  BottlePickConfig c;
  c.seed = cfg.seed;
  c.config_hash = cfg.hash();
  c.trials = cfg.trials;
  c.mass_min = detail::read_double(cfg, "bottle.mass_min", c.mass_min);
  c.mass_max = detail::read_double(cfg, "bottle.mass_max", c.mass_max);
  c.mu_min = detail::read_double(cfg, "bottle.mu_min", c.mu_min);
  c.mu_max = detail::read_double(cfg, "bottle.mu_max", c.mu_max);
  c.object_width = detail::read_double(cfg, "bottle.object_width", c.object_width);
  c.contact_stiffness = detail::read_double(cfg, "bottle.contact_stiffness", c.contact_stiffness);
  c.contact_stiffness_spread = detail::read_double(cfg, "bottle.contact_stiffness_spread", c.contact_stiffness_spread);
  c.width_error = detail::read_double(cfg, "bottle.width_error", c.width_error);
  c.grasp_force = detail::read_double(cfg, "bottle.grasp_force", c.grasp_force);
  c.width_only_squeeze = detail::read_double(cfg, "bottle.width_only_squeeze", c.width_only_squeeze);
  c.force_gain = detail::read_double(cfg, "bottle.force_gain", c.force_gain);
  c.close_duration = detail::read_double(cfg, "bottle.close_duration", c.close_duration);
  c.settle_duration = detail::read_double(cfg, "bottle.settle_duration", c.settle_duration);
  c.lift_height = detail::read_double(cfg, "bottle.lift_height", c.lift_height);
  c.lift_duration = detail::read_double(cfg, "bottle.lift_duration", c.lift_duration);
  c.hold_duration = detail::read_double(cfg, "bottle.hold_duration", c.hold_duration);
  c.gripper = GripperParams::from_config(cfg.values);
  c.impedance = ImpedanceConfig::from_config(cfg.values);

  if (c.mass_min < 0.0 || c.mass_max < c.mass_min) throw ConfigError("bottle: need 0 <= mass_min <= mass_max");
  if (c.mu_min <= 0.0 || c.mu_max < c.mu_min) throw ConfigError("bottle: need 0 < mu_min <= mu_max");
  if (!(c.object_width > 0.0 && c.object_width < c.gripper.w_max)) {
    throw ConfigError("bottle.object_width must be in (0, gripper.w_max)");
  }
  if (!(c.contact_stiffness > 0.0) || c.contact_stiffness_spread < 0.0 || c.contact_stiffness_spread >= 1.0) {
    throw ConfigError("bottle: contact_stiffness must be > 0 and spread in [0, 1)");
  }
  if (c.width_error < 0.0 || c.grasp_force < 0.0 || c.width_only_squeeze < 0.0 || c.force_gain < 0.0) {
    throw ConfigError("bottle: width_error, grasp_force, width_only_squeeze, force_gain must be >= 0");
  }
  if (!(c.close_duration > 0.0 && c.settle_duration >= 0.0 && c.lift_duration > 0.0 && c.hold_duration >= 0.0)) {
    throw ConfigError("bottle: phase durations must be positive");
  }
  c.thresholds_with = cfg.thresholds(default_bottle_thresholds(true));
  c.thresholds_without = cfg.thresholds(default_bottle_thresholds(false));
  return c;
}

ScenarioReport run_bottle_pick(const BottlePickConfig& config, bool use_grasp_force) {
  ScenarioReport report;
  report.scenario_id = "bottle_pick";
  report.variant = use_grasp_force ? "with_force" : "without_force";
  report.seed = config.seed;
  report.trials = config.trials;
  report.config_hash = config.config_hash;
  report.thresholds = use_grasp_force ? config.thresholds_with : config.thresholds_without;

  EpisodeManifest manifest;
  manifest.episode_id = "bottle_pick-" + report.variant + "-" + std::to_string(config.seed);
  manifest.config_hash = config.config_hash;
  manifest.streams = {{"gripper", 500.0, gripper_columns(), StreamKind::kGripper},
                      {"pose", 200.0, pose_columns(), StreamKind::kPose}};
  EpisodeRecord episode(manifest);

  int successes = 0;
  int slips = 0;
  std::vector<double> forces;
  for (int k = 0; k < config.trials; ++k) {
    const BottleTrial trial =
        run_bottle_trial(config, use_grasp_force, detail::trial_seed(config.seed, k), k == 0 ? &episode : nullptr);
    successes += trial.success ? 1 : 0;
    slips += trial.slipped ? 1 : 0;
    forces.push_back(trial.grasp_force);
  }
  const double n = static_cast<double>(config.trials);
  report.set_metric("success_rate", successes / n);
  report.set_metric("slip_rate", slips / n);
  report.set_metric("mean_grasp_force", detail::mean(forces));
  report.set_metric("min_grasp_force", *std::min_element(forces.begin(), forces.end()));
  report.table = ReportTable{"force_sensitive_results",
                             {"Method", "Success Rate (%)", "Slippage Rate (%)"},
                             {{use_grasp_force ? "w/ Grasping Force (Ours)" : "w/o Grasping Force",
                               detail::percent(successes / n), detail::percent(slips / n)}}};
  report.notes.push_back("scripted grasp policy on a simulated gripper; not a learned policy");
  report.episode = std::move(episode);
  report.success = evaluate_success(report);
  return report;
}

}  // namespace contactkit
