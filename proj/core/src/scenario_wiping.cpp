#include <algorithm>
#include <cmath>

#include "contactkit/errors.hpp"
#include "contactkit/scenarios.hpp"
#include "scenario_util.hpp"

namespace contactkit {

namespace {

constexpr double kFrictionVelocityScale = 0.01;  // m/s, smooths sign(v) in the demo

double total_duration(const WipingConfig& c) {
  return c.approach_duration + c.press_duration + c.settle_duration + c.strokes * c.stroke_duration +
         c.retreat_duration;
}

double slide_start(const WipingConfig& c) { return c.approach_duration + c.press_duration + c.settle_duration; }

Pose start_pose(const WipingConfig& c) {
  Pose p = forward_kinematics(reference_six_dof(), reference_six_dof_home());
  p.translation.y() = -c.stroke_half_length;
  return p;
}

std::vector<double> pose_row(const Pose& p) {
  const Rot6D r6 = encode_rot6d(p.rotation);
  return {p.translation.x(), p.translation.y(), p.translation.z(), r6.a1.x(), r6.a1.y(), r6.a1.z(),
          r6.a2.x(),         r6.a2.y(),         r6.a2.z()};
}

Pose row_pose(const std::vector<double>& v) {
  return {decode_rot6d({{v[3], v[4], v[5]}, {v[6], v[7], v[8]}}), {v[0], v[1], v[2]}};
}

EpisodeManifest action_manifest(const WipingConfig& c, const std::string& id) {
  EpisodeManifest m;
  m.episode_id = id;
  m.config_hash = c.config_hash;
  m.streams = {{"action", c.action_rate_hz, action_stream_columns(), StreamKind::kAction}};
  return m;
}

// Payload identification the way the hardware pipeline does it: averaged
// readings in the standard orientation set.
IdentifiedPayload calibrate_tool(const PayloadSpec& tool, double sigma, std::mt19937_64& rng) {
  std::vector<CalibrationSample> samples;
  const SimState idle;
  for (const Mat3& r : calibration_orientations("standard")) {
    std::vector<Wrench> readings;
    for (int i = 0; i < 200; ++i) readings.push_back(read_ft_sensor(idle, tool, Pose{r, Vec3::Zero()}, sigma, rng));
    samples.push_back({r, average_wrench(readings)});
  }
  return identify_payload(samples);
}

ComplianceCommand blend(const ComplianceCommand& a, const ComplianceCommand& b, double s) {
  ComplianceCommand out = b;
  out.virtual_target.translation = (1.0 - s) * a.virtual_target.translation + s * b.virtual_target.translation;
  out.kp_diag = (1.0 - s) * a.kp_diag + s * b.kp_diag;
  return out;
}

}  // namespace

std::vector<Threshold> default_wiping_thresholds(bool wrench_aware, double force_target) {
  if (wrench_aware) {
    return {{"min_trial_mean_fz", ">=", 0.85 * force_target},
            {"max_trial_mean_fz", "<=", 1.15 * force_target},
            {"min_frac_above", ">=", 0.95},
            {"success_rate", ">=", 1.0}};
  }
  return {{"max_trial_mean_fz", "<", 1.0}, {"success_rate", "<=", 0.0}};
}

WipingConfig WipingConfig::from_config(const ScenarioConfig& cfg) {
  WipingConfig c;
  c.seed = cfg.seed;
  c.config_hash = cfg.hash();
  c.trials = cfg.trials;
  c.surface_z = detail::read_double(cfg, "wiping.surface_z", c.surface_z);
  c.plane_stiffness = detail::read_double(cfg, "wiping.plane_stiffness", c.plane_stiffness);
  c.plane_damping = detail::read_double(cfg, "wiping.plane_damping", c.plane_damping);
  c.friction_mu = detail::read_double(cfg, "wiping.friction_mu", c.friction_mu);
  c.force_target = detail::read_double(cfg, "wiping.force_target", c.force_target);
  c.baseline_offset = detail::read_double(cfg, "wiping.baseline_offset", c.baseline_offset);
  c.height_jitter = detail::read_double(cfg, "wiping.height_jitter", c.height_jitter);
  c.stroke_half_length = detail::read_double(cfg, "wiping.stroke_half_length", c.stroke_half_length);
  c.strokes = detail::read_int(cfg, "wiping.strokes", c.strokes);
  c.stroke_duration = detail::read_double(cfg, "wiping.stroke_duration", c.stroke_duration);
  c.approach_duration = detail::read_double(cfg, "wiping.approach_duration", c.approach_duration);
  c.press_duration = detail::read_double(cfg, "wiping.press_duration", c.press_duration);
  c.settle_duration = detail::read_double(cfg, "wiping.settle_duration", c.settle_duration);
  c.retreat_duration = detail::read_double(cfg, "wiping.retreat_duration", c.retreat_duration);
  c.action_rate_hz = detail::read_double(cfg, "wiping.action_rate_hz", c.action_rate_hz);
  c.chunk_len = detail::read_int(cfg, "wiping.chunk_len", c.chunk_len);
  c.chunk_stride = detail::read_int(cfg, "wiping.chunk_stride", c.chunk_stride);
  c.erase_force = detail::read_double(cfg, "wiping.erase_force", c.erase_force);
  c.cell_size = detail::read_double(cfg, "wiping.cell_size", c.cell_size);
  c.sensor_noise = detail::read_double(cfg, "wiping.sensor_noise", c.sensor_noise);
  c.tool_mass = detail::read_double(cfg, "wiping.tool_mass", c.tool_mass);
  c.tool_com = cfg.values.get_vec3("wiping.tool_com", c.tool_com);
  c.schedule = detail::read_schedule(cfg);
  c.impedance = ImpedanceConfig::from_config(cfg.values);

  if (!(c.plane_stiffness > 0.0) || c.plane_damping < 0.0 || c.friction_mu < 0.0) {
    throw ConfigError("wiping: plane_stiffness must be > 0, damping and friction_mu >= 0");
  }
  if (c.force_target < 0.0 || c.height_jitter < 0.0 || c.sensor_noise < 0.0) {
    throw ConfigError("wiping: force_target, height_jitter, sensor_noise must be >= 0");
  }
  if (!(c.stroke_half_length > 0.0) || c.strokes < 1 || !(c.stroke_duration > 0.0)) {
    throw ConfigError("wiping: need stroke_half_length > 0, strokes >= 1, stroke_duration > 0");
  }
  if (!(c.approach_duration > 0.0 && c.press_duration > 0.0 && c.settle_duration >= 0.0 && c.retreat_duration > 0.0)) {
    throw ConfigError("wiping: phase durations must be positive");
  }
  if (!(c.action_rate_hz > 0.0) || c.chunk_len < 1 || c.chunk_stride < 1 || c.chunk_stride > c.chunk_len) {
    throw ConfigError("wiping: need action_rate_hz > 0 and 1 <= chunk_stride <= chunk_len");
  }
  const double ticks = 1.0 / (c.action_rate_hz * c.impedance.dt);
  if (std::abs(ticks - std::round(ticks)) > 1e-9) {
    throw ConfigError("wiping: action period must be a whole number of control ticks");
  }
  if (!(c.cell_size > 0.0) || !(c.erase_force > 0.0) || !(c.tool_mass > 0.0)) {
    throw ConfigError("wiping: cell_size, erase_force, tool_mass must be > 0");
  }
  c.thresholds_with = cfg.thresholds(default_wiping_thresholds(true, c.force_target));
  c.thresholds_without = cfg.thresholds(default_wiping_thresholds(false, c.force_target));
  return c;
}

EpisodeRecord wiping_demonstration(const WipingConfig& c, bool use_wrench, std::uint64_t trial_seed) {
  std::mt19937_64 rng(trial_seed);
  const Pose start = start_pose(c);
  const double z_top = start.translation.z();
  const double L = c.stroke_half_length;
  const double t_slide = slide_start(c);
  const double t_retreat = t_slide + c.strokes * c.stroke_duration;
  const int rows = static_cast<int>(std::llround(total_duration(c) * c.action_rate_hz)) + 1;

  EpisodeRecord demo(action_manifest(c, "wiping-demo-" + std::string(use_wrench ? "wrench" : "position")));
  Vec3 prev = start.translation;
  for (int k = 0; k < rows; ++k) {
    const double t = k / c.action_rate_hz;
    const double z_contact = c.surface_z + (k == 0 ? 0.0 : detail::uniform(rng, -c.height_jitter, c.height_jitter));
    double y = -L;
    double vy = 0.0;
    double z = z_contact;
    double fz = 0.0;
    if (t < c.approach_duration) {
      z = z_top + (c.surface_z - z_top) * detail::min_jerk(t / c.approach_duration).s;
    } else if (t < t_slide) {
      fz = c.force_target * std::min(1.0, (t - c.approach_duration) / c.press_duration);
    } else if (t < t_retreat) {
      const int stroke = static_cast<int>((t - t_slide) / c.stroke_duration);
      const double tau = (t - t_slide - stroke * c.stroke_duration) / c.stroke_duration;
      const double from = stroke % 2 == 0 ? -L : L;
      const detail::MinJerk mj = detail::min_jerk(tau);
      y = from - 2.0 * from * mj.s;
      vy = -2.0 * from * mj.ds / c.stroke_duration;
      fz = c.force_target;
    } else {
      y = c.strokes % 2 == 0 ? -L : L;
      const double tau = (t - t_retreat) / c.retreat_duration;
      fz = c.force_target * std::max(0.0, 1.0 - 2.0 * tau);
      if (tau > 0.5) z = c.surface_z + (z_top - c.surface_z) * detail::min_jerk(2.0 * tau - 1.0).s;
    }
    if (!use_wrench) fz = 0.0;

    ActionStep step;
    const Vec3 p(start.translation.x(), y, z);
    step.delta_xyz = k == 0 ? Vec3::Zero() : Vec3(p - prev);
    prev = k == 0 ? start.translation : p;
    step.rot6d = encode_rot6d(start.rotation);
    // Friction acts against the sliding direction, on the robot.
    step.force = Vec3(0.0, -c.friction_mu * fz * std::tanh(vy / kFrictionVelocityScale), fz);
    step.gripper_width = 0.0;
    const auto row = step.to_row();
    demo.record("action", t, row);
  }
  return demo;
}

WipingTrial execute_wiping(const WipingConfig& c, const EpisodeRecord& demo, double surface_offset,
                           std::uint64_t trial_seed) {
  std::mt19937_64 rng(trial_seed ^ 0x5eed5eedULL);
  const ArmDynamicsModel model = reference_six_dof_dynamics();
  const double dt = c.impedance.dt;
  ImpedanceSession session(model, c.impedance);

  ContactPlane plane;
  plane.offset = c.surface_z + surface_offset;
  plane.stiffness = c.plane_stiffness;
  plane.damping = c.plane_damping;
  plane.friction_mu = c.friction_mu;
  plane.validate();

  const IkResult ik = solve_ik(model.chain, reference_six_dof_home(), start_pose(c));
  if (!ik.converged) throw SimulationFault("wiping: start pose unreachable");
  SimState state = make_rest_state(model, ik.q);
  const Pose start = forward_kinematics(model.chain, state.q);

  PayloadSpec tool;
  tool.mass = c.tool_mass;
  tool.com_in_sensor = c.tool_com;
  tool.sensor_bias << 0.3, -0.2, 0.5, 0.01, -0.01, 0.005;
  const IdentifiedPayload payload = calibrate_tool(tool, c.sensor_noise, rng);
  const WrenchFrameModel frame{model.chain.tool.inverse(), false};

  RecedingHorizonScheduler scheduler(c.schedule, start, c.chunk_stride);
  const std::vector<Sample>& actions = demo.samples(demo.find_kind(StreamKind::kAction)->name);
  const int ticks_per_action = static_cast<int>(std::llround(1.0 / (c.action_rate_hz * dt)));

  EpisodeManifest manifest = action_manifest(c, demo.manifest().episode_id + "-executed");
  manifest.streams.push_back({"pose", 200.0, pose_columns(), StreamKind::kPose});
  manifest.streams.push_back({"wrench_raw", 1.0 / dt, wrench_columns(), StreamKind::kWrench});
  manifest.streams.push_back({"wrench", 1.0 / dt, wrench_columns(), StreamKind::kWrench});
  WipingTrial out{.sliding_fz = {}, .episode = EpisodeRecord(manifest)};
  EpisodeRecord& episode = out.episode;
  for (const Sample& a : actions) episode.record("action", a.t, a.values);

  const double L = c.stroke_half_length;
  const int cells = static_cast<int>(std::ceil(2.0 * L / c.cell_size - 1e-9));
  std::vector<bool> cleared(static_cast<std::size_t>(cells), false);
  const double lag = 1.0 / c.action_rate_hz;
  const double t0 = slide_start(c) + lag;
  const double t1 = slide_start(c) + c.strokes * c.stroke_duration + lag;

  ComplianceCommand prev;
  prev.reference = start;
  prev.virtual_target = start;
  prev.kp_diag = Vec3::Constant(c.schedule.k_max);
  int tick = 0;
  for (std::size_t k = 0; k < actions.size(); ++k) {
    if (k % static_cast<std::size_t>(c.chunk_stride) == 0) {
      scheduler.push(action_chunk_at(demo, k, c.chunk_len));
    }
    const ComplianceCommand cmd = scheduler.next().command;
    for (int j = 0; j < ticks_per_action; ++j, ++tick) {
      const double t = tick * dt;
      const ComplianceCommand now = blend(prev, cmd, static_cast<double>(j + 1) / ticks_per_action);
      const Pose ee = forward_kinematics(model.chain, state.q);
      const Pose sensor = ee * model.chain.tool.inverse();
      const Wrench raw = read_ft_sensor(state, tool, sensor, c.sensor_noise, rng);
      const Wrench comp = compensate_wrench(raw, payload, sensor.rotation, frame);
      const Vec3 f_world = ee.rotation * comp.force;
      const Vec3 t_world = ee.rotation * comp.torque;

      if (tick % 5 == 0) episode.record("pose", t, pose_row(ee));
      const Vec6 rv = raw.vector();
      Vec6 wv;
      wv << f_world, t_world;
      episode.record("wrench_raw", t, std::span<const double>(rv.data(), 6));
      episode.record("wrench", t, std::span<const double>(wv.data(), 6));

      if (t >= t0 && t < t1) out.sliding_fz.push_back(f_world.z());
      if (state.normal_force >= c.erase_force) {
        const int idx = std::clamp(static_cast<int>(std::floor((ee.translation.y() + L) / c.cell_size)), 0, cells - 1);
        cleared[static_cast<std::size_t>(idx)] = true;
      }

      const TickOutput control = session.execute_tick(state, now);
      state = step(model, state, control.tau, &plane, dt);
    }
    prev = cmd;
  }

  if (!out.sliding_fz.empty()) {
    out.mean_fz = detail::mean(out.sliding_fz);
    out.min_fz = *std::min_element(out.sliding_fz.begin(), out.sliding_fz.end());
    const auto above = std::count_if(out.sliding_fz.begin(), out.sliding_fz.end(),
                                     [&](double f) { return f >= c.erase_force; });
    out.frac_above = static_cast<double>(above) / static_cast<double>(out.sliding_fz.size());
  }
  out.residual = static_cast<double>(std::count(cleared.begin(), cleared.end(), false)) / cells;
  return out;
}

EpisodeRecord rerecord_actions(const WipingConfig& c, const EpisodeRecord& executed) {
  const std::vector<Sample>& actions = executed.samples(executed.find_kind(StreamKind::kAction)->name);
  const std::vector<Sample>& wrench = executed.samples("wrench");
  const double period = 1.0 / c.action_rate_hz;
  const double t_last = executed.samples("pose").back().t;

  EpisodeRecord demo(action_manifest(c, executed.manifest().episode_id + "-rerecorded"));
  Vec3 prev = row_pose(align(executed, 0.0, {"pose"}).at("pose").values).translation;
  std::size_t w = 0;
  for (std::size_t k = 0; k < actions.size(); ++k) {
    // Command k is reached one action period later, so row k takes the pose
    // and mean force measured over the following period.
    const double t_from = actions[k].t;
    const double t_to = std::min(t_from + period, t_last);
    const Pose p = row_pose(align(executed, t_to, {"pose"}).at("pose").values);
    Vec3 f = Vec3::Zero();
    int n = 0;
    while (w < wrench.size() && wrench[w].t <= t_from) ++w;
    for (std::size_t i = w; i < wrench.size() && wrench[i].t <= t_to; ++i, ++n) {
      f += Vec3(wrench[i].values[0], wrench[i].values[1], wrench[i].values[2]);
    }
    if (n > 0) f /= n;

    ActionStep step = ActionStep::from_row(actions[k].values);
    step.delta_xyz = k == 0 ? Vec3::Zero() : Vec3(p.translation - prev);
    if (k > 0) prev = p.translation;
    step.rot6d = encode_rot6d(p.rotation);
    step.force = f;
    const auto row = step.to_row();
    demo.record("action", actions[k].t, row);
  }
  return demo;
}

ScenarioReport run_wiping(const WipingConfig& config, bool use_wrench) {
  ScenarioReport report;
  report.scenario_id = "wiping";
  report.variant = use_wrench ? "with_wrench" : "without_wrench";
  report.seed = config.seed;
  report.trials = config.trials;
  report.config_hash = config.config_hash;
  report.thresholds = use_wrench ? config.thresholds_with : config.thresholds_without;
  const double offset = use_wrench ? 0.0 : config.baseline_offset;

  std::vector<double> means;
  std::vector<double> mins;
  std::vector<double> fracs;
  std::vector<double> residuals;
  int success5 = 0;
  int success50 = 0;
  std::optional<EpisodeRecord> first;
  std::vector<double> first_trace;
  for (int k = 0; k < config.trials; ++k) {
    const std::uint64_t seed = detail::trial_seed(config.seed, k);
    const EpisodeRecord demo = wiping_demonstration(config, use_wrench, seed);
    WipingTrial trial = execute_wiping(config, demo, offset, seed);
    means.push_back(trial.mean_fz);
    mins.push_back(trial.min_fz);
    fracs.push_back(trial.frac_above);
    residuals.push_back(trial.residual);
    success5 += trial.residual < 0.05 ? 1 : 0;
    success50 += trial.residual < 0.50 ? 1 : 0;
    if (k == 0) {
      first_trace = trial.sliding_fz;
      first = std::move(trial.episode);
    }
  }
  const double n = static_cast<double>(config.trials);
  report.set_metric("mean_fz", detail::mean(means));
  report.set_metric("min_trial_mean_fz", *std::min_element(means.begin(), means.end()));
  report.set_metric("max_trial_mean_fz", *std::max_element(means.begin(), means.end()));
  report.set_metric("min_fz", *std::min_element(mins.begin(), mins.end()));
  report.set_metric("min_frac_above", *std::min_element(fracs.begin(), fracs.end()));
  report.set_metric("mean_residual", detail::mean(residuals));
  report.set_metric("success_rate", success5 / n);
  report.set_metric("success_rate_50", success50 / n);

  if (use_wrench && first) {
    // Replay stability: re-record the executed episode and run it again.
    const EpisodeRecord second = rerecord_actions(config, *first);
    const WipingTrial again = execute_wiping(config, second, offset, detail::trial_seed(config.seed, 0));
    const std::size_t m = std::min(first_trace.size(), again.sliding_fz.size());
    std::vector<double> diff;
    for (std::size_t i = 0; i < m; ++i) diff.push_back(again.sliding_fz[i] - first_trace[i]);
    report.set_metric("replay_rms_rel", detail::rms(diff) / detail::rms(first_trace));
  }

  report.table = ReportTable{"wrench_erasing_results",
                             {"Method", "Success Rate@5% Residual (%)", "Success Rate@50% Residual (%)"},
                             {{use_wrench ? "w/ Wrench (Ours)" : "w/o Wrench", detail::percent(success5 / n),
                               detail::percent(success50 / n)}}};
  report.notes.push_back("scripted demonstration replayed through chunked execution; not a learned policy");
  if (!use_wrench) {
    report.notes.push_back("surface shifted by " + format_double(config.baseline_offset) +
                           " m relative to the demonstrated height");
  }
  report.episode = std::move(first);
  report.success = evaluate_success(report);
  return report;
}

}  // namespace contactkit
