#include <algorithm>
#include <cmath>
#include <numbers>

#include "contactkit/errors.hpp"
#include "contactkit/scenarios.hpp"
#include "scenario_util.hpp"

namespace contactkit {

namespace {

constexpr double kPi = std::numbers::pi;

// Per-axis max - min over rows.
double max_axis_span(const std::vector<Vec3>& rows) {
  double span = 0.0;
  for (int a = 0; a < 3; ++a) {
    double lo = rows.front()[a];
    double hi = lo;
    for (const Vec3& r : rows) {
      lo = std::min(lo, r[a]);
      hi = std::max(hi, r[a]);
    }
    span = std::max(span, hi - lo);
  }
  return span;
}

}  // namespace

std::vector<Threshold> default_gravity_thresholds() {
  return {{"identified", ">=", 1.0}, {"compensated_span", "<", 0.5}, {"residual_rms", "<", 0.15}};
}

GravityVerificationConfig GravityVerificationConfig::from_config(const ScenarioConfig& cfg) {
  GravityVerificationConfig c;
  c.seed = cfg.seed;
  c.config_hash = cfg.hash();
  c.pose_set = cfg.values.get_string("gravity.pose_set", c.pose_set);
  c.samples_per_pose = detail::read_int(cfg, "gravity.samples_per_pose", c.samples_per_pose);
  c.sample_rate_hz = detail::read_double(cfg, "gravity.sample_rate_hz", c.sample_rate_hz);
  c.raw_span = detail::read_double(cfg, "gravity.raw_span", c.raw_span);
  c.noise_sigma = detail::read_double(cfg, "gravity.noise_sigma", c.noise_sigma);
  c.com = cfg.values.get_vec3("gravity.com", c.com);
  const std::vector<double> b = cfg.values.get_doubles("gravity.bias", {});
  if (!b.empty()) {
    if (b.size() != 6) throw ConfigError("config key 'gravity.bias' needs 6 values");
    c.bias = Eigen::Map<const Vec6>(b.data());
  }
  if (c.samples_per_pose < 1) throw ConfigError("gravity.samples_per_pose must be >= 1");
  if (!(c.sample_rate_hz > 0.0)) throw ConfigError("gravity.sample_rate_hz must be > 0");
  if (!(c.raw_span >= 0.0)) throw ConfigError("gravity.raw_span must be >= 0");
  if (!(c.noise_sigma >= 0.0)) throw ConfigError("gravity.noise_sigma must be >= 0");
  calibration_orientations(c.pose_set);
  c.thresholds = cfg.thresholds(default_gravity_thresholds());
  return c;
}

std::vector<Mat3> calibration_orientations(const std::string& pose_set) {
  if (pose_set == "standard") {
    return {Mat3::Identity(),
            rot_x(kPi),
            rot_x(kPi / 2.0),
            rot_x(-kPi / 2.0),
            rot_y(kPi / 2.0),
            rot_y(-kPi / 2.0),
            rot_x(kPi / 4.0) * rot_y(kPi / 6.0),
            rot_y(3.0 * kPi / 4.0) * rot_z(kPi / 3.0),
            rot_z(kPi / 2.0) * rot_x(2.0 * kPi / 3.0),
            rot_x(-kPi / 3.0) * rot_y(-kPi / 4.0)};
  }
  if (pose_set == "minimal") {
    return {Mat3::Identity(), rot_x(kPi / 2.0), rot_y(kPi / 2.0), rot_x(kPi)};
  }
  if (pose_set == "coplanar") {
    return {Mat3::Identity(), rot_x(kPi / 2.0), rot_x(kPi)};
  }
  throw ConfigError("gravity.pose_set must be standard, minimal or coplanar, got '" + pose_set + "'");
}

double payload_mass_for_span(double raw_span, double g) { return raw_span / (2.0 * g); }

ScenarioReport run_gravity_verification(const GravityVerificationConfig& config) {
  const std::vector<Mat3> poses = calibration_orientations(config.pose_set);
  PayloadSpec truth;
  truth.mass = payload_mass_for_span(config.raw_span);
  truth.com_in_sensor = config.com;
  truth.sensor_bias = config.bias;

  ScenarioReport report;
  report.scenario_id = "gravity_verification";
  report.variant = config.pose_set;
  report.seed = config.seed;
  report.trials = 1;
  report.config_hash = config.config_hash;
  report.thresholds = config.thresholds;

  EpisodeManifest manifest;
  manifest.episode_id = "gravity_verification-" + std::to_string(config.seed);
  manifest.config_hash = config.config_hash;
  manifest.streams = {{"pose", 1.0, pose_columns(), StreamKind::kPose},
                      {"wrench_raw", config.sample_rate_hz, wrench_columns(), StreamKind::kWrench},
                      {"wrench", config.sample_rate_hz, wrench_columns(), StreamKind::kWrench}};
  EpisodeRecord episode(manifest);

  std::mt19937_64 rng(config.seed);
  const SimState idle;
  const double dwell = static_cast<double>(config.samples_per_pose) / config.sample_rate_hz;
  std::vector<std::vector<Wrench>> raw(poses.size());
  std::vector<CalibrationSample> samples;
  for (std::size_t k = 0; k < poses.size(); ++k) {
    for (int i = 0; i < config.samples_per_pose; ++i) {
      raw[k].push_back(read_ft_sensor(idle, truth, Pose{poses[k], Vec3::Zero()}, config.noise_sigma, rng));
    }
    samples.push_back({poses[k], average_wrench(raw[k])});
  }

  std::vector<Vec3> raw_means;
  for (const CalibrationSample& s : samples) raw_means.push_back(s.raw.force);
  report.set_metric("raw_span", max_axis_span(raw_means));
  report.set_metric("payload_mass", truth.mass);

  IdentifiedPayload id;
  try {
    id = identify_payload(samples);
  } catch (const IdentificationError& e) {
    report.set_metric("identified", 0.0);
    report.notes.push_back(std::string("identification failed: ") + e.what());
    report.success = evaluate_success(report);
    return report;
  }
  report.set_metric("identified", 1.0);

  std::vector<Vec3> comp_means;
  Vec3 sq = Vec3::Zero();
  std::size_t count = 0;
  const WrenchFrameModel sensor_frame;
  for (std::size_t k = 0; k < poses.size(); ++k) {
    const double t0 = static_cast<double>(k) * dwell;
    const Rot6D r6 = encode_rot6d(poses[k]);
    const std::vector<double> pose_row = {0.0, 0.0, 0.0, r6.a1.x(), r6.a1.y(), r6.a1.z(), r6.a2.x(), r6.a2.y(), r6.a2.z()};
    episode.record("pose", t0, pose_row);
    Vec3 sum = Vec3::Zero();
    for (int i = 0; i < config.samples_per_pose; ++i) {
      const Wrench c = compensate_wrench(raw[k][i], id, poses[k], sensor_frame);
      sum += c.force;
      sq += c.force.cwiseAbs2();
      ++count;
      const double t = t0 + static_cast<double>(i) / config.sample_rate_hz;
      const Vec6 rv = raw[k][i].vector();
      const Vec6 cv = c.vector();
      episode.record("wrench_raw", t, std::span<const double>(rv.data(), 6));
      episode.record("wrench", t, std::span<const double>(cv.data(), 6));
    }
    comp_means.push_back(sum / config.samples_per_pose);
  }
  const Vec3 axis_rms = (sq / static_cast<double>(count)).cwiseSqrt();

  report.set_metric("compensated_span", max_axis_span(comp_means));
  report.set_metric("residual_rms", axis_rms.maxCoeff());
  report.set_metric("mass_identified", id.mass);
  report.set_metric("mass_rel_error", std::abs(id.mass - truth.mass) / truth.mass);
  report.set_metric("com_error", (id.com - truth.com_in_sensor).norm());
  report.set_metric("bias_error", (id.bias - truth.sensor_bias).norm());
  report.notes.push_back("spans use per-pose means of " + std::to_string(config.samples_per_pose) +
                         " samples; residual_rms is over individual samples");
  report.episode = std::move(episode);
  report.success = evaluate_success(report);
  return report;
}

}  // namespace contactkit
