#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "contactkit/bilateral.hpp"
#include "contactkit/config.hpp"
#include "contactkit/dynamics.hpp"
#include "contactkit/episodes.hpp"
#include "contactkit/impedance.hpp"
#include "contactkit/sensing.hpp"

namespace contactkit {

// "metric op value", e.g. "compensated_span < 0.5".
struct Threshold {
  std::string metric;
  std::string op;  // one of < <= > >= ==
  double value = 0.0;

  bool passes(double x) const;
  std::string describe() const;
  // Parses "op value" (the config form, metric given separately).
  static Threshold parse(const std::string& metric, const std::string& text);
};

struct ReportTable {
  std::string title;
  std::vector<std::string> columns;  // first column is the row label
  std::vector<std::vector<std::string>> rows;
};

struct ScenarioReport {
  std::string scenario_id;
  std::string variant;
  std::uint64_t seed = 0;
  int trials = 0;
  std::string config_hash;
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<Threshold> thresholds;
  bool success = false;
  std::vector<std::string> notes;
  std::optional<ReportTable> table;
  std::optional<EpisodeRecord> episode;

  bool has_metric(const std::string& name) const;
  double metric(const std::string& name) const;
  void set_metric(const std::string& name, double value);
};

// Success is exactly "every threshold passes on a reported metric". A
// threshold on a metric that was not reported fails.
bool evaluate_success(const ScenarioReport& report);
std::vector<std::string> failed_thresholds(const ScenarioReport& report);

// report.json, metrics.csv, table.csv (when present) and episode/ (when
// present) under `dir`.
void write_report(const ScenarioReport& report, const std::filesystem::path& dir);
std::string report_json(const ScenarioReport& report);
std::string render_table(const ReportTable& table);

// Common scenario header plus the raw key/value tree the typed configs read.
struct ScenarioConfig {
  std::string scenario_id;
  std::uint64_t seed = 1;
  int trials = 10;
  KeyValueConfig values;

  static ScenarioConfig from_values(const KeyValueConfig& values);
  static ScenarioConfig load(const std::filesystem::path& path);
  std::string hash() const;
  // Thresholds from the [thresholds] section; keys not present keep the
  // supplied defaults.
  std::vector<Threshold> thresholds(const std::vector<Threshold>& defaults) const;
};

std::vector<std::string> scenario_ids();

// ---- gravity verification -------------------------------------------------

std::vector<Threshold> default_gravity_thresholds();

struct GravityVerificationConfig {
  std::uint64_t seed = 1;
  std::string config_hash;  // stamped into generated episodes
  std::string pose_set = "standard";  // standard | minimal | coplanar
  int samples_per_pose = 1000;
  double sample_rate_hz = 1000.0;
  double raw_span = 6.7;  // N, sets the payload mass
  double noise_sigma = 0.05;
  Vec3 com{0.012, -0.008, 0.045};
  Vec6 bias = (Vec6() << 0.8, -0.5, 1.2, 0.02, -0.015, 0.01).finished();
  std::vector<Threshold> thresholds = default_gravity_thresholds();

  static GravityVerificationConfig from_config(const ScenarioConfig& cfg);
};

// Orientation sets of the calibration protocol.
std::vector<Mat3> calibration_orientations(const std::string& pose_set);

// Payload mass whose weight spans `raw_span` N on one sensor axis between
// opposite orientations.
double payload_mass_for_span(double raw_span, double g = 9.81);

ScenarioReport run_gravity_verification(const GravityVerificationConfig& config);

// ---- heavy bottle pick ----------------------------------------------------

std::vector<Threshold> default_bottle_thresholds(bool force_aware);

struct BottlePickConfig {
  std::uint64_t seed = 1;
  std::string config_hash;  // stamped into generated episodes
  int trials = 10;
  double mass_min = 0.52;  // kg
  double mass_max = 0.58;
  double mu_min = 0.45;
  double mu_max = 0.55;
  double object_width = 0.065;  // m
  double contact_stiffness = 5000.0;
  double contact_stiffness_spread = 0.10;  // relative, uniform
  double width_error = 3e-4;               // m, uniform +-
  double grasp_force = 12.0;               // N, force-aware command
  double width_only_squeeze = 5e-4;        // m past the estimated surface
  double force_gain = 0.5;                 // rad/(N*s), force-aware outer loop
  double close_duration = 0.6;             // s
  double settle_duration = 0.4;
  double lift_height = 0.15;               // m
  double lift_duration = 1.0;
  double hold_duration = 0.5;
  GripperParams gripper;
  ImpedanceConfig impedance;
  std::vector<Threshold> thresholds_with = default_bottle_thresholds(true);
  std::vector<Threshold> thresholds_without = default_bottle_thresholds(false);

  static BottlePickConfig from_config(const ScenarioConfig& cfg);
};

ScenarioReport run_bottle_pick(const BottlePickConfig& config, bool use_grasp_force);

// ---- whiteboard wiping ----------------------------------------------------

std::vector<Threshold> default_wiping_thresholds(bool wrench_aware, double force_target);

struct WipingConfig {
  std::uint64_t seed = 1;
  std::string config_hash;  // stamped into generated episodes
  int trials = 10;
  double surface_z = 0.08;       // m
  double plane_stiffness = 5e4;  // N/m
  double plane_damping = 200.0;  // N*s/m
  double friction_mu = 0.2;
  double force_target = 10.0;     // N
  double baseline_offset = -2e-3;  // m, surface shift in the position-only run
  double height_jitter = 3e-4;   // m, uniform +- on the demonstrated surface height
  double stroke_half_length = 0.08;
  int strokes = 2;
  double stroke_duration = 2.0;  // s per stroke
  double approach_duration = 1.0;
  double press_duration = 0.5;
  double settle_duration = 0.5;
  double retreat_duration = 0.5;
  double action_rate_hz = 10.0;
  int chunk_len = 16;
  int chunk_stride = 8;
  double erase_force = 7.0;  // N
  double cell_size = 2e-3;   // m
  double sensor_noise = 0.05;
  double tool_mass = 0.25;
  Vec3 tool_com{0.0, 0.0, 0.05};
  StiffnessSchedule schedule;
  ImpedanceConfig impedance;
  // Built from force_target; from_config rebuilds them after reading it.
  std::vector<Threshold> thresholds_with = default_wiping_thresholds(true, force_target);
  std::vector<Threshold> thresholds_without = default_wiping_thresholds(false, force_target);

  static WipingConfig from_config(const ScenarioConfig& cfg);
};

// Demonstrated action stream (10 Hz by default) for one trial, recorded into
// an episode with a single action stream.
EpisodeRecord wiping_demonstration(const WipingConfig& config, bool use_wrench, std::uint64_t trial_seed);

struct WipingTrial {
  double mean_fz = 0.0;       // N, over the sliding window
  double min_fz = 0.0;
  double frac_above = 0.0;    // fraction of sliding ticks with F_z >= erase_force
  double residual = 0.0;      // uncleared cell fraction
  std::vector<double> sliding_fz;
  EpisodeRecord episode;      // executed trajectory: pose, wrench_raw, wrench, action
};

// Replays the action stream of `demo` through chunked receding-horizon
// execution on the 6-DoF arm against the plane.
WipingTrial execute_wiping(const WipingConfig& config, const EpisodeRecord& demo, double surface_offset,
                           std::uint64_t trial_seed);

// Second-generation demonstration from an executed episode: actions are the
// executed end-effector deltas with the measured world force.
EpisodeRecord rerecord_actions(const WipingConfig& config, const EpisodeRecord& executed);

ScenarioReport run_wiping(const WipingConfig& config, bool use_wrench);

// ---- selective release ----------------------------------------------------

std::vector<Threshold> default_release_thresholds(bool tactile);

struct SelectiveReleaseConfig {
  std::uint64_t seed = 1;
  std::string config_hash;  // stamped into generated episodes
  int trials = 10;
  double start_width = 0.029;  // m
  double open_rate = 1e-3;     // m/s
  double inner_min = 0.030;    // release width distribution of the inner cup
  double inner_max = 0.035;
  double inner_jitter = 0.2;   // fraction of a stratum
  double outer_gap = 2e-3;     // w_o = w_i + gap
  double fixed_width = 0.031;  // baseline target
  double tactile_rate_hz = 30.0;
  double tactile_noise = 0.01;
  double squeeze_gain = 0.6;   // marker norm per mm of remaining squeeze
  double inner_load = 1.0;     // marker norm carried by the inner cup
  double drop_threshold = 0.5;
  double max_duration = 10.0;  // s
  std::vector<Threshold> thresholds_with = default_release_thresholds(true);
  std::vector<Threshold> thresholds_without = default_release_thresholds(false);

  static SelectiveReleaseConfig from_config(const ScenarioConfig& cfg);
};

// Stratified inner release widths, one stratum per trial.
std::vector<double> sample_inner_widths(const SelectiveReleaseConfig& config);

// Tactile frame for the given squeeze (mm) and inner-cup state.
TactileFrame tactile_frame(const SelectiveReleaseConfig& config, double squeeze_mm, bool inner_held,
                           std::mt19937_64& rng);

ScenarioReport run_selective_release(const SelectiveReleaseConfig& config, bool use_tactile);

// ---- bilateral signal quality ---------------------------------------------

std::vector<Threshold> default_bilateral_thresholds();

struct BilateralQualityConfig {
  std::uint64_t seed = 1;
  std::string config_hash;  // stamped into generated episodes
  int trials = 10;
  std::string profile = "pick-wipe-place";  // or "zero"
  double force_hold = 6.0;  // N
  double wipe_amplitude = 1.5;
  double wipe_hz = 1.0;
  double approach_duration = 0.5;
  double ramp_duration = 0.5;
  double hold_duration = 0.5;
  double wipe_duration = 2.0;
  double release_duration = 0.5;
  double object_width = 0.06;
  double believed_stiffness = 3000.0;  // N/m, the operator's expectation
  double stiffness_factor_min = 1.3;   // actual / believed
  double stiffness_factor_max = 1.9;
  double onset_error = 5e-4;           // m, uniform +-
  double operator_stiffness = 0.2;     // N*m/rad
  double operator_damping = 0.01;
  double dt = 1e-3;
  GripperParams gripper;
  std::vector<Threshold> thresholds = default_bilateral_thresholds();

  static BilateralQualityConfig from_config(const ScenarioConfig& cfg);
};

struct BilateralTrace {
  std::vector<double> t;
  std::vector<double> reference;  // N
  std::vector<BilateralState> states;
  double rms_deviation = 0.0;     // of F_int vs reference
};

// One setting of the comparison for a given actual stiffness and onset error.
BilateralTrace simulate_bilateral_setting(const BilateralQualityConfig& config, const GripperParams& gripper,
                                          double stiffness_factor, double onset_error);

ScenarioReport run_bilateral_signal_quality(const BilateralQualityConfig& config);

// ---- dispatch -------------------------------------------------------------

// Runs every variant the scenario compares and merges them into one report
// whose metrics are prefixed by variant.
ScenarioReport run_scenario(const ScenarioConfig& config);

}  // namespace contactkit
