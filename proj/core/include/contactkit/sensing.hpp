#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "contactkit/geometry.hpp"
#include "contactkit/wrench.hpp"

namespace contactkit {

inline const Vec3 kStandardGravity{0.0, 0.0, -9.81};

// Fixed pose of the sensor frame expressed in the end-effector frame.
struct WrenchFrameModel {
  Pose sensor_to_ee;
  // Drop the lever-arm term and only rotate the wrench.
  bool rotation_only = false;
};

struct IdentifiedPayload {
  double mass = 0.0;
  Vec3 com = Vec3::Zero();     // sensor frame, m
  Vec6 bias = Vec6::Zero();    // [force N; torque N*m]
  Vec6 residual_rms = Vec6::Zero();
};

struct CalibrationSample {
  Mat3 orientation = Mat3::Identity();  // sensor frame in world
  Wrench raw;
};

// Payload weight seen by the sensor plus the constant bias:
//   f = R^T (m g) + b_f,  t = com x (R^T m g) + b_t
Wrench gravity_wrench(const IdentifiedPayload& payload, const Mat3& sensor_orientation,
                      const Vec3& gravity = kStandardGravity);

// Linear least squares over [m, b_f, m*com, b_t]. Requires >= 4 samples whose
// gravity directions span 3D; otherwise throws IdentificationError describing
// the unobservable subspace.
IdentifiedPayload identify_payload(std::span<const CalibrationSample> samples,
                                   const Vec3& gravity = kStandardGravity);

// Adjoint map of a wrench from the sensor frame into the end-effector frame.
Wrench transform_wrench(const Wrench& sensor_wrench, const WrenchFrameModel& frame);

// w_ee = T_{s->ee}(w_raw - w_grav)
Wrench compensate_wrench(const Wrench& raw, const IdentifiedPayload& payload, const Mat3& sensor_orientation,
                         const WrenchFrameModel& frame, const Vec3& gravity = kStandardGravity);

Wrench average_wrench(std::span<const Wrench> readings);

inline constexpr std::size_t kTactileDim = 126;

// 63 markers x 2D displacement.
struct TactileFrame {
  std::vector<double> marker_offsets;
};

// l2 norm of the marker offsets; throws DimensionError unless length is 126.
double marker_motion_magnitude(const TactileFrame& frame);

// Calibration sample CSV: r6d_a1x..r6d_a2z, fx, fy, fz, tx, ty, tz.
std::vector<CalibrationSample> load_calibration_samples(const std::filesystem::path& path);
void save_calibration_samples(const std::filesystem::path& path, std::span<const CalibrationSample> samples);

// Payload file (JSON).
void save_payload(const std::filesystem::path& path, const IdentifiedPayload& payload);
IdentifiedPayload load_payload(const std::filesystem::path& path);

}  // namespace contactkit
