#pragma once

#include <array>
#include <optional>
#include <string>

#include "contactkit/config.hpp"

namespace contactkit {

struct GripperParams {
  double k_tau = 0.05;          // N*m/A
  double r_g = 0.01;            // m, effective meshing radius
  double kp = 2.0;              // N*m/rad
  double kd = 0.0283;           // N*m*s/rad (critical for kp, motor_inertia)
  double b = 1.0;               // position scaling
  double delta = 0.0;           // rad, installation offset
  double a = 2.0;               // reflected-torque divisor
  double b_l = 0.0;             // master velocity-feedback coefficient
  double motor_inertia = 1e-4;  // kg*m^2, both sides
  double viscous = 0.0;         // N*m*s/rad, both sides
  double filter_cutoff = 20.0;  // Hz
  double w_max = 0.10;          // m, width at theta_s = 0
  double width_per_rad = 0.01;  // m/rad; equal to r_g keeps force and width work-consistent
  // When false the master renders only the local velocity term.
  bool reflection = true;

  void validate() const;
  static GripperParams from_config(const KeyValueConfig& cfg, const std::string& section = "gripper");
};

struct BilateralState {
  double time = 0.0;
  double theta_m = 0.0;
  double theta_s = 0.0;
  double thetadot_m = 0.0;
  double thetadot_s = 0.0;
  double tau_s = 0.0;           // slave command torque of the last step
  double tau_s_filtered = 0.0;  // low-passed tau_s
  double tau_m = 0.0;           // master torque of the last step
  double current_s = 0.0;       // A
  double contact_force = 0.0;   // plant ground truth, N
};

// Spring contact between the fingers and an object of given width.
struct GraspContactModel {
  double object_width = 0.05;
  double contact_stiffness = 5000.0;

  void validate() const;
};

// tau_s = Kp (b theta_m - theta_s - delta) + Kd (b thetadot_m - thetadot_s)
double slave_torque(const BilateralState& state, const GripperParams& params);

// tau_m = -(1/a) filtered tau_s + B_l thetadot_m
double master_torque(const BilateralState& state, const GripperParams& params);

// F = k_tau i / r_g
double estimate_internal_force(double current, const GripperParams& params);

// y + alpha (x - y), alpha = dt / (dt + 1 / (2 pi cutoff)).
double low_pass(double prev_filtered, double raw, double dt, double cutoff);

double gripper_width(double theta_s, const GripperParams& params);
double theta_for_width(double width, const GripperParams& params);

// Squeeze force of the contact model at the current slave angle (>= 0).
double grasp_contact_force(const GraspContactModel& contact, double theta_s, const GripperParams& params);

// Integrates both motors (semi-implicit Euler), updates the torque filter and
// the ideal-current estimate. Throws SimulationFault on non-finite state.
BilateralState step_bilateral(const BilateralState& state, double master_drive_torque,
                              const GraspContactModel* contact, const GripperParams& params, double dt);

// Scripted operator: a spring-damper pulling the master toward a planned
// angle. Returns the drive torque applied to the master motor.
struct OperatorModel {
  double stiffness = 5.0;  // N*m/rad
  double damping = 0.05;   // N*m*s/rad

  double drive_torque(const BilateralState& state, double theta_ref, double thetadot_ref) const;
};

inline constexpr std::array<const char*, 8> kBilateralColumns = {
    "theta_m", "theta_s", "tau_s", "tau_s_filtered", "tau_m", "current", "F_int", "width"};

std::array<double, 8> bilateral_row(const BilateralState& state, const GripperParams& params);

}  // namespace contactkit
