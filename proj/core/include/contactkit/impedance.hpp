#pragma once

#include <optional>

#include "contactkit/compliance.hpp"
#include "contactkit/config.hpp"
#include "contactkit/dynamics.hpp"
#include "contactkit/kinematics.hpp"

namespace contactkit {

struct ImpedanceConfig {
  double k_min = 200.0;        // N/m
  double k_max = 2000.0;       // N/m
  double zeta = 1.0;           // damping ratio of the translational axes
  double m_eff = 2.0;          // kg, effective mass used for critical damping
  double k_rot = 50.0;         // N*m/rad
  double d_rot = 5.0;          // N*m*s/rad
  double kq_floor = 1.0;       // N*m/rad
  double kqd_floor = 0.1;      // N*m*s/rad
  double lambda = 0.05;        // DLS damping
  double dt = 1e-3;            // s
  double qdot_filter_hz = 20.0;

  void validate() const;
  // Reads the [impedance] section; absent keys keep their defaults.
  static ImpedanceConfig from_config(const KeyValueConfig& cfg);
};

// Block-diagonal operational-space gains.
struct CartesianGains {
  Mat3 kp_trans = Mat3::Zero();
  Mat3 k_rot = Mat3::Zero();
  Mat3 dp_trans = Mat3::Zero();
  Mat3 d_rot = Mat3::Zero();
  // Set when the requested stiffness was outside [k_min, k_max].
  bool clamped = false;

  Mat6 stiffness() const;  // K_x
  Mat6 damping() const;    // K_xd
};

// Kp_trans = diag(kp), D = 2 zeta sqrt(k m_eff) per axis, rotation gains
// constant from the config.
CartesianGains build_operational_gains(const Vec3& kp_diag, const ImpedanceConfig& config);

struct GainFloors {
  VecX kq;   // diagonal of K_q
  VecX kqd;  // diagonal of K_qd

  static GainFloors Uniform(int dof, double kq, double kqd);
};

struct JointGains {
  MatX kp;  // J^T K_x J + K_q
  MatX kd;  // J^T K_xd J + K_qd
  VecX kq_floor;
  VecX kqd_floor;
};

JointGains fold_to_joint_gains(const Mat6X& jac, const CartesianGains& cart, const GainFloors& floors);

// tau = Kp (q_d - q) + Kd (qdot_d - qdot) + C qdot + g
VecX control_torque(const JointGains& gains, const VecX& q_d, const VecX& q, const VecX& qdot_d,
                    const VecX& qdot, const VecX& coriolis, const VecX& gravity);

struct TickDiagnostics {
  double xi_norm = 0.0;
  PoseError error;
  // Translational spring force K_p (p_vt - p), world frame.
  Vec3 spring_force = Vec3::Zero();
  bool limits_clamped = false;
  bool stiffness_clamped = false;
  // Identifies the control-law branch; there is exactly one.
  int code_path = 0;
};

struct TickOutput {
  VecX tau;
  VecX q_d;
  VecX qdot_d;
  TickDiagnostics diagnostics;
};

// Per-loop controller session. Owns the desired-velocity filter, so one
// instance belongs to one control loop.
class ImpedanceSession {
 public:
  ImpedanceSession(ArmDynamicsModel model, ImpedanceConfig config);

  // DLS step toward the virtual target -> q_d, filtered target velocity ->
  // qdot_d, gains folded through J, joint torque with C and g compensation.
  TickOutput execute_tick(const SimState& state, const ComplianceCommand& command);

  void reset();
  const ImpedanceConfig& config() const { return config_; }
  const ArmDynamicsModel& model() const { return model_; }

 private:
  ArmDynamicsModel model_;
  ImpedanceConfig config_;
  GainFloors floors_;
  std::optional<Pose> prev_target_;
  VecX qdot_d_filtered_;
};

}  // namespace contactkit
