#include "contactkit/impedance.hpp"

#include <algorithm>
#include <cmath>

#include "contactkit/errors.hpp"
#include "contactkit/filters.hpp"

namespace contactkit {

void ImpedanceConfig::validate() const {
  if (!(k_min >= 0.0 && k_min <= k_max)) throw InvalidArgument("impedance: need 0 <= k_min <= k_max");
  if (!(zeta >= 0.0 && m_eff > 0.0)) throw InvalidArgument("impedance: need zeta >= 0, m_eff > 0");
  if (k_rot < 0.0 || d_rot < 0.0 || kq_floor < 0.0 || kqd_floor < 0.0) {
    throw InvalidArgument("impedance: gains must be non-negative");
  }
  if (!(lambda > 0.0)) throw InvalidArgument("impedance: lambda must be > 0");
  if (!(dt > 0.0)) throw InvalidArgument("impedance: dt must be > 0");
  if (!(qdot_filter_hz > 0.0)) throw InvalidArgument("impedance: filter cutoff must be > 0");
}

ImpedanceConfig ImpedanceConfig::from_config(const KeyValueConfig& cfg) {
  ImpedanceConfig c;
  c.k_min = cfg.get_double("impedance.k_min", c.k_min);
  c.k_max = cfg.get_double("impedance.k_max", c.k_max);
  c.zeta = cfg.get_double("impedance.zeta", c.zeta);
  c.m_eff = cfg.get_double("impedance.m_eff", c.m_eff);
  c.k_rot = cfg.get_double("impedance.k_rot", c.k_rot);
  c.d_rot = cfg.get_double("impedance.d_rot", c.d_rot);
  c.kq_floor = cfg.get_double("impedance.kq_floor", c.kq_floor);
  c.kqd_floor = cfg.get_double("impedance.kqd_floor", c.kqd_floor);
  c.lambda = cfg.get_double("impedance.lambda", c.lambda);
  c.dt = cfg.get_double("impedance.dt", c.dt);
  c.qdot_filter_hz = cfg.get_double("impedance.qdot_filter_hz", c.qdot_filter_hz);
  c.validate();
  return c;
}

Mat6 CartesianGains::stiffness() const {
  Mat6 k = Mat6::Zero();
  k.topLeftCorner<3, 3>() = kp_trans;
  k.bottomRightCorner<3, 3>() = k_rot;
  return k;
}

Mat6 CartesianGains::damping() const {
  Mat6 d = Mat6::Zero();
  d.topLeftCorner<3, 3>() = dp_trans;
  d.bottomRightCorner<3, 3>() = d_rot;
  return d;
}

CartesianGains build_operational_gains(const Vec3& kp_diag, const ImpedanceConfig& config) {
  CartesianGains g;
  Vec3 k = kp_diag;
  for (int i = 0; i < 3; ++i) {
    const double c = std::clamp(k[i], config.k_min, config.k_max);
    if (c != k[i]) g.clamped = true;
    k[i] = c;
  }
  g.kp_trans = k.asDiagonal();
  const Vec3 d = (2.0 * config.zeta) * (k * config.m_eff).cwiseSqrt();
  g.dp_trans = d.asDiagonal();
  g.k_rot = Mat3::Identity() * config.k_rot;
  g.d_rot = Mat3::Identity() * config.d_rot;
  return g;
}

GainFloors GainFloors::Uniform(int dof, double kq, double kqd) {
  return {VecX::Constant(dof, kq), VecX::Constant(dof, kqd)};
}

JointGains fold_to_joint_gains(const Mat6X& jac, const CartesianGains& cart, const GainFloors& floors) {
  const Eigen::Index n = jac.cols();
  if (floors.kq.size() != n || floors.kqd.size() != n) {
    throw DimensionError("fold_to_joint_gains: floor size does not match Jacobian columns");
  }
  JointGains out;
  const Mat6 kx = cart.stiffness();
  const Mat6 kxd = cart.damping();
  out.kp = jac.transpose() * kx * jac;
  out.kd = jac.transpose() * kxd * jac;
  // K_x and K_xd are diagonal, so the products are symmetric up to rounding.
  out.kp = (0.5 * (out.kp + out.kp.transpose())).eval();
  out.kd = (0.5 * (out.kd + out.kd.transpose())).eval();
  out.kp.diagonal() += floors.kq;
  out.kd.diagonal() += floors.kqd;
  out.kq_floor = floors.kq;
  out.kqd_floor = floors.kqd;
  return out;
}

VecX control_torque(const JointGains& gains, const VecX& q_d, const VecX& q, const VecX& qdot_d,
                    const VecX& qdot, const VecX& coriolis, const VecX& gravity) {
  const Eigen::Index n = gains.kp.rows();
  if (q_d.size() != n || q.size() != n || qdot_d.size() != n || qdot.size() != n ||
      coriolis.size() != n || gravity.size() != n || gains.kd.rows() != n) {
    throw DimensionError("control_torque: dimension mismatch");
  }
  return gains.kp * (q_d - q) + gains.kd * (qdot_d - qdot) + coriolis + gravity;
}

ImpedanceSession::ImpedanceSession(ArmDynamicsModel model, ImpedanceConfig config)
    : model_(std::move(model)), config_(config) {
  model_.validate();
  config_.validate();
  floors_ = GainFloors::Uniform(model_.dof(), config_.kq_floor, config_.kqd_floor);
  qdot_d_filtered_ = VecX::Zero(model_.dof());
}

void ImpedanceSession::reset() {
  prev_target_.reset();
  qdot_d_filtered_.setZero();
}

TickOutput ImpedanceSession::execute_tick(const SimState& state, const ComplianceCommand& command) {
  const ChainModel& chain = model_.chain;
  const Pose current = forward_kinematics(chain, state.q);
  const Mat6X jac = jacobian(chain, state.q);

  TickOutput out;
  out.diagnostics.error = pose_error(command.virtual_target, current);
  out.diagnostics.xi_norm = out.diagnostics.error.norm();

  const VecX dq = dls_solve(jac, out.diagnostics.error.xi, config_.lambda);
  out.q_d = clamp_to_limits(chain, state.q + dq, &out.diagnostics.limits_clamped);

  // Desired velocity: finite difference of the virtual target mapped through
  // the damped inverse, then low-pass filtered.
  VecX qdot_raw = VecX::Zero(model_.dof());
  if (prev_target_) {
    const PoseError target_step = pose_error(command.virtual_target, *prev_target_);
    qdot_raw = dls_solve(jac, target_step.xi / config_.dt, config_.lambda);
  }
  prev_target_ = command.virtual_target;
  qdot_d_filtered_ += low_pass_alpha(config_.dt, config_.qdot_filter_hz) * (qdot_raw - qdot_d_filtered_);
  out.qdot_d = qdot_d_filtered_;

  const CartesianGains cart = build_operational_gains(command.kp_diag, config_);
  out.diagnostics.stiffness_clamped = cart.clamped;
  out.diagnostics.spring_force = cart.kp_trans * out.diagnostics.error.translation();
  const JointGains gains = fold_to_joint_gains(jac, cart, floors_);

  const VecX zero = VecX::Zero(model_.dof());
  const VecX coriolis = inverse_dynamics(model_, state.q, state.qdot, zero, false);
  const VecX gravity = inverse_dynamics(model_, state.q, zero, zero, true);
  out.tau = control_torque(gains, out.q_d, state.q, out.qdot_d, state.qdot, coriolis, gravity);
  return out;
}

}  // namespace contactkit
