#include "contactkit/bilateral.hpp"

#include <cmath>

#include "contactkit/errors.hpp"
#include "contactkit/filters.hpp"

namespace contactkit {

void GripperParams::validate() const {
  if (!(k_tau > 0.0 && r_g > 0.0 && a > 0.0)) throw InvalidArgument("gripper: k_tau, r_g, a must be > 0");
  if (!(kp > 0.0) || kd < 0.0) throw InvalidArgument("gripper: need Kp > 0 and Kd >= 0");
  if (!(filter_cutoff > 0.0)) throw InvalidArgument("gripper: filter cutoff must be > 0");
  if (!(motor_inertia > 0.0)) throw InvalidArgument("gripper: motor inertia must be > 0");
  if (viscous < 0.0) throw InvalidArgument("gripper: viscous coefficient must be >= 0");
  if (!(width_per_rad > 0.0)) throw InvalidArgument("gripper: width_per_rad must be > 0");
}

GripperParams GripperParams::from_config(const KeyValueConfig& cfg, const std::string& section) {
  GripperParams p;
  const auto key = [&](const char* k) { return section + "." + k; };
  p.k_tau = cfg.get_double(key("k_tau"), p.k_tau);
  p.r_g = cfg.get_double(key("r_g"), p.r_g);
  p.kp = cfg.get_double(key("kp"), p.kp);
  p.kd = cfg.get_double(key("kd"), p.kd);
  p.b = cfg.get_double(key("b"), p.b);
  p.delta = cfg.get_double(key("delta"), p.delta);
  p.a = cfg.get_double(key("a"), p.a);
  p.b_l = cfg.get_double(key("b_l"), p.b_l);
  p.motor_inertia = cfg.get_double(key("motor_inertia"), p.motor_inertia);
  p.viscous = cfg.get_double(key("viscous"), p.viscous);
  p.filter_cutoff = cfg.get_double(key("filter_cutoff"), p.filter_cutoff);
  p.w_max = cfg.get_double(key("w_max"), p.w_max);
  p.width_per_rad = cfg.get_double(key("width_per_rad"), p.r_g);
  p.reflection = cfg.get_bool(key("reflection"), p.reflection);
  p.validate();
  return p;
}

void GraspContactModel::validate() const {
  if (!(object_width > 0.0 && contact_stiffness > 0.0)) {
    throw InvalidArgument("grasp contact: width and stiffness must be > 0");
  }
}

double slave_torque(const BilateralState& s, const GripperParams& p) {
  return p.kp * (p.b * s.theta_m - s.theta_s - p.delta) + p.kd * (p.b * s.thetadot_m - s.thetadot_s);
}

double master_torque(const BilateralState& s, const GripperParams& p) {
  const double reflected = p.reflection ? -s.tau_s_filtered / p.a : 0.0;
  return reflected + p.b_l * s.thetadot_m;
}

double estimate_internal_force(double current, const GripperParams& p) { return p.k_tau * current / p.r_g; }

double low_pass(double prev_filtered, double raw, double dt, double cutoff) {
  if (!(cutoff > 0.0)) throw InvalidArgument("low_pass: cutoff must be > 0");
  return prev_filtered + low_pass_alpha(dt, cutoff) * (raw - prev_filtered);
}

double gripper_width(double theta_s, const GripperParams& p) { return p.w_max - p.width_per_rad * theta_s; }

double theta_for_width(double width, const GripperParams& p) { return (p.w_max - width) / p.width_per_rad; }

double grasp_contact_force(const GraspContactModel& contact, double theta_s, const GripperParams& p) {
  const double squeeze = contact.object_width - gripper_width(theta_s, p);
  return squeeze > 0.0 ? contact.contact_stiffness * squeeze : 0.0;
}

BilateralState step_bilateral(const BilateralState& s, double master_drive_torque,
                              const GraspContactModel* contact, const GripperParams& p, double dt) {
  if (!(dt > 0.0 && dt <= 0.005)) throw InvalidArgument("step_bilateral: dt must be in (0, 0.005]");
  const double tau_s = slave_torque(s, p);
  const double tau_m = master_torque(s, p);
  const double f_contact = contact != nullptr ? grasp_contact_force(*contact, s.theta_s, p) : 0.0;
  const double tau_contact = f_contact * p.width_per_rad;

  const double acc_m = (master_drive_torque + tau_m - p.viscous * s.thetadot_m) / p.motor_inertia;
  const double acc_s = (tau_s - tau_contact - p.viscous * s.thetadot_s) / p.motor_inertia;

  BilateralState n = s;
  n.time = s.time + dt;
  n.thetadot_m = s.thetadot_m + dt * acc_m;
  n.thetadot_s = s.thetadot_s + dt * acc_s;
  n.theta_m = s.theta_m + dt * n.thetadot_m;
  n.theta_s = s.theta_s + dt * n.thetadot_s;
  n.tau_s = tau_s;
  n.tau_m = tau_m;
  n.tau_s_filtered = low_pass(s.tau_s_filtered, tau_s, dt, p.filter_cutoff);
  n.current_s = tau_s / p.k_tau;
  n.contact_force = f_contact;

  if (!std::isfinite(n.theta_m) || !std::isfinite(n.theta_s) || !std::isfinite(n.thetadot_m) ||
      !std::isfinite(n.thetadot_s) || !std::isfinite(n.tau_s_filtered)) {
    throw SimulationFault("step_bilateral: non-finite state at t=" + std::to_string(n.time));
  }
  return n;
}

double OperatorModel::drive_torque(const BilateralState& s, double theta_ref, double thetadot_ref) const {
  return stiffness * (theta_ref - s.theta_m) + damping * (thetadot_ref - s.thetadot_m);
}

std::array<double, 8> bilateral_row(const BilateralState& s, const GripperParams& p) {
  return {s.theta_m, s.theta_s, s.tau_s, s.tau_s_filtered, s.tau_m, s.current_s,
          estimate_internal_force(s.current_s, p), gripper_width(s.theta_s, p)};
}

}  // namespace contactkit
