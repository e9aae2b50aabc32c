#include "contactkit/dynamics.hpp"

#include <cmath>
#include <sstream>

#include "contactkit/errors.hpp"

namespace contactkit {

std::string_view to_string(WrenchFrame frame) {
  switch (frame) {
    case WrenchFrame::kWorld: return "world";
    case WrenchFrame::kSensor: return "sensor";
    case WrenchFrame::kEndEffector: return "end_effector";
  }
  return "unknown";
}

void ArmDynamicsModel::validate() const {
  chain.validate();
  if (links.size() != chain.links.size()) {
    throw InvalidArgument("dynamics: one LinkInertia per joint required");
  }
  if (armature.size() != 0 && armature.size() != chain.dof()) {
    throw InvalidArgument("dynamics: armature must be empty or one entry per joint");
  }
  if (armature.size() != 0 && !(armature.array() >= 0.0).all()) {
    throw InvalidArgument("dynamics: armature must be >= 0");
  }
  for (std::size_t i = 0; i < links.size(); ++i) {
    const LinkInertia& l = links[i];
    if (!(l.mass > 0.0)) throw InvalidArgument("dynamics: link " + std::to_string(i) + " mass must be > 0");
    if ((l.inertia - l.inertia.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
      throw InvalidArgument("dynamics: link " + std::to_string(i) + " inertia not symmetric");
    }
    if (Eigen::SelfAdjointEigenSolver<Mat3>(l.inertia).eigenvalues().minCoeff() <= 0.0) {
      throw InvalidArgument("dynamics: link " + std::to_string(i) + " inertia not positive definite");
    }
  }
}

VecX inverse_dynamics(const ArmDynamicsModel& model, const VecX& q, const VecX& qdot,
                      const VecX& qddot, bool with_gravity) {
  const int n = model.dof();
  if (qdot.size() != n || qddot.size() != n) {
    throw DimensionError("inverse_dynamics: qdot/qddot size does not match dof");
  }
  const std::vector<Pose> frames = joint_frames(model.chain, q);

  std::vector<Vec3> z(n), p(n), rc(n), force(n), moment(n);
  Vec3 omega = Vec3::Zero();
  Vec3 alpha = Vec3::Zero();
  // Acceleration of the previous joint origin; the fixed base carries -g.
  Vec3 accel = with_gravity ? Vec3(-model.gravity) : Vec3::Zero();
  Vec3 p_prev = Vec3::Zero();

  for (int i = 0; i < n; ++i) {
    const LinkInertia& body = model.links[i];
    const Mat3& rot = frames[i].rotation;
    z[i] = rot * model.chain.links[i].axis;
    p[i] = frames[i].translation;

    const Vec3 r = p[i] - p_prev;
    accel += alpha.cross(r) + omega.cross(omega.cross(r));
    const Vec3 joint_rate = z[i] * qdot[i];
    alpha += z[i] * qddot[i] + omega.cross(joint_rate);
    omega += joint_rate;

    rc[i] = rot * body.com;
    const Vec3 accel_com = accel + alpha.cross(rc[i]) + omega.cross(omega.cross(rc[i]));
    const Mat3 inertia_world = rot * body.inertia * rot.transpose();
    force[i] = body.mass * accel_com;
    moment[i] = inertia_world * alpha + omega.cross(inertia_world * omega);
    p_prev = p[i];
  }

  VecX tau(n);
  Vec3 f_next = Vec3::Zero();
  Vec3 n_next = Vec3::Zero();
  for (int i = n - 1; i >= 0; --i) {
    const Vec3 lever_next = (i + 1 < n) ? Vec3(p[i + 1] - p[i]) : Vec3::Zero();
    const Vec3 f = force[i] + f_next;
    const Vec3 m = moment[i] + rc[i].cross(force[i]) + n_next + lever_next.cross(f_next);
    tau[i] = z[i].dot(m);
    if (model.armature.size() == n) tau[i] += model.armature[i] * qddot[i];
    f_next = f;
    n_next = m;
  }
  return tau;
}

DynamicsTerms inverse_dynamics_terms(const ArmDynamicsModel& model, const VecX& q, const VecX& qdot) {
  const int n = model.dof();
  if (q.size() != n || qdot.size() != n) throw DimensionError("inverse_dynamics_terms: size mismatch");
  const VecX zero = VecX::Zero(n);
  DynamicsTerms terms;
  terms.mass_matrix.resize(n, n);
  for (int j = 0; j < n; ++j) {
    terms.mass_matrix.col(j) = inverse_dynamics(model, q, zero, VecX::Unit(n, j), false);
  }
  // Symmetric by construction up to rounding; make it exact.
  terms.mass_matrix = 0.5 * (terms.mass_matrix + terms.mass_matrix.transpose()).eval();
  terms.coriolis = inverse_dynamics(model, q, qdot, zero, false);
  terms.gravity = inverse_dynamics(model, q, zero, zero, true);
  return terms;
}

double kinetic_energy(const ArmDynamicsModel& model, const VecX& q, const VecX& qdot) {
  const DynamicsTerms t = inverse_dynamics_terms(model, q, VecX::Zero(model.dof()));
  return 0.5 * qdot.dot(t.mass_matrix * qdot);
}

double potential_energy(const ArmDynamicsModel& model, const VecX& q) {
  const std::vector<Pose> frames = joint_frames(model.chain, q);
  double u = 0.0;
  for (int i = 0; i < model.dof(); ++i) {
    u -= model.links[i].mass * model.gravity.dot(frames[i] * model.links[i].com);
  }
  return u;
}

void ContactPlane::validate() const {
  if (std::abs(normal.norm() - 1.0) > 1e-9) throw InvalidArgument("contact plane normal must be unit");
  if (!(stiffness > 0.0)) throw InvalidArgument("contact plane stiffness must be > 0");
  if (damping < 0.0) throw InvalidArgument("contact plane damping must be >= 0");
  if (friction_mu < 0.0) throw InvalidArgument("contact plane friction must be >= 0");
  if (!(v_eps > 0.0)) throw InvalidArgument("contact plane v_eps must be > 0");
}

ContactSample plane_contact(const ContactPlane& plane, const Vec3& point, const Vec3& velocity) {
  ContactSample c;
  c.penetration = plane.offset - plane.normal.dot(point);
  if (c.penetration <= 0.0) return c;
  const double vn = plane.normal.dot(velocity);
  c.normal_force = std::max(0.0, plane.stiffness * c.penetration - plane.damping * vn);
  c.active = true;
  const Vec3 vt = velocity - vn * plane.normal;
  const double speed = vt.norm();
  Vec3 friction = Vec3::Zero();
  if (speed > 0.0 && plane.friction_mu > 0.0) {
    friction = -plane.friction_mu * c.normal_force * std::tanh(speed / plane.v_eps) * (vt / speed);
  }
  c.force = c.normal_force * plane.normal + friction;
  return c;
}

SimState make_rest_state(const ArmDynamicsModel& model, const VecX& q) {
  if (q.size() != model.dof()) throw DimensionError("make_rest_state: size mismatch");
  SimState s;
  s.q = q;
  s.qdot = VecX::Zero(model.dof());
  s.contact_point = forward_kinematics(model.chain, q).translation;
  return s;
}

bool grasp_slip_check(double grasp_force, double object_mass, double mu, double accel_z) {
  constexpr double kGravity = 9.81;
  return 2.0 * mu * grasp_force < object_mass * (kGravity + std::max(accel_z, 0.0));
}

SimState step(const ArmDynamicsModel& model, const SimState& state, const VecX& tau,
              const ContactPlane* plane, double dt) {
  const int n = model.dof();
  if (!(dt > 0.0 && dt <= 0.01)) throw InvalidArgument("step: dt must be in (0, 0.01]");
  if (tau.size() != n || state.q.size() != n || state.qdot.size() != n) {
    throw DimensionError("step: state/torque size does not match dof");
  }
  if (!tau.allFinite()) throw SimulationFault("step: non-finite torque at t=" + std::to_string(state.time));

  const DynamicsTerms terms = inverse_dynamics_terms(model, state.q, state.qdot);
  const Pose ee = forward_kinematics(model.chain, state.q);
  const Mat6X jac = jacobian(model.chain, state.q);
  const auto jv = jac.topRows<3>();
  const Vec3 v_ee = jv * state.qdot;

  SimState next = state;
  Vec3 f_ext = Vec3::Zero();
  next.contact_force.setZero();
  next.normal_force = 0.0;
  next.penetration = 0.0;
  next.contact_point = ee.translation;
  if (plane != nullptr) {
    const ContactSample c = plane_contact(*plane, ee.translation, v_ee);
    next.contact_force = c.force;
    next.normal_force = c.normal_force;
    next.penetration = c.penetration;
    f_ext += c.force;
  }
  if (state.grasped_object && !state.grasped_object->slipped) {
    f_ext += state.grasped_object->mass * model.gravity;
  }

  const VecX rhs = tau + jv.transpose() * f_ext - terms.coriolis - terms.gravity;
  const VecX qddot = terms.mass_matrix.ldlt().solve(rhs);
  next.qdot = state.qdot + dt * qddot;
  next.q = state.q + dt * next.qdot;
  next.time = state.time + dt;

  if (!next.q.allFinite() || !next.qdot.allFinite()) {
    std::ostringstream msg;
    msg << "step: non-finite state at t=" << next.time;
    throw SimulationFault(msg.str());
  }

  next.ee_accel_z = (jv * next.qdot - v_ee).z() / dt;
  if (next.grasped_object && !next.grasped_object->slipped) {
    GraspedObject& obj = *next.grasped_object;
    obj.slipped = grasp_slip_check(obj.internal_force, obj.mass, obj.mu, next.ee_accel_z);
  }
  return next;
}

Wrench read_ft_sensor(const SimState& state, const PayloadSpec& payload, const Pose& sensor_pose,
                      double noise_sigma, std::mt19937_64& rng, const Vec3& gravity) {
  if (noise_sigma < 0.0) throw InvalidArgument("read_ft_sensor: noise_sigma must be >= 0");
  const Mat3 rt = sensor_pose.rotation.transpose();
  const Vec3 weight = rt * (payload.mass * gravity);
  const Vec3 lever = state.contact_point - sensor_pose.translation;

  Wrench w;
  w.frame = WrenchFrame::kSensor;
  w.force = rt * state.contact_force + weight + payload.sensor_bias.head<3>();
  w.torque = rt * lever.cross(state.contact_force) + payload.com_in_sensor.cross(weight) +
             payload.sensor_bias.tail<3>();
  if (noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, noise_sigma);
    for (int i = 0; i < 3; ++i) w.force[i] += noise(rng);
    for (int i = 0; i < 3; ++i) w.torque[i] += noise(rng);
  }
  return w;
}

Mat3 rod_inertia(double mass, double length, const Vec3& axis, double radius) {
  const Vec3 a = axis.normalized();
  const double along = 0.5 * mass * radius * radius;
  const double across = mass * (3.0 * radius * radius + length * length) / 12.0;
  return across * Mat3::Identity() + (along - across) * a * a.transpose();
}

ArmDynamicsModel pendulum_model(double mass, double length) {
  ArmDynamicsModel model;
  model.chain.links.push_back({-Vec3::UnitY(), Pose::Identity()});
  model.chain.limits.assign(1, JointLimit{-10.0, 10.0});
  model.chain.tool = Pose::FromTranslation({length, 0.0, 0.0});
  model.links.push_back({mass, {length / 2.0, 0.0, 0.0}, rod_inertia(mass, length, Vec3::UnitX(), 0.01)});
  return model;
}

ArmDynamicsModel planar_two_link_dynamics(double l1, double l2, double m1, double m2) {
  ArmDynamicsModel model;
  model.chain = planar_two_link(l1, l2);
  model.links.push_back({m1, {l1 / 2.0, 0.0, 0.0}, rod_inertia(m1, l1, Vec3::UnitX())});
  model.links.push_back({m2, {l2 / 2.0, 0.0, 0.0}, rod_inertia(m2, l2, Vec3::UnitX())});
  // Vertical plane: gravity acts along -y so g(q) is non-trivial.
  model.gravity = Vec3(0.0, -9.81, 0.0);
  return model;
}

ArmDynamicsModel reference_six_dof_dynamics() {
  ArmDynamicsModel model;
  model.chain = reference_six_dof();
  model.links = {
      {3.0, {0.0, 0.0, -0.05}, rod_inertia(3.0, 0.15, Vec3::UnitZ(), 0.06)},
      {2.5, {0.0, 0.0, 0.20}, rod_inertia(2.5, 0.40, Vec3::UnitZ(), 0.04)},
      {1.8, {0.0, 0.0, 0.175}, rod_inertia(1.8, 0.35, Vec3::UnitZ(), 0.035)},
      {0.6, {0.0, 0.0, 0.0}, rod_inertia(0.6, 0.08, Vec3::UnitZ(), 0.03)},
      {0.5, {0.0, 0.0, 0.03}, rod_inertia(0.5, 0.06, Vec3::UnitZ(), 0.03)},
      {0.4, {0.0, 0.0, 0.06}, rod_inertia(0.4, 0.08, Vec3::UnitZ(), 0.03)},
  };
  model.armature = VecX::Constant(6, 0.1);
  return model;
}

}  // namespace contactkit
