#pragma once

#include <optional>
#include <random>
#include <vector>

#include "contactkit/kinematics.hpp"
#include "contactkit/wrench.hpp"

namespace contactkit {

// Mass properties of the body rigidly attached to one joint frame. `com` and
// `inertia` (about the COM) are expressed in that joint frame.
struct LinkInertia {
  double mass = 1.0;
  Vec3 com = Vec3::Zero();
  Mat3 inertia = Mat3::Identity() * 1e-3;
};

struct ArmDynamicsModel {
  ChainModel chain;
  std::vector<LinkInertia> links;
  Vec3 gravity{0.0, 0.0, -9.81};
  // Reflected rotor inertia per joint (kg*m^2), added to the diagonal of M.
  // Empty means none.
  VecX armature;

  int dof() const { return chain.dof(); }
  void validate() const;
};

struct DynamicsTerms {
  MatX mass_matrix;  // M(q)
  VecX coriolis;     // C(q, qdot) qdot
  VecX gravity;      // g(q)
};

// Recursive Newton-Euler: generalized forces needed for (q, qdot, qddot),
// optionally including gravity.
VecX inverse_dynamics(const ArmDynamicsModel& model, const VecX& q, const VecX& qdot,
                      const VecX& qddot, bool with_gravity);

// M from unit-acceleration RNEA columns, C*qdot and g from single passes.
DynamicsTerms inverse_dynamics_terms(const ArmDynamicsModel& model, const VecX& q, const VecX& qdot);

double kinetic_energy(const ArmDynamicsModel& model, const VecX& q, const VecX& qdot);
// Zero at the base origin height.
double potential_energy(const ArmDynamicsModel& model, const VecX& q);

// Flat surface {x : normal . x = offset}; the free side is normal . x > offset.
struct ContactPlane {
  Vec3 normal = Vec3::UnitZ();
  double offset = 0.0;
  double stiffness = 2e4;
  double damping = 0.0;
  double friction_mu = 0.0;
  double v_eps = 1e-3;

  void validate() const;
};

struct ContactSample {
  Vec3 force = Vec3::Zero();  // world frame, acting on the robot
  double normal_force = 0.0;
  double penetration = 0.0;
  bool active = false;
};

// Penalty spring-damper along the normal (clamped to push only) plus
// tanh-regularized Coulomb friction.
ContactSample plane_contact(const ContactPlane& plane, const Vec3& point, const Vec3& velocity);

struct GraspedObject {
  double mass = 0.0;
  double mu = 0.5;
  double internal_force = 0.0;  // squeeze force currently applied
  bool slipped = false;
};

struct SimState {
  VecX q;
  VecX qdot;
  double time = 0.0;
  // Contact force at the end-effector point in world frame during the last step.
  Vec3 contact_force = Vec3::Zero();
  Vec3 contact_point = Vec3::Zero();
  double normal_force = 0.0;
  double penetration = 0.0;
  double ee_accel_z = 0.0;
  std::optional<GraspedObject> grasped_object;

  // Contact wrench about the end-effector point, world frame.
  Wrench contact_wrench_ee() const { return {contact_force, Vec3::Zero(), WrenchFrame::kWorld}; }
};

SimState make_rest_state(const ArmDynamicsModel& model, const VecX& q);

// Semi-implicit Euler step of M qdd + C qd + g = tau + J^T f_ext. External
// forces are the plane contact (when given) and the weight of a grasped,
// unslipped object. Throws SimulationFault on a non-finite state.
SimState step(const ArmDynamicsModel& model, const SimState& state, const VecX& tau,
              const ContactPlane* plane, double dt);

// Two-finger friction grasp. True when the object slips, i.e. when
// 2 mu F < m (g + max(accel_z, 0)).
bool grasp_slip_check(double grasp_force, double object_mass, double mu, double accel_z);

struct PayloadSpec {
  double mass = 0.0;
  Vec3 com_in_sensor = Vec3::Zero();
  Vec6 sensor_bias = Vec6::Zero();
};

// Raw F/T reading in the sensor frame: mapped contact wrench + payload weight
// + bias + i.i.d. Gaussian noise (sigma applies to every axis).
Wrench read_ft_sensor(const SimState& state, const PayloadSpec& payload, const Pose& sensor_pose,
                      double noise_sigma, std::mt19937_64& rng,
                      const Vec3& gravity = Vec3(0.0, 0.0, -9.81));

// Point-mass-free thin rod inertia about its COM for a rod along `axis`.
Mat3 rod_inertia(double mass, double length, const Vec3& axis, double radius = 0.03);

// Dynamics for the 1-link horizontal pendulum (joint axis -y, link along +x).
ArmDynamicsModel pendulum_model(double mass = 1.0, double length = 1.0);
ArmDynamicsModel planar_two_link_dynamics(double l1 = 0.5, double l2 = 0.5, double m1 = 1.0,
                                          double m2 = 1.0);
ArmDynamicsModel reference_six_dof_dynamics();

}  // namespace contactkit
