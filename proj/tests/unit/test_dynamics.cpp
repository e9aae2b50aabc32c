#include <gtest/gtest.h>

#include <cmath>

#include "contactkit/dynamics.hpp"
#include "contactkit/errors.hpp"
#include "test_support.hpp"

using namespace contactkit;

namespace {

VecX random_q(std::mt19937_64& rng, int n, double span = M_PI) {
  VecX q(n);
  for (int i = 0; i < n; ++i) q[i] = ck_test::uniform(rng, -span, span);
  return q;
}

// Mass matrix from finite-difference COM and angular-velocity Jacobians of
// every link: M = sum m Jv^T Jv + Jw^T (R I R^T) Jw, plus armature.
MatX oracle_mass_matrix(const ArmDynamicsModel& model, const VecX& q, double h = 1e-6) {
  const int n = model.dof();
  MatX m = MatX::Zero(n, n);
  const auto frames = joint_frames(model.chain, q);
  for (int link = 0; link < n; ++link) {
    MatX jv = MatX::Zero(3, n), jw = MatX::Zero(3, n);
    for (int k = 0; k < n; ++k) {
      VecX qp = q, qm = q;
      qp[k] += h;
      qm[k] -= h;
      const Pose fp = joint_frames(model.chain, qp)[link], fm = joint_frames(model.chain, qm)[link];
      jv.col(k) = (fp * model.links[link].com - fm * model.links[link].com) / (2 * h);
      jw.col(k) = so3_log(fp.rotation * fm.rotation.transpose()) / (2 * h);
    }
    const Mat3 r = frames[link].rotation;
    const Mat3 iw = r * model.links[link].inertia * r.transpose();
    m += model.links[link].mass * jv.transpose() * jv + jw.transpose() * iw * jw;
  }
  if (model.armature.size() == n) m.diagonal() += model.armature;
  return m;
}

VecX oracle_gravity(const ArmDynamicsModel& model, const VecX& q, double h = 1e-6) {
  VecX g(model.dof());
  for (int k = 0; k < model.dof(); ++k) {
    VecX qp = q, qm = q;
    qp[k] += h;
    qm[k] -= h;
    g[k] = (potential_energy(model, qp) - potential_energy(model, qm)) / (2 * h);
  }
  return g;
}

// C qdot = Mdot qdot - 1/2 d/dq (qdot^T M qdot).
VecX oracle_coriolis(const ArmDynamicsModel& model, const VecX& q, const VecX& qdot, double h = 1e-6) {
  const int n = model.dof();
  MatX mdot = MatX::Zero(n, n);
  VecX grad(n);
  for (int k = 0; k < n; ++k) {
    VecX qp = q, qm = q;
    qp[k] += h;
    qm[k] -= h;
    const MatX mp = inverse_dynamics_terms(model, qp, VecX::Zero(n)).mass_matrix;
    const MatX mm = inverse_dynamics_terms(model, qm, VecX::Zero(n)).mass_matrix;
    const MatX dm = (mp - mm) / (2 * h);
    mdot += dm * qdot[k];
    grad[k] = 0.5 * qdot.dot(dm * qdot);
  }
  return mdot * qdot - grad;
}

double total_energy(const ArmDynamicsModel& model, const SimState& s) {
  return kinetic_energy(model, s.q, s.qdot) + potential_energy(model, s.q);
}

}  // namespace

TEST(Dynamics, MassMatrixMatchesLinkJacobianOracle) {
  std::mt19937_64 rng(31);
  for (const ArmDynamicsModel& model : {planar_two_link_dynamics(), reference_six_dof_dynamics(), pendulum_model()}) {
    for (int i = 0; i < 20; ++i) {
      const VecX q = random_q(rng, model.dof());
      const MatX m = inverse_dynamics_terms(model, q, VecX::Zero(model.dof())).mass_matrix;
      EXPECT_LT((m - oracle_mass_matrix(model, q)).cwiseAbs().maxCoeff(), 1e-7);
      EXPECT_LT((m - m.transpose()).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_GT(m.selfadjointView<Eigen::Lower>().eigenvalues().minCoeff(), 0.0);
    }
  }
}

TEST(Dynamics, PlanarTwoLinkClosedFormMassMatrix) {
  const double l1 = 0.5, l2 = 0.5, m1 = 1.0, m2 = 1.0;
  const ArmDynamicsModel model = planar_two_link_dynamics(l1, l2, m1, m2);
  const double i1 = model.links[0].inertia(2, 2), i2 = model.links[1].inertia(2, 2);
  std::mt19937_64 rng(32);
  for (int i = 0; i < 20; ++i) {
    const VecX q = random_q(rng, 2);
    const double c2 = std::cos(q[1]);
    const double lc1 = l1 / 2, lc2 = l2 / 2;
    const double m22 = m2 * lc2 * lc2 + i2;
    const double m12 = m22 + m2 * l1 * lc2 * c2;
    const double m11 = m1 * lc1 * lc1 + i1 + m2 * (l1 * l1 + lc2 * lc2 + 2 * l1 * lc2 * c2) + i2;
    const MatX m = inverse_dynamics_terms(model, q, VecX::Zero(2)).mass_matrix;
    EXPECT_NEAR(m(0, 0), m11, 1e-12);
    EXPECT_NEAR(m(0, 1), m12, 1e-12);
    EXPECT_NEAR(m(1, 1), m22, 1e-12);
  }
}

TEST(Dynamics, GravityIsPotentialGradient) {
  std::mt19937_64 rng(33);
  for (const ArmDynamicsModel& model : {planar_two_link_dynamics(), reference_six_dof_dynamics(), pendulum_model()}) {
    for (int i = 0; i < 20; ++i) {
      const VecX q = random_q(rng, model.dof());
      const VecX g = inverse_dynamics_terms(model, q, VecX::Zero(model.dof())).gravity;
      EXPECT_LT((g - oracle_gravity(model, q)).cwiseAbs().maxCoeff(), 1e-7);
    }
  }
}

TEST(Dynamics, CoriolisMatchesLagrangian) {
  std::mt19937_64 rng(34);
  for (const ArmDynamicsModel& model : {planar_two_link_dynamics(), reference_six_dof_dynamics()}) {
    for (int i = 0; i < 10; ++i) {
      const VecX q = random_q(rng, model.dof());
      const VecX qdot = random_q(rng, model.dof(), 2.0);
      const VecX c = inverse_dynamics_terms(model, q, qdot).coriolis;
      EXPECT_LT((c - oracle_coriolis(model, q, qdot)).cwiseAbs().maxCoeff(), 1e-6);
    }
  }
}

TEST(Dynamics, InverseDynamicsIsAffineInAcceleration) {
  std::mt19937_64 rng(35);
  const ArmDynamicsModel model = reference_six_dof_dynamics();
  const VecX q = random_q(rng, 6), qdot = random_q(rng, 6, 1.0), qddot = random_q(rng, 6, 3.0);
  const DynamicsTerms t = inverse_dynamics_terms(model, q, qdot);
  const VecX tau = inverse_dynamics(model, q, qdot, qddot, true);
  EXPECT_LT((tau - (t.mass_matrix * qddot + t.coriolis + t.gravity)).cwiseAbs().maxCoeff(), 1e-10);
  const VecX tau_ng = inverse_dynamics(model, q, qdot, qddot, false);
  EXPECT_LT((tau - tau_ng - t.gravity).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Dynamics, ArmatureAddsToDiagonal) {
  ArmDynamicsModel model = planar_two_link_dynamics();
  const VecX q = Eigen::Vector2d(0.3, -0.7);
  const MatX m0 = inverse_dynamics_terms(model, q, VecX::Zero(2)).mass_matrix;
  model.armature = Eigen::Vector2d(0.1, 0.2);
  const MatX m1 = inverse_dynamics_terms(model, q, VecX::Zero(2)).mass_matrix;
  EXPECT_NEAR(m1(0, 0) - m0(0, 0), 0.1, 1e-14);
  EXPECT_NEAR(m1(1, 1) - m0(1, 1), 0.2, 1e-14);
  EXPECT_NEAR(m1(0, 1), m0(0, 1), 1e-14);
  model.armature = Eigen::Vector3d(0.1, 0.1, 0.1);
  EXPECT_THROW(model.validate(), InvalidArgument);
  model.armature = Eigen::Vector2d(-0.1, 0.1);
  EXPECT_THROW(model.validate(), InvalidArgument);
}

TEST(Dynamics, PendulumEnergyDriftBelowHalfPercent) {
  const ArmDynamicsModel model = pendulum_model(1.0, 1.0);
  SimState s = make_rest_state(model, VecX::Zero(1));
  const double e0 = total_energy(model, s);
  // Energy scale: potential swing of the released pendulum.
  const double scale = 1.0 * 9.81 * 0.5;
  double worst = 0.0;
  for (int i = 0; i < 5000; ++i) {
    s = step(model, s, VecX::Zero(1), nullptr, 1e-3);
    worst = std::max(worst, std::abs(total_energy(model, s) - e0) / scale);
  }
  EXPECT_LT(worst, 5e-3);
  EXPECT_NEAR(s.time, 5.0, 1e-9);
}

TEST(Dynamics, GravityHoldIsStatic) {
  std::mt19937_64 rng(36);
  for (const ArmDynamicsModel& model : {reference_six_dof_dynamics(), planar_two_link_dynamics()}) {
    const VecX q0 = random_q(rng, model.dof(), 1.5);
    SimState s = make_rest_state(model, q0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const VecX g = inverse_dynamics_terms(model, s.q, s.qdot).gravity;
      const VecX prev = s.q;
      s = step(model, s, g, nullptr, 1e-3);
      worst = std::max(worst, (s.q - prev).cwiseAbs().maxCoeff());
    }
    EXPECT_LT(worst, 1e-9);
  }
}

TEST(Dynamics, NonFiniteTorqueRaisesSimulationFault) {
  const ArmDynamicsModel model = pendulum_model();
  const SimState s = make_rest_state(model, VecX::Zero(1));
  VecX tau(1);
  tau[0] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(step(model, s, tau, nullptr, 1e-3), SimulationFault);
  EXPECT_THROW(step(model, s, VecX::Zero(2), nullptr, 1e-3), DimensionError);
}

TEST(Contact, PlanePenaltyAndFriction) {
  ContactPlane plane;
  plane.offset = 0.1;
  plane.stiffness = 1e4;
  plane.damping = 50.0;
  plane.friction_mu = 0.3;
  EXPECT_FALSE(plane_contact(plane, Vec3(0, 0, 0.2), Vec3::Zero()).active);

  const ContactSample c = plane_contact(plane, Vec3(0, 0, 0.099), Vec3::Zero());
  EXPECT_TRUE(c.active);
  EXPECT_NEAR(c.penetration, 1e-3, 1e-15);
  EXPECT_NEAR(c.normal_force, 10.0, 1e-9);
  EXPECT_NEAR(c.force.z(), 10.0, 1e-9);

  // Sliding well above v_eps: friction ~ mu N opposing motion.
  const ContactSample s = plane_contact(plane, Vec3(0, 0, 0.099), Vec3(0.5, 0, 0));
  EXPECT_NEAR(s.force.x(), -0.3 * s.normal_force, 1e-6);
  // Separating fast: damping cannot pull.
  const ContactSample p = plane_contact(plane, Vec3(0, 0, 0.0999), Vec3(0, 0, 10.0));
  EXPECT_GE(p.normal_force, 0.0);
  // Friction bounded by the cone.
  std::mt19937_64 rng(37);
  for (int i = 0; i < 200; ++i) {
    const Vec3 v = ck_test::random_vec3(rng, -1, 1);
    const ContactSample r = plane_contact(plane, Vec3(0, 0, 0.0995), v);
    const Vec3 tangential = r.force - r.force.dot(plane.normal) * plane.normal;
    EXPECT_LE(tangential.norm(), plane.friction_mu * r.normal_force + 1e-12);
  }
}

TEST(Contact, ArmSettlesOnPlane) {
  const ArmDynamicsModel model = reference_six_dof_dynamics();
  SimState s = make_rest_state(model, reference_six_dof_home());
  const double z0 = forward_kinematics(model.chain, s.q).translation.z();
  ContactPlane plane;
  plane.offset = z0 - 0.01;
  plane.stiffness = 5e4;
  plane.damping = 200.0;
  // Gravity compensation plus a downward push of 20 N at the tool.
  const Vec3 push(0, 0, -20.0);
  for (int i = 0; i < 3000; ++i) {
    const DynamicsTerms t = inverse_dynamics_terms(model, s.q, s.qdot);
    const Mat6X j = jacobian(model.chain, s.q);
    const VecX tau = t.gravity + t.coriolis + j.topRows<3>().transpose() * push - 5.0 * s.qdot;
    s = step(model, s, tau, &plane, 1e-3);
  }
  EXPECT_NEAR(s.normal_force, 20.0, 0.5);
  EXPECT_NEAR(s.penetration, 20.0 / 5e4, 2e-5);
}

TEST(Grasp, SlipCheckFrictionCone) {
  // Slips when 2 mu F < m (g + a).
  EXPECT_FALSE(grasp_slip_check(10.0, 0.5, 0.5, 0.0));
  EXPECT_TRUE(grasp_slip_check(4.0, 0.5, 0.5, 0.0));
  EXPECT_FALSE(grasp_slip_check(4.905, 0.5, 0.5, 0.0));
  EXPECT_TRUE(grasp_slip_check(4.905, 0.5, 0.5, 1.0));
  EXPECT_FALSE(grasp_slip_check(4.905, 0.5, 0.5, -3.0));  // downward accel does not help
}

TEST(Sensor, ReadsContactWeightAndBias) {
  const ArmDynamicsModel model = reference_six_dof_dynamics();
  SimState s = make_rest_state(model, reference_six_dof_home());
  s.contact_force = Vec3(0, 0, 5.0);
  PayloadSpec payload{0.4, Vec3(0, 0, 0.03), (Vec6() << 0.1, 0.2, 0.3, 0, 0, 0).finished()};
  std::mt19937_64 rng(38);
  const Pose ee = forward_kinematics(model.chain, s.q);
  const Wrench w = read_ft_sensor(s, payload, ee, 0.0, rng);
  const Mat3 rt = ee.rotation.transpose();
  const Vec3 expected = rt * (Vec3(0, 0, 5.0) + Vec3(0, 0, -9.81 * 0.4)) + Vec3(0.1, 0.2, 0.3);
  EXPECT_LT((w.force - expected).norm(), 1e-12);
  EXPECT_EQ(w.frame, WrenchFrame::kSensor);
}
