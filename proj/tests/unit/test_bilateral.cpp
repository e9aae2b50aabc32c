#include <gtest/gtest.h>

#include <cmath>

#include "contactkit/bilateral.hpp"
#include "contactkit/errors.hpp"
#include "test_support.hpp"

using namespace contactkit;

namespace {

BilateralState settle(BilateralState s, double drive, const GraspContactModel* contact, const GripperParams& p,
                      double seconds, double dt = 1e-3) {
  for (int i = 0; i < static_cast<int>(seconds / dt); ++i) s = step_bilateral(s, drive, contact, p, dt);
  return s;
}

}  // namespace

TEST(Bilateral, SlaveAndMasterTorqueLaws) {
  GripperParams p;
  p.b = 1.5;
  p.delta = 0.1;
  p.a = 4.0;
  p.b_l = 0.02;
  BilateralState s;
  s.theta_m = 0.4;
  s.theta_s = 0.2;
  s.thetadot_m = 0.3;
  s.thetadot_s = -0.1;
  s.tau_s_filtered = 0.8;
  EXPECT_DOUBLE_EQ(slave_torque(s, p), p.kp * (1.5 * 0.4 - 0.2 - 0.1) + p.kd * (1.5 * 0.3 + 0.1));
  EXPECT_DOUBLE_EQ(master_torque(s, p), -0.8 / 4.0 + 0.02 * 0.3);
  p.reflection = false;
  EXPECT_DOUBLE_EQ(master_torque(s, p), 0.02 * 0.3);
}

TEST(Bilateral, ForceEstimateAndWidthMaps) {
  GripperParams p;
  EXPECT_DOUBLE_EQ(estimate_internal_force(2.0, p), p.k_tau * 2.0 / p.r_g);
  for (const double w : {0.0, 0.02, 0.065, 0.1}) EXPECT_NEAR(gripper_width(theta_for_width(w, p), p), w, 1e-15);
  EXPECT_LT(gripper_width(1.0, p), gripper_width(0.5, p));  // closing narrows
  EXPECT_NEAR(low_pass(1.0, 3.0, 1e-3, 20.0), 1.0 + 2.0 * (1e-3 / (1e-3 + 1.0 / (2 * M_PI * 20.0))), 1e-15);
}

TEST(Bilateral, GraspContactForce) {
  GripperParams p;
  GraspContactModel obj{0.06, 4000.0};
  EXPECT_EQ(grasp_contact_force(obj, theta_for_width(0.07, p), p), 0.0);
  EXPECT_NEAR(grasp_contact_force(obj, theta_for_width(0.059, p), p), 4.0, 1e-9);
  obj.contact_stiffness = -1.0;
  EXPECT_THROW(obj.validate(), InvalidArgument);
}

TEST(Bilateral, FreeSpaceSteadyStateTracksScaledMaster) {
  for (const auto& [b, delta] : {std::pair{1.0, 0.0}, {1.2, 0.05}, {0.8, -0.1}}) {
    GripperParams p;
    p.b = b;
    p.delta = delta;
    BilateralState s;
    s.theta_m = 0.5;
    s = settle(s, 0.0, nullptr, p, 5.0);
    EXPECT_NEAR(s.theta_s, b * s.theta_m - delta, 1e-4);
    EXPECT_LT(std::abs(s.thetadot_m) + std::abs(s.thetadot_s), 1e-6);
  }
}

TEST(Bilateral, ContactSteadyStateReflectsScaledTorque) {
  for (const double a : {1.0, 2.0, 5.0}) {
    GripperParams p;
    p.a = a;
    GraspContactModel obj{0.06, 3000.0};
    OperatorModel op{5.0, 0.05};
    BilateralState s;
    s.theta_m = theta_for_width(0.07, p);
    s.theta_s = s.theta_m;
    const double target = theta_for_width(0.055, p);
    for (int i = 0; i < 5000; ++i) s = step_bilateral(s, op.drive_torque(s, target, 0.0), &obj, p, 1e-3);
    ASSERT_GT(std::abs(s.tau_s), 1e-3);
    EXPECT_NEAR(s.tau_m, -s.tau_s / a, 0.02 * std::abs(s.tau_s / a));
    // Slave torque balances the contact reaction at rest.
    EXPECT_NEAR(estimate_internal_force(s.current_s, p), s.contact_force, 0.02 * s.contact_force);
  }
}

TEST(Bilateral, VelocityFeedbackReducesDriveTorque) {
  const auto mean_drive = [](double b_l) {
    GripperParams p;
    p.b_l = b_l;
    p.viscous = 0.01;
    OperatorModel op{2.0, 0.02};
    BilateralState s;
    const double omega = 0.5;
    double sum = 0.0;
    int n = 0;
    for (int i = 0; i < 3000; ++i) {
      const double t = i * 1e-3;
      const double drive = op.drive_torque(s, omega * t, omega);
      if (t > 1.0) {
        sum += drive;
        ++n;
      }
      s = step_bilateral(s, drive, nullptr, p, 1e-3);
    }
    return sum / n;
  };
  const double base = mean_drive(0.0);
  ASSERT_GT(base, 0.0);
  for (const double b_l : {0.002, 0.005, 0.01}) EXPECT_LT(mean_drive(b_l), base);
}

TEST(Bilateral, NonFiniteDriveRaisesFault) {
  GripperParams p;
  BilateralState s;
  EXPECT_THROW(step_bilateral(s, std::nan(""), nullptr, p, 1e-3), SimulationFault);
  p.a = 0.0;
  EXPECT_THROW(p.validate(), InvalidArgument);
}

TEST(Bilateral, RowMatchesColumns) {
  GripperParams p;
  BilateralState s;
  s.theta_s = 0.3;
  s.current_s = 1.5;
  const auto row = bilateral_row(s, p);
  EXPECT_EQ(std::string(kBilateralColumns[6]), "F_int");
  EXPECT_DOUBLE_EQ(row[6], estimate_internal_force(1.5, p));
  EXPECT_DOUBLE_EQ(row[7], gripper_width(0.3, p));
}

TEST(Bilateral, ParamsFromConfig) {
  const auto cfg = KeyValueConfig::parse("[gripper]\nkp = 3.5\na = 4\nreflection = false\n");
  const GripperParams p = GripperParams::from_config(cfg, "gripper");
  EXPECT_EQ(p.kp, 3.5);
  EXPECT_EQ(p.a, 4.0);
  EXPECT_FALSE(p.reflection);
  EXPECT_EQ(p.k_tau, GripperParams{}.k_tau);
}
