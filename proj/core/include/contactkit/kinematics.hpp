#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "contactkit/geometry.hpp"

namespace contactkit {

// One revolute joint. `origin` is the fixed transform from the previous joint
// frame (or the base) to this joint's frame at q = 0; the joint then rotates
// about `axis`, expressed in its own frame.
struct JointLink {
  Vec3 axis = Vec3::UnitZ();
  Pose origin;
};

struct JointLimit {
  double min = -3.141592653589793;
  double max = 3.141592653589793;
};

struct ChainModel {
  std::vector<JointLink> links;
  std::vector<JointLimit> limits;
  // Last joint frame -> end-effector.
  Pose tool;

  int dof() const { return static_cast<int>(links.size()); }

  // Throws InvalidArgument on dof < 1, non-unit axes, inverted limits or
  // mismatched limit count.
  void validate() const;
};

// Task-space error between two poses:
//   xi[0:3] = p_target - p_current
//   xi[3:6] = log(R_target * R_current^T)
struct PoseError {
  Vec6 xi = Vec6::Zero();

  Vec3 translation() const { return xi.head<3>(); }
  Vec3 rotation() const { return xi.tail<3>(); }
  double norm() const { return xi.norm(); }
};

Pose forward_kinematics(const ChainModel& chain, const VecX& q);

// World pose of every joint frame (after the joint rotation), base first.
std::vector<Pose> joint_frames(const ChainModel& chain, const VecX& q);

// Geometric Jacobian at the end-effector, rows = [linear; angular].
Mat6X jacobian(const ChainModel& chain, const VecX& q);

PoseError pose_error(const Pose& target, const Pose& current);

// J^T (J J^T + lambda^2 I)^{-1} xi.
VecX dls_solve(const Mat6X& jac, const Vec6& xi, double lambda);

// One damped least-squares update toward `target`; the caller forms
// q_d = q + dq.
VecX dls_ik_step(const ChainModel& chain, const VecX& q, const Pose& target, double lambda);

// Clamps into the joint limits; `clamped` reports whether any joint moved.
VecX clamp_to_limits(const ChainModel& chain, const VecX& q, bool* clamped = nullptr);

struct IkOptions {
  double lambda = 0.05;
  int max_iters = 100;
  double tol = 1e-8;
};

struct IkResult {
  VecX q;
  bool converged = false;
  int iterations = 0;
  double final_error = 0.0;
  bool clamped = false;
};

// Iterates dls_ik_step with limit clamping. Non-convergence is reported, not
// thrown.
IkResult solve_ik(const ChainModel& chain, const VecX& q0, const Pose& target,
                  const IkOptions& options = {});

// Plain-text chain definition (INI sections [chain], [link0], [link1], ...).
// See docs/formats.md.
ChainModel parse_chain(const std::string& text);
ChainModel load_chain(const std::filesystem::path& path);
std::string format_chain(const ChainModel& chain);

// Planar arm in the xy-plane with z-axis joints, limits +-2 pi; tool at the
// tip of link 2.
ChainModel planar_two_link(double l1 = 0.5, double l2 = 0.5);

// Canonical 6-DoF anthropomorphic arm (shoulder at 0.3 m, 0.40 m upper arm,
// 0.35 m forearm, spherical wrist, 0.10 m tool).
ChainModel reference_six_dof();

// Joint configuration with the tool pointing down above the work surface.
VecX reference_six_dof_home();

}  // namespace contactkit
