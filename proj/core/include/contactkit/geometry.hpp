#pragma once

#include <Eigen/Dense>

namespace contactkit {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using Mat6X = Eigen::Matrix<double, 6, Eigen::Dynamic>;

// Rigid transform. `rotation` maps child-frame coordinates into the parent.
struct Pose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static Pose Identity() { return {}; }
  static Pose FromTranslation(const Vec3& t) { return {Mat3::Identity(), t}; }

  Pose operator*(const Pose& rhs) const {
    return {rotation * rhs.rotation, rotation * rhs.translation + translation};
  }
  Vec3 operator*(const Vec3& p) const { return rotation * p + translation; }
  Pose inverse() const {
    const Mat3 rt = rotation.transpose();
    return {rt, -rt * translation};
  }
};

// True when R^T R = I and det(R) = +1 within `tol`.
bool is_rotation(const Mat3& r, double tol = 1e-9);
bool is_valid_pose(const Pose& pose, double tol = 1e-9);

// Two leading columns of a rotation matrix; the continuous wire form used by
// the action channel.
struct Rot6D {
  Vec3 a1 = Vec3::UnitX();
  Vec3 a2 = Vec3::UnitY();
};

Rot6D encode_rot6d(const Mat3& r);

// Gram-Schmidt back to SO(3). Throws InvalidArgument when a1 is (near) zero
// or a2 is (near) parallel to a1.
Mat3 decode_rot6d(const Rot6D& r6);

Mat3 skew(const Vec3& v);

// Rotation log as an axis-angle vector with angle in [0, pi].
Vec3 so3_log(const Mat3& r);
Mat3 so3_exp(const Vec3& w);

Mat3 rot_x(double angle);
Mat3 rot_y(double angle);
Mat3 rot_z(double angle);
Mat3 axis_angle(const Vec3& unit_axis, double angle);

}  // namespace contactkit
