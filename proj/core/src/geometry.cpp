#include "contactkit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "contactkit/errors.hpp"

namespace contactkit {

namespace {
constexpr double kPiBranchWindow = 1e-3;
constexpr double kSmallAngle = 1e-10;
constexpr double kDegenerate6D = 1e-9;
}  // namespace

bool is_rotation(const Mat3& r, double tol) {
  if (!r.allFinite()) return false;
  const double ortho = (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
  return ortho <= tol && std::abs(r.determinant() - 1.0) <= tol;
}

bool is_valid_pose(const Pose& pose, double tol) {
  return is_rotation(pose.rotation, tol) && pose.translation.allFinite();
}

Rot6D encode_rot6d(const Mat3& r) { return {r.col(0), r.col(1)}; }

Mat3 decode_rot6d(const Rot6D& r6) {
  const double n1 = r6.a1.norm();
  if (!(n1 > kDegenerate6D)) {
    throw InvalidArgument("rot6d: first column has near-zero norm");
  }
  const Vec3 b1 = r6.a1 / n1;
  const Vec3 u2 = r6.a2 - b1.dot(r6.a2) * b1;
  const double n2 = u2.norm();
  if (!(n2 > kDegenerate6D)) {
    throw InvalidArgument("rot6d: columns are parallel or second column is zero");
  }
  const Vec3 b2 = u2 / n2;
  Mat3 r;
  r.col(0) = b1;
  r.col(1) = b2;
  r.col(2) = b1.cross(b2);
  return r;
}

Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return s;
}

Vec3 so3_log(const Mat3& r) {
  const Vec3 vee(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  const double s = 0.5 * vee.norm();
  const double c = 0.5 * (r.trace() - 1.0);
  const double angle = std::atan2(s, c);

  if (angle < kSmallAngle) {
    return 0.5 * vee;
  }
  if (std::numbers::pi - angle < kPiBranchWindow) {
    // vee is too small to carry the axis; use the symmetric part
    // (R + R^T)/2 = cos I + (1 - cos) a a^T.
    const Mat3 b = (0.5 * (r + r.transpose()) - c * Mat3::Identity()) / (1.0 - c);
    Eigen::Index k = 0;
    b.diagonal().maxCoeff(&k);
    Vec3 axis = b.col(k) / std::sqrt(std::max(b(k, k), 0.0));
    axis.normalize();
    if (axis.dot(vee) < 0.0) axis = -axis;
    return angle * axis;
  }
  return angle * (vee / (2.0 * s));
}

Mat3 so3_exp(const Vec3& w) {
  const double angle = w.norm();
  if (angle < kSmallAngle) {
    return Mat3::Identity() + skew(w);
  }
  return Eigen::AngleAxisd(angle, w / angle).toRotationMatrix();
}

Mat3 rot_x(double angle) { return Eigen::AngleAxisd(angle, Vec3::UnitX()).toRotationMatrix(); }
Mat3 rot_y(double angle) { return Eigen::AngleAxisd(angle, Vec3::UnitY()).toRotationMatrix(); }
Mat3 rot_z(double angle) { return Eigen::AngleAxisd(angle, Vec3::UnitZ()).toRotationMatrix(); }

Mat3 axis_angle(const Vec3& unit_axis, double angle) {
  return Eigen::AngleAxisd(angle, unit_axis).toRotationMatrix();
}

}  // namespace contactkit
