#pragma once

#include <string_view>

#include "contactkit/geometry.hpp"

namespace contactkit {

enum class WrenchFrame { kWorld, kSensor, kEndEffector };

std::string_view to_string(WrenchFrame frame);

// Force (N) and torque (N*m) with the frame they are expressed in. Torque is
// taken about that frame's origin.
struct Wrench {
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();
  WrenchFrame frame = WrenchFrame::kSensor;

  static Wrench FromVector(const Vec6& v, WrenchFrame frame) {
    return {v.head<3>(), v.tail<3>(), frame};
  }
  Vec6 vector() const {
    Vec6 v;
    v << force, torque;
    return v;
  }
};

}  // namespace contactkit
