#include "contactkit/kinematics.hpp"

#include <cmath>
#include <numbers>
#include <fstream>
#include <sstream>

#include "contactkit/config.hpp"
#include "contactkit/errors.hpp"

namespace contactkit {

namespace {

constexpr double kAxisNormTol = 1e-9;

void check_dof(const ChainModel& chain, const VecX& q) {
  if (q.size() != chain.dof()) {
    std::ostringstream msg;
    msg << "joint vector has " << q.size() << " entries, chain has " << chain.dof() << " joints";
    throw DimensionError(msg.str());
  }
}

}  // namespace

void ChainModel::validate() const {
  if (links.empty()) throw InvalidArgument("chain must have at least one joint");
  if (limits.size() != links.size()) {
    throw InvalidArgument("chain: joint limit count does not match joint count");
  }
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (std::abs(links[i].axis.norm() - 1.0) > kAxisNormTol) {
      throw InvalidArgument("chain: joint " + std::to_string(i) + " axis is not unit length");
    }
    if (!is_valid_pose(links[i].origin)) {
      throw InvalidArgument("chain: joint " + std::to_string(i) + " origin is not a rigid transform");
    }
    if (!(limits[i].min < limits[i].max)) {
      throw InvalidArgument("chain: joint " + std::to_string(i) + " has min >= max");
    }
  }
  if (!is_valid_pose(tool)) throw InvalidArgument("chain: tool is not a rigid transform");
}

std::vector<Pose> joint_frames(const ChainModel& chain, const VecX& q) {
  check_dof(chain, q);
  std::vector<Pose> frames;
  frames.reserve(chain.links.size());
  Pose t = Pose::Identity();
  for (int i = 0; i < chain.dof(); ++i) {
    const JointLink& link = chain.links[i];
    t = t * link.origin;
    t.rotation = t.rotation * axis_angle(link.axis, q[i]);
    frames.push_back(t);
  }
  return frames;
}

Pose forward_kinematics(const ChainModel& chain, const VecX& q) {
  return joint_frames(chain, q).back() * chain.tool;
}

Mat6X jacobian(const ChainModel& chain, const VecX& q) {
  const std::vector<Pose> frames = joint_frames(chain, q);
  const Vec3 p_ee = (frames.back() * chain.tool).translation;
  Mat6X jac(6, chain.dof());
  for (int i = 0; i < chain.dof(); ++i) {
    const Vec3 z = frames[i].rotation * chain.links[i].axis;
    jac.col(i).head<3>() = z.cross(p_ee - frames[i].translation);
    jac.col(i).tail<3>() = z;
  }
  return jac;
}

PoseError pose_error(const Pose& target, const Pose& current) {
  PoseError e;
  e.xi.head<3>() = target.translation - current.translation;
  e.xi.tail<3>() = so3_log(target.rotation * current.rotation.transpose());
  return e;
}

VecX dls_solve(const Mat6X& jac, const Vec6& xi, double lambda) {
  if (!(lambda > 0.0)) throw InvalidArgument("dls: damping must be positive");
  Mat6 a = jac * jac.transpose();
  a.diagonal().array() += lambda * lambda;
  return jac.transpose() * a.ldlt().solve(xi);
}

VecX dls_ik_step(const ChainModel& chain, const VecX& q, const Pose& target, double lambda) {
  const PoseError err = pose_error(target, forward_kinematics(chain, q));
  return dls_solve(jacobian(chain, q), err.xi, lambda);
}

VecX clamp_to_limits(const ChainModel& chain, const VecX& q, bool* clamped) {
  check_dof(chain, q);
  VecX out = q;
  bool any = false;
  for (int i = 0; i < chain.dof(); ++i) {
    const JointLimit& lim = chain.limits[i];
    if (out[i] < lim.min) {
      out[i] = lim.min;
      any = true;
    } else if (out[i] > lim.max) {
      out[i] = lim.max;
      any = true;
    }
  }
  if (clamped != nullptr) *clamped = any;
  return out;
}

IkResult solve_ik(const ChainModel& chain, const VecX& q0, const Pose& target,
                  const IkOptions& options) {
  if (!(options.tol > 0.0)) throw InvalidArgument("solve_ik: tol must be positive");
  if (options.max_iters < 1) throw InvalidArgument("solve_ik: max_iters must be >= 1");
  check_dof(chain, q0);

  IkResult result;
  result.q = q0;
  for (;;) {
    const PoseError err = pose_error(target, forward_kinematics(chain, result.q));
    result.final_error = err.norm();
    if (result.final_error < options.tol) {
      result.converged = true;
      break;
    }
    if (result.iterations >= options.max_iters) break;
    const VecX dq = dls_solve(jacobian(chain, result.q), err.xi, options.lambda);
    bool clamped = false;
    result.q = clamp_to_limits(chain, result.q + dq, &clamped);
    result.clamped = result.clamped || clamped;
    ++result.iterations;
  }
  return result;
}

ChainModel parse_chain(const std::string& text) {
  const KeyValueConfig cfg = KeyValueConfig::parse(text);
  const int dof = cfg.get_int("chain.dof");
  if (dof < 1) throw ConfigError("chain.dof must be >= 1");

  ChainModel chain;
  chain.tool.translation = cfg.get_vec3("chain.tool_translation", Vec3::Zero());
  if (cfg.has("chain.tool_rot6d")) {
    chain.tool.rotation = decode_rot6d(cfg.get_rot6d("chain.tool_rot6d"));
  }
  for (int i = 0; i < dof; ++i) {
    const std::string sec = "link" + std::to_string(i) + ".";
    if (!cfg.has(sec + "axis")) throw ConfigError("chain: missing section [link" + std::to_string(i) + "]");
    JointLink link;
    link.axis = cfg.get_vec3(sec + "axis");
    link.origin.translation = cfg.get_vec3(sec + "offset_translation", Vec3::Zero());
    if (cfg.has(sec + "offset_rot6d")) {
      link.origin.rotation = decode_rot6d(cfg.get_rot6d(sec + "offset_rot6d"));
    }
    const std::vector<double> lim = cfg.get_doubles(sec + "limits", {-3.141592653589793, 3.141592653589793});
    if (lim.size() != 2) throw ConfigError("chain: " + sec + "limits needs two values");
    chain.links.push_back(link);
    chain.limits.push_back({lim[0], lim[1]});
  }
  try {
    chain.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  return chain;
}

ChainModel load_chain(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("chain file not found: " + path.string());
  try {
    return parse_chain(read_text_file(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string format_chain(const ChainModel& chain) {
  std::ostringstream out;
  const auto vec = [](const Vec3& v) { return format_doubles({v.x(), v.y(), v.z()}); };
  const auto r6 = [](const Mat3& r) {
    const Rot6D e = encode_rot6d(r);
    return format_doubles({e.a1.x(), e.a1.y(), e.a1.z(), e.a2.x(), e.a2.y(), e.a2.z()});
  };
  out << "[chain]\n"
      << "dof = " << chain.dof() << "\n"
      << "tool_translation = " << vec(chain.tool.translation) << "\n"
      << "tool_rot6d = " << r6(chain.tool.rotation) << "\n";
  for (int i = 0; i < chain.dof(); ++i) {
    out << "\n[link" << i << "]\n"
        << "axis = " << vec(chain.links[i].axis) << "\n"
        << "offset_translation = " << vec(chain.links[i].origin.translation) << "\n"
        << "offset_rot6d = " << r6(chain.links[i].origin.rotation) << "\n"
        << "limits = " << format_doubles({chain.limits[i].min, chain.limits[i].max}) << "\n";
  }
  return out.str();
}

ChainModel planar_two_link(double l1, double l2) {
  ChainModel chain;
  chain.links.push_back({Vec3::UnitZ(), Pose::Identity()});
  chain.links.push_back({Vec3::UnitZ(), Pose::FromTranslation({l1, 0.0, 0.0})});
  // Continuous joints: wide limits so IK can wrap through +-pi.
  chain.limits.assign(2, JointLimit{-2.0 * std::numbers::pi, 2.0 * std::numbers::pi});
  chain.tool = Pose::FromTranslation({l2, 0.0, 0.0});
  return chain;
}

ChainModel reference_six_dof() {
  ChainModel chain;
  chain.links = {
      {Vec3::UnitZ(), Pose::FromTranslation({0.0, 0.0, 0.30})},  // base yaw
      {Vec3::UnitY(), Pose::Identity()},                          // shoulder pitch
      {Vec3::UnitY(), Pose::FromTranslation({0.0, 0.0, 0.40})},  // elbow
      {Vec3::UnitZ(), Pose::FromTranslation({0.0, 0.0, 0.35})},  // forearm roll
      {Vec3::UnitY(), Pose::Identity()},                          // wrist pitch
      {Vec3::UnitZ(), Pose::Identity()},                          // flange roll
  };
  chain.limits = {{-2.9, 2.9}, {-2.0, 2.0}, {-2.6, 2.6}, {-2.9, 2.9}, {-2.0, 2.0}, {-2.9, 2.9}};
  chain.tool = Pose::FromTranslation({0.0, 0.0, 0.10});
  return chain;
}

VecX reference_six_dof_home() {
  // Tool tip near (0.45, 0, 0.10) pointing straight down; elbow up.
  VecX q(6);
  q << 0.0, 0.9629, 1.8235, 0.0, 0.3552, 0.0;
  return q;
}

}  // namespace contactkit
