#include "contactkit/compliance.hpp"

#include <algorithm>
#include <cmath>

#include "contactkit/errors.hpp"

namespace contactkit {

std::array<double, ActionStep::kWidth> ActionStep::to_row() const {
  return {delta_xyz.x(), delta_xyz.y(), delta_xyz.z(),
          rot6d.a1.x(),  rot6d.a1.y(),  rot6d.a1.z(),
          rot6d.a2.x(),  rot6d.a2.y(),  rot6d.a2.z(),
          force.x(),     force.y(),     force.z(),
          gripper_width};
}

ActionStep ActionStep::from_row(std::span<const double> row) {
  if (row.size() != kWidth) {
    throw DimensionError("action row needs 13 values, got " + std::to_string(row.size()));
  }
  ActionStep s;
  s.delta_xyz = {row[0], row[1], row[2]};
  s.rot6d = {{row[3], row[4], row[5]}, {row[6], row[7], row[8]}};
  s.force = {row[9], row[10], row[11]};
  s.gripper_width = row[12];
  return s;
}

void ActionStep::validate() const {
  const auto row = to_row();
  if (!std::all_of(row.begin(), row.end(), [](double v) { return std::isfinite(v); })) {
    throw InvalidArgument("action step has non-finite values");
  }
  if (gripper_width < 0.0) throw InvalidArgument("action step gripper width must be >= 0");
  decode_rot6d(rot6d);  // throws on degenerate columns
}

const std::array<std::string, ActionStep::kWidth>& action_columns() {
  static const std::array<std::string, ActionStep::kWidth> cols = {
      "dx", "dy", "dz", "r6d_a1x", "r6d_a1y", "r6d_a1z", "r6d_a2x",
      "r6d_a2y", "r6d_a2z", "fx", "fy", "fz", "width"};
  return cols;
}

void ActionChunk::validate() const {
  if (steps.empty()) throw InvalidArgument("action chunk must have at least one step");
  for (const ActionStep& s : steps) s.validate();
}

void StiffnessSchedule::validate() const {
  if (!(k_min > 0.0 && k_min <= k_max)) throw InvalidArgument("stiffness schedule needs 0 < k_min <= k_max");
  if (!(f_sat > 0.0)) throw InvalidArgument("stiffness schedule needs f_sat > 0");
}

Vec3 schedule_stiffness(const Vec3& force, const StiffnessSchedule& sched) {
  if (!force.allFinite()) throw InvalidArgument("schedule_stiffness: non-finite force");
  const auto ramp = [&](double magnitude) {
    return sched.k_max - (sched.k_max - sched.k_min) * std::min(magnitude / sched.f_sat, 1.0);
  };
  if (sched.mode == StiffnessSchedule::Mode::kMagnitude) {
    return Vec3::Constant(ramp(force.norm()));
  }
  return {ramp(std::abs(force.x())), ramp(std::abs(force.y())), ramp(std::abs(force.z()))};
}

VirtualTarget compile_virtual_target(const Pose& ref, const Vec3& force, const Vec3& kp_diag) {
  VirtualTarget vt;
  for (int i = 0; i < 3; ++i) {
    if (kp_diag[i] > 0.0) {
      vt.delta_p[i] = force[i] / kp_diag[i];
    } else if (force[i] != 0.0) {
      throw InvalidArgument("compile_virtual_target: zero stiffness on axis " + std::to_string(i) +
                            " with non-zero force");
    } else if (kp_diag[i] < 0.0) {
      throw InvalidArgument("compile_virtual_target: negative stiffness");
    }
  }
  vt.pose.rotation = ref.rotation;
  vt.pose.translation = ref.translation - vt.delta_p;
  return vt;
}

Pose integrate_reference(const Pose& prev_ref, const ActionStep& step) {
  step.validate();
  Pose next;
  next.translation = prev_ref.translation + step.delta_xyz;
  next.rotation = decode_rot6d(step.rot6d);
  return next;
}

std::vector<ComplianceCommand> compile_chunk(const ActionChunk& chunk, const Pose& start_ref,
                                             const StiffnessSchedule& sched) {
  chunk.validate();
  sched.validate();
  std::vector<ComplianceCommand> out;
  out.reserve(chunk.steps.size());
  Pose ref = start_ref;
  for (const ActionStep& step : chunk.steps) {
    ref = integrate_reference(ref, step);
    ComplianceCommand cmd;
    cmd.reference = ref;
    cmd.kp_diag = schedule_stiffness(step.force, sched);
    const VirtualTarget vt = compile_virtual_target(ref, step.force, cmd.kp_diag);
    cmd.virtual_target = vt.pose;
    cmd.delta_p = vt.delta_p;
    cmd.gripper_target_width = step.gripper_width;
    out.push_back(cmd);
  }
  return out;
}

RecedingHorizonScheduler::RecedingHorizonScheduler(StiffnessSchedule sched, Pose start_ref,
                                                   int execute_horizon)
    : sched_(sched), reference_(start_ref), horizon_(execute_horizon) {
  sched_.validate();
  if (horizon_ < 1) throw InvalidArgument("execute_horizon must be >= 1");
}

void RecedingHorizonScheduler::push(ActionChunk chunk) {
  chunk.validate();
  if (static_cast<int>(chunk.steps.size()) < horizon_) {
    throw InvalidArgument("chunk length " + std::to_string(chunk.steps.size()) +
                          " is shorter than the execute horizon " + std::to_string(horizon_));
  }
  chunks_.push_back(std::move(chunk));
}

void RecedingHorizonScheduler::compile_front() {
  ActionChunk prefix;
  prefix.steps.assign(chunks_.front().steps.begin(), chunks_.front().steps.begin() + horizon_);
  chunks_.pop_front();
  ++chunks_consumed_;
  for (ComplianceCommand& cmd : compile_chunk(prefix, reference_, sched_)) {
    queue_.push_back(std::move(cmd));
  }
  reference_ = queue_.back().reference;
}

RecedingHorizonScheduler::Emission RecedingHorizonScheduler::next() {
  if (queue_.empty() && !chunks_.empty()) compile_front();
  Emission e;
  if (queue_.empty()) {
    e.status = SchedulerStatus::kStarved;
    if (last_) {
      e.command = *last_;
    } else {
      e.command.reference = reference_;
      e.command.virtual_target = reference_;
      e.command.kp_diag = Vec3::Constant(sched_.k_max);
    }
    return e;
  }
  e.command = queue_.front();
  queue_.pop_front();
  last_ = e.command;
  return e;
}

}  // namespace contactkit
