#pragma once

#include <array>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "contactkit/geometry.hpp"

namespace contactkit {

// One policy output row: [dx dy dz | a1 a2 (6D rotation) | fx fy fz | width].
// `force` is the Cartesian interaction force acting on the robot (N).
struct ActionStep {
  Vec3 delta_xyz = Vec3::Zero();
  Rot6D rot6d;
  Vec3 force = Vec3::Zero();
  double gripper_width = 0.0;

  static constexpr int kWidth = 13;
  std::array<double, kWidth> to_row() const;
  static ActionStep from_row(std::span<const double> row);
  void validate() const;
};

// Column names of the 13-value action row, in wire order.
const std::array<std::string, ActionStep::kWidth>& action_columns();

struct ActionChunk {
  std::vector<ActionStep> steps;
  // Number of trailing steps that repeat the last real step.
  int padding = 0;

  bool padded() const { return padding > 0; }
  void validate() const;
};

struct StiffnessSchedule {
  enum class Mode { kPerAxis, kMagnitude };

  double k_max = 2000.0;  // N/m at zero force
  double k_min = 200.0;   // N/m at |f| >= f_sat
  double f_sat = 20.0;    // N
  Mode mode = Mode::kPerAxis;

  void validate() const;
};

struct ComplianceCommand {
  Pose virtual_target;
  Vec3 kp_diag = Vec3::Constant(2000.0);
  double gripper_target_width = 0.0;
  Pose reference;
  Vec3 delta_p = Vec3::Zero();
};

// k_i = k_max - (k_max - k_min) * min(|f_i| / f_sat, 1); magnitude mode uses
// |f| for every axis.
Vec3 schedule_stiffness(const Vec3& force, const StiffnessSchedule& sched);

struct VirtualTarget {
  Pose pose;
  Vec3 delta_p = Vec3::Zero();
};

// delta_p = K^{-1} f, p_vt = p_ref - delta_p, rotation kept from ref. A zero
// stiffness entry is only accepted when the force on that axis is zero.
VirtualTarget compile_virtual_target(const Pose& ref, const Vec3& force, const Vec3& kp_diag);

// Translation accumulates delta_xyz; rotation is the step's absolute 6D
// orientation.
Pose integrate_reference(const Pose& prev_ref, const ActionStep& step);

std::vector<ComplianceCommand> compile_chunk(const ActionChunk& chunk, const Pose& start_ref,
                                             const StiffnessSchedule& sched);

enum class SchedulerStatus { kOk, kStarved };

// Receding-horizon consumer: each pushed chunk contributes its first
// `execute_horizon` commands, compiled from the reference where the previous
// chunk left off. When no chunk is pending the last command is held and
// kStarved is reported.
class RecedingHorizonScheduler {
 public:
  RecedingHorizonScheduler(StiffnessSchedule sched, Pose start_ref, int execute_horizon);

  // Throws InvalidArgument if the chunk is shorter than the horizon.
  void push(ActionChunk chunk);

  struct Emission {
    ComplianceCommand command;
    SchedulerStatus status = SchedulerStatus::kOk;
  };
  Emission next();

  std::size_t pending_commands() const { return queue_.size(); }
  std::size_t chunks_consumed() const { return chunks_consumed_; }
  const Pose& reference() const { return reference_; }
  int execute_horizon() const { return horizon_; }

 private:
  void compile_front();

  StiffnessSchedule sched_;
  Pose reference_;
  int horizon_;
  std::deque<ActionChunk> chunks_;
  std::deque<ComplianceCommand> queue_;
  std::optional<ComplianceCommand> last_;
  std::size_t chunks_consumed_ = 0;
};

}  // namespace contactkit
