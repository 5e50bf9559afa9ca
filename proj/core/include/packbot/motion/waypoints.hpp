#pragma once

#include "packbot/geometry/pose.hpp"
#include "packbot/geometry/shapes.hpp"
#include "packbot/motion/arm_model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace packbot::motion {

enum class ArmSide { left, right };

inline std::string to_string(ArmSide s) { return s == ArmSide::left ? "left" : "right"; }

enum class WaypointLabel { required, optional };

enum class GripperMove { none, open, close };

struct GripperAction {
  GripperMove move = GripperMove::none;
  double width = 0.0;  // close target, meters
};

/// Planning-time attachment hint: what the gripper is expected to hold after
/// a close action, so downstream segments plan with the right geometry.
struct AttachmentHint {
  geom::ShapePrimitive shape;
  geom::Pose grasp_offset;
  bool dual = false;
};

/// End-effector target annotated required/optional. Optional waypoints may be
/// skipped when unreachable; required ones abort the mapping.
struct Waypoint {
  enum class Arm { left, right, both };

  Arm arm = Arm::left;
  geom::Pose target_left;   // used when arm is left or both
  geom::Pose target_right;  // used when arm is right or both
  WaypointLabel label = WaypointLabel::required;
  GripperAction gripper;
  std::optional<AttachmentHint> attach_on_close;
  bool detach_on_open = false;
  std::string note;  // free-form tag carried into traces ("grasp", "lift", ...)

  static Waypoint single(ArmSide side, const geom::Pose& target,
                         WaypointLabel label = WaypointLabel::required);
  static Waypoint dual(const geom::Pose& left, const geom::Pose& right,
                       WaypointLabel label = WaypointLabel::required);
};

/// Cartesian-space plan: an ordered list of labeled waypoints. Must contain at
/// least one required waypoint.
struct LabeledCartesianPlan {
  std::vector<Waypoint> waypoints;

  bool valid() const;
};

struct GripperEvent {
  std::size_t config_index = 0;
  ArmSide arm = ArmSide::left;
  GripperAction action;
  std::optional<AttachmentHint> attach_hint;
};

/// Where a waypoint landed in the realized joint path.
struct WaypointMark {
  std::size_t config_index = 0;
  std::size_t waypoint_index = 0;
  std::string note;
};

/// Configuration-space realization of a Cartesian plan: dense configs plus the
/// gripper actions attached to their arrival configs.
struct JointPath {
  std::vector<DualConfig> configs;
  std::vector<GripperEvent> gripper_events;
  std::vector<WaypointMark> waypoint_marks;

  bool empty() const { return configs.empty(); }
  double arc_length_inf() const;  // sum of per-step infinity norms
};

/// Timed no-op: pauses motion for `seconds` while the world stays put.
struct HoldCommand {
  double seconds = 0.0;
};

HoldCommand hold(double duration_seconds);

}  // namespace packbot::motion
