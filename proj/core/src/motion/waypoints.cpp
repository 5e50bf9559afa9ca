#include "packbot/motion/waypoints.hpp"

#include <stdexcept>

namespace packbot::motion {

Waypoint Waypoint::single(ArmSide side, const geom::Pose& target, WaypointLabel label) {
  Waypoint w;
  w.arm = side == ArmSide::left ? Arm::left : Arm::right;
  if (side == ArmSide::left)
    w.target_left = target;
  else
    w.target_right = target;
  w.label = label;
  return w;
}

Waypoint Waypoint::dual(const geom::Pose& left, const geom::Pose& right, WaypointLabel label) {
  Waypoint w;
  w.arm = Arm::both;
  w.target_left = left;
  w.target_right = right;
  w.label = label;
  return w;
}

bool LabeledCartesianPlan::valid() const {
  for (const auto& w : waypoints)
    if (w.label == WaypointLabel::required) return true;
  return false;
}

double JointPath::arc_length_inf() const {
  // Composite metric: the larger of the two arms' infinity norms per step.
  double total = 0.0;
  for (std::size_t i = 1; i < configs.size(); ++i) {
    total += std::max((configs[i].left - configs[i - 1].left).lpNorm<Eigen::Infinity>(),
                      (configs[i].right - configs[i - 1].right).lpNorm<Eigen::Infinity>());
  }
  return total;
}

HoldCommand hold(double duration_seconds) {
  if (duration_seconds < 0.0) throw std::invalid_argument("hold duration must be >= 0");
  return {duration_seconds};
}

}  // namespace packbot::motion
