#pragma once

#include "packbot/motion/kinematics.hpp"
#include "packbot/motion/rrt_connect.hpp"

namespace packbot::motion {

enum class MappingStatus { ok, unreachable_required, no_path_between };

struct MappingResult {
  MappingStatus status = MappingStatus::ok;
  JointPath path;
  std::vector<std::size_t> skipped_waypoints;  // optional waypoints dropped
  std::size_t failed_waypoint = 0;             // valid when status != ok
};

struct MappingParams {
  IkParams ik;
  RrtParams rrt;
  int collision_free_ik_attempts = 16;
};

/// Realize a labeled Cartesian plan in configuration space.
///
/// Waypoints are solved in order with IK seeded from the previous
/// configuration (soft continuity); unreachable optional waypoints are
/// skipped, unreachable required ones abort. Consecutive realized
/// configurations are joined with RRT-Connect. Gripper actions land on their
/// arrival configs, and attachment hints update the planning world mid-plan.
/// The mapping is not guaranteed to find a realization even when one exists;
/// failures surface as MappingStatus values for the executive to treat as
/// motion failures.
MappingResult map_cartesian_plan(const CollisionWorld& world, const DualArmModel& models,
                                 const LabeledCartesianPlan& plan, const DualConfig& start,
                                 const MappingParams& params, std::uint64_t seed);

}  // namespace packbot::motion
