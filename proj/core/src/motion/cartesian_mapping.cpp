#include "packbot/motion/cartesian_mapping.hpp"

#include "packbot/rng.hpp"

#include <cmath>

namespace packbot::motion {

namespace {

// IK solution that is also collision-free for the whole composite config.
// Retries with perturbed seeds; each retry reruns the restart schedule.
std::optional<JointVector> collision_free_ik(const CollisionWorld& world,
                                             const DualArmModel& models, ArmSide side,
                                             const geom::Pose& target, const DualConfig& current,
                                             const MappingParams& params, Rng& rng) {
  const ArmModel& arm = side == ArmSide::left ? models.left : models.right;
  const JointVector& seed = side == ArmSide::left ? current.left : current.right;

  for (int attempt = 0; attempt < params.collision_free_ik_attempts; ++attempt) {
    IkParams ik = params.ik;
    ik.seed = rng.next_u64();
    JointVector start_seed = seed;
    if (attempt > 0) {
      for (int i = 0; i < start_seed.size(); ++i) {
        const auto& j = arm.joints[static_cast<std::size_t>(i)];
        start_seed[i] =
            std::clamp(start_seed[i] + rng.uniform(-0.6, 0.6), j.min_rad, j.max_rad);
      }
    }
    auto q = solve_ik(arm, target, start_seed, ik);
    if (!q) continue;
    DualConfig candidate = current;
    (side == ArmSide::left ? candidate.left : candidate.right) = *q;
    if (!in_collision(world, models, candidate)) return q;
  }
  return std::nullopt;
}

void append_path(JointPath& total, const JointPath& segment) {
  std::size_t offset = total.configs.size();
  auto begin = segment.configs.begin();
  if (!total.configs.empty() && !segment.configs.empty() &&
      total.configs.back().approx_equal(segment.configs.front())) {
    ++begin;
    offset -= 1;  // the arrival index of the first segment config collapses onto the last
  }
  total.configs.insert(total.configs.end(), begin, segment.configs.end());
  (void)offset;
}

}  // namespace

MappingResult map_cartesian_plan(const CollisionWorld& world, const DualArmModel& models,
                                 const LabeledCartesianPlan& plan, const DualConfig& start,
                                 const MappingParams& params, std::uint64_t seed) {
  MappingResult result;
  if (!plan.valid()) {
    result.status = MappingStatus::unreachable_required;
    result.failed_waypoint = 0;
    return result;
  }

  Rng rng(seed);
  CollisionWorld working = world;
  DualConfig current = start;
  result.path.configs.push_back(current);

  for (std::size_t idx = 0; idx < plan.waypoints.size(); ++idx) {
    const Waypoint& wp = plan.waypoints[idx];

    // Solve the waypoint targets, seeded from the current configuration.
    DualConfig goal = current;
    bool reachable = true;
    if (wp.arm == Waypoint::Arm::left || wp.arm == Waypoint::Arm::both) {
      auto q = collision_free_ik(working, models, ArmSide::left, wp.target_left, goal, params, rng);
      if (q)
        goal.left = *q;
      else
        reachable = false;
    }
    if (reachable && (wp.arm == Waypoint::Arm::right || wp.arm == Waypoint::Arm::both)) {
      auto q =
          collision_free_ik(working, models, ArmSide::right, wp.target_right, goal, params, rng);
      if (q)
        goal.right = *q;
      else
        reachable = false;
    }

    if (!reachable) {
      if (wp.label == WaypointLabel::optional) {
        result.skipped_waypoints.push_back(idx);
        continue;
      }
      result.status = MappingStatus::unreachable_required;
      result.failed_waypoint = idx;
      return result;
    }

    if (!goal.approx_equal(current, 1e-10)) {
      PlanResult leg = rrt_connect(working, models, current, goal, params.rrt, rng.next_u64());
      if (leg.status != PlanStatus::ok) {
        if (wp.label == WaypointLabel::optional) {
          result.skipped_waypoints.push_back(idx);
          continue;
        }
        result.status = MappingStatus::no_path_between;
        result.failed_waypoint = idx;
        return result;
      }
      append_path(result.path, leg.path);
      current = goal;
    }

    const std::size_t arrival = result.path.configs.size() - 1;
    result.path.waypoint_marks.push_back({arrival, idx, wp.note});

    if (wp.gripper.move != GripperMove::none) {
      auto emit = [&](ArmSide side) {
        GripperEvent ev;
        ev.config_index = arrival;
        ev.arm = side;
        ev.action = wp.gripper;
        if (wp.gripper.move == GripperMove::close) ev.attach_hint = wp.attach_on_close;
        result.path.gripper_events.push_back(ev);
      };
      if (wp.arm == Waypoint::Arm::left || wp.arm == Waypoint::Arm::both) emit(ArmSide::left);
      if (wp.arm == Waypoint::Arm::right || wp.arm == Waypoint::Arm::both) emit(ArmSide::right);

      // Keep the planning world's attachment state in step with the actions.
      if (wp.gripper.move == GripperMove::close && wp.attach_on_close) {
        AttachedObject att{wp.attach_on_close->shape, wp.attach_on_close->grasp_offset,
                           wp.attach_on_close->dual};
        if (wp.arm == Waypoint::Arm::right)
          working.attached_right = att;
        else
          working.attached_left = att;
      }
      if (wp.gripper.move == GripperMove::open && wp.detach_on_open) {
        if (wp.arm == Waypoint::Arm::right || wp.arm == Waypoint::Arm::both)
          working.attached_right.reset();
        if (wp.arm == Waypoint::Arm::left || wp.arm == Waypoint::Arm::both)
          working.attached_left.reset();
      }
    }
  }

  result.status = MappingStatus::ok;
  return result;
}

}  // namespace packbot::motion
