#include "packbot/harness/executors.hpp"

#include "packbot/motion/kinematics.hpp"
#include "packbot/perception/segmentation.hpp"

#include <algorithm>
#include <cmath>

namespace packbot::harness {

using exec::Outcome;
using geom::Pose;
using geom::Vec3;
using motion::ArmSide;
using skills::GroundedExecution;

namespace {

const skills::SensorSpec& binding_sensor(const TrialContext& ctx,
                                         const GroundedExecution& grounded) {
  const auto& sensors = ctx.scenario->graph.sensors;
  for (const auto& id : grounded.binding.sensors) {
    auto it = sensors.find(id);
    if (it != sensors.end() && it->second.kind == skills::SensorKind::head_camera)
      return it->second;
  }
  if (!grounded.binding.sensors.empty()) {
    auto it = sensors.find(grounded.binding.sensors.front());
    if (it != sensors.end()) return it->second;
  }
  for (const auto& [id, sensor] : sensors)
    if (sensor.kind == skills::SensorKind::head_camera) return sensor;
  throw std::runtime_error("no usable sensor registered in the skill graph");
}

geom::Aabb detection_region(const TrialContext& ctx, const std::string& object) {
  auto it = ctx.scenario->object_bin.find(object);
  geom::Aabb region;
  if (it != ctx.scenario->object_bin.end()) {
    const auto& bin = ctx.world.bins[static_cast<std::size_t>(it->second)];
    region = bin.interior_aabb();
  } else {
    region = ctx.world.bins.front().interior_aabb();
  }
  region.min -= Vec3(0.03, 0.03, 0.05);
  region.max += Vec3(0.03, 0.03, 0.35);
  return region;
}

percept::SegmentedCloud observe(TrialContext& ctx, const GroundedExecution& grounded) {
  return percept::segment_scene(ctx.world, binding_sensor(ctx, grounded),
                                ctx.world.noise, ctx.rng.next_u64(),
                                ctx.scenario->params.segmentation);
}

const sim::BinGeometry& object_bin(const TrialContext& ctx, const std::string& object) {
  auto it = ctx.scenario->object_bin.find(object);
  const int idx = it != ctx.scenario->object_bin.end() ? it->second : 0;
  return ctx.world.bins[static_cast<std::size_t>(idx)];
}

ArmSide binding_arm(const GroundedExecution& grounded) {
  return grounded.binding.embodiment.mode == skills::EmbodimentMode::single_arm_left
             ? ArmSide::left
             : ArmSide::right;
}

std::string side_prefix(ArmSide side) { return side == ArmSide::left ? "left" : "right"; }

void allow_gripper_contact(motion::CollisionWorld& world, ArmSide side,
                           const std::string& obstacle_pattern) {
  world.allow(side_prefix(side) + ":fingers", obstacle_pattern);
  world.allow(side_prefix(side) + ":palm", obstacle_pattern);
  world.allow(side_prefix(side) + ":attached", obstacle_pattern);
}

// Mirror the simulator's actual attachment into the planning world.
void sync_attachments(motion::CollisionWorld& cw, const TrialContext& ctx) {
  for (int g = 0; g < 2; ++g) {
    const auto& gripper = ctx.world.grippers[g];
    if (gripper.attached.empty()) continue;
    const sim::ObjectInstance* obj = ctx.world.find(gripper.attached);
    if (!obj || obj->grasped_by != g) continue;
    const bool dual = !ctx.world.grippers[0].attached.empty() &&
                      ctx.world.grippers[0].attached == ctx.world.grippers[1].attached;
    motion::AttachedObject att{obj->spec.shape, obj->grasp_offset, dual};
    if (g == 0)
      cw.attached_left = att;
    else
      cw.attached_right = att;
  }
}

Outcome run_mapping(TrialContext& ctx, const motion::CollisionWorld& cw,
                    const motion::LabeledCartesianPlan& plan) {
  try {
    const motion::MappingResult mapped =
        motion::map_cartesian_plan(cw, ctx.scenario->models, plan, ctx.world.arms,
                                   ctx.scenario->params.mapping, ctx.rng.next_u64());
    ctx.waypoints_skipped += static_cast<int>(mapped.skipped_waypoints.size());
    if (mapped.status != motion::MappingStatus::ok) return Outcome::motion_failure;
    sim::apply_path(ctx.world, ctx.scenario->models, mapped.path,
                    ctx.scenario->params.pick_radius);
    return Outcome::success;
  } catch (const std::invalid_argument&) {
    // Start-in-collision or limit violations surface as motion failures.
    return Outcome::motion_failure;
  }
}

// Like run_mapping but reports which optional waypoints survived.
struct MappedRun {
  Outcome outcome = Outcome::motion_failure;
  std::vector<std::size_t> skipped;
};

MappedRun run_mapping_detailed(TrialContext& ctx, const motion::CollisionWorld& cw,
                               const motion::LabeledCartesianPlan& plan) {
  MappedRun out;
  try {
    const motion::MappingResult mapped =
        motion::map_cartesian_plan(cw, ctx.scenario->models, plan, ctx.world.arms,
                                   ctx.scenario->params.mapping, ctx.rng.next_u64());
    ctx.waypoints_skipped += static_cast<int>(mapped.skipped_waypoints.size());
    out.skipped = mapped.skipped_waypoints;
    if (mapped.status != motion::MappingStatus::ok) return out;
    sim::apply_path(ctx.world, ctx.scenario->models, mapped.path,
                    ctx.scenario->params.pick_radius);
    out.outcome = Outcome::success;
    return out;
  } catch (const std::invalid_argument&) {
    return out;
  }
}

Outcome exec_detect_rigid(TrialContext& ctx, const GroundedExecution& grounded,
                          const exec::AtomicTask& task) {
  if (!task.object) return Outcome::perception_failure;
  const auto& object = ctx.scenario->graph.objects.at(*task.object);
  percept::DetectParams params = ctx.scenario->params.detect;
  params.region = detection_region(ctx, *task.object);
  const auto seg = observe(ctx, grounded);
  const auto det = percept::detect_rigid(seg, object, params);
  if (det.status != percept::DetectStatus::ok || !det.estimate.converged)
    return Outcome::perception_failure;
  ctx.estimates[*task.object] = det.estimate;
  ctx.target_instance[*task.object] = det.instance;
  return Outcome::success;
}

Outcome exec_detect_deformable(TrialContext& ctx, const GroundedExecution& grounded,
                               const exec::AtomicTask& task) {
  if (!task.object) return Outcome::perception_failure;
  const auto& object = ctx.scenario->graph.objects.at(*task.object);
  percept::DetectParams params = ctx.scenario->params.detect;
  params.region = detection_region(ctx, *task.object);
  const auto seg = observe(ctx, grounded);
  const auto det = percept::detect_deformable(seg, object, params);
  if (det.status != percept::DetectStatus::ok || det.candidates.empty())
    return Outcome::perception_failure;
  ctx.edges[*task.object] = det.candidates;
  ctx.target_instance[*task.object] = det.instance;
  return Outcome::success;
}

Outcome exec_detect_pick(TrialContext& ctx, const GroundedExecution& grounded,
                         const exec::AtomicTask& task) {
  if (!task.object) return Outcome::pick_failure;
  const auto& object = ctx.scenario->graph.objects.at(*task.object);
  const ArmSide side = ctx.last_grasp && ctx.last_grasp->mode == manip::GraspSpec::Mode::single
                           ? ctx.last_grasp->arm
                           : ArmSide::left;
  const motion::ArmModel& arm =
      side == ArmSide::left ? ctx.scenario->models.left : ctx.scenario->models.right;
  const Pose tcp = motion::forward_kinematics(
      arm, side == ArmSide::left ? ctx.world.arms.left : ctx.world.arms.right);
  const auto seg = observe(ctx, grounded);
  const auto verdict =
      percept::detect_pick(tcp, seg, object, ctx.scenario->params.detect);
  return verdict.success ? Outcome::success : Outcome::pick_failure;
}

const skills::ToolSpec& binding_tool(const TrialContext& ctx, const GroundedExecution& grounded) {
  return ctx.scenario->graph.tools.at(grounded.binding.tool);
}

double lift_height_for(const TrialContext& ctx, const std::string& object_name,
                       const skills::ObjectSpec& object, const Pose& estimated_pose) {
  const auto& bin = object_bin(ctx, object_name);
  const double cap_r = motion::bounding_capsule(object.shape, estimated_pose).radius;
  return std::max(0.10, bin.rim_z() + 0.035 + cap_r - estimated_pose.translation.z());
}

Outcome exec_pick(TrialContext& ctx, const GroundedExecution& grounded,
                  const exec::AtomicTask& task) {
  if (!task.object) return Outcome::motion_failure;
  const auto& object = ctx.scenario->graph.objects.at(*task.object);
  const auto& tool = binding_tool(ctx, grounded);

  // A retried pick may still hold something from the failed attempt.
  for (ArmSide side : {ArmSide::left, ArmSide::right}) {
    if (!ctx.world.grippers[side == ArmSide::left ? 0 : 1].attached.empty())
      sim::release(ctx.world, ctx.scenario->models, side);
  }

  manip::PerceptionInput perception;
  Pose estimated_pose;
  if (object.rigidity == skills::Rigidity::deformable) {
    auto it = ctx.edges.find(*task.object);
    if (it == ctx.edges.end() || it->second.empty()) return Outcome::motion_failure;
    perception = it->second;
    estimated_pose = Pose::from_translation(it->second.front().grasp_point);
  } else {
    auto it = ctx.estimates.find(*task.object);
    if (it == ctx.estimates.end()) return Outcome::motion_failure;
    perception = it->second;
    estimated_pose = it->second.pose;
  }

  const std::string target = ctx.target_instance.count(*task.object)
                                 ? ctx.target_instance[*task.object]
                                 : std::string{};
  motion::CollisionWorld cw = sim::build_collision_world(ctx.world, target);
  sync_attachments(cw, ctx);
  const auto& bin = object_bin(ctx, *task.object);
  // Reaching into the source bin and lifting out of it are deliberate
  // near-contact phases for the gripper and the held object.
  for (ArmSide side : {ArmSide::left, ArmSide::right}) {
    allow_gripper_contact(cw, side, bin.name + ":*");
    if (object.rigidity == skills::Rigidity::deformable) {
      allow_gripper_contact(cw, side, "table");
      ctx.waypoints_skipped += 0;
    }
  }

  manip::PickParams pick_params = ctx.scenario->params.pick;
  pick_params.lift_height = lift_height_for(ctx, *task.object, object, estimated_pose);

  const auto planned = manip::plan_pick(object, perception, tool, cw, pick_params);
  if (planned.status != manip::PickPlanStatus::ok) return Outcome::motion_failure;

  const Outcome outcome = run_mapping(ctx, cw, planned.plan);
  if (outcome != Outcome::success) return outcome;
  ctx.last_grasp = planned.grasp;
  ctx.last_grasp_object = *task.object;
  return Outcome::success;
}

Outcome exec_transit(TrialContext& ctx, const GroundedExecution& grounded,
                     const exec::AtomicTask& task) {
  (void)grounded;
  const auto& box = ctx.world.box.body;
  const geom::Aabb interior = box.interior_aabb();
  const Vec3 box_center = interior.center();

  motion::CollisionWorld cw = sim::build_collision_world(ctx.world, "");
  sync_attachments(cw, ctx);

  motion::LabeledCartesianPlan plan;
  const bool left_holds = !ctx.world.grippers[0].attached.empty();
  const bool right_holds = !ctx.world.grippers[1].attached.empty();
  const bool dual_hold =
      left_holds && right_holds && ctx.world.grippers[0].attached == ctx.world.grippers[1].attached;

  if (left_holds || right_holds) {
    const int g = left_holds ? 0 : 1;
    const sim::ObjectInstance* obj = ctx.world.find(ctx.world.grippers[g].attached);
    if (!obj) return Outcome::motion_failure;
    const double cap_r = motion::bounding_capsule(obj->spec.shape, obj->pose).radius;
    const Pose object_target(obj->pose.rotation,
                             Vec3(box_center.x(), box_center.y(),
                                  box.rim_z() + 0.04 + cap_r));
    if (dual_hold) {
      const Pose tcp_r = motion::forward_kinematics(ctx.scenario->models.right,
                                                    ctx.world.arms.right);
      const Pose offset_r = compose(inverse(tcp_r), obj->pose);
      motion::Waypoint wp = motion::Waypoint::dual(
          compose(object_target, inverse(obj->grasp_offset)),
          compose(object_target, inverse(offset_r)));
      wp.note = "carry";
      plan.waypoints.push_back(wp);
    } else {
      const ArmSide side = g == 0 ? ArmSide::left : ArmSide::right;
      motion::Waypoint wp = motion::Waypoint::single(
          side, compose(object_target, inverse(obj->grasp_offset)));
      wp.note = "carry";
      plan.waypoints.push_back(wp);
    }
  } else if (task.object) {
    // Nothing attached (e.g. a silently failed grasp): stage above the box so
    // the pipeline continues and verification logic catches the miss.
    const ArmSide side = ArmSide::right;
    motion::Waypoint wp = motion::Waypoint::single(
        side, manip::top_grasp_pose(Vec3(box_center.x(), box_center.y(), box.rim_z() + 0.18), 0.0));
    wp.note = "stage";
    plan.waypoints.push_back(wp);
  } else {
    // Seal-branch transit: both arms stage above the box sides.
    motion::Waypoint wp = motion::Waypoint::dual(
        manip::top_grasp_pose(Vec3(box_center.x(), box_center.y() + 0.12, box.rim_z() + 0.16), 0.0),
        manip::top_grasp_pose(Vec3(box_center.x(), box_center.y() - 0.12, box.rim_z() + 0.16), 0.0));
    wp.note = "stage";
    plan.waypoints.push_back(wp);
  }
  return run_mapping(ctx, cw, plan);
}

Outcome exec_place(TrialContext& ctx, const GroundedExecution& grounded,
                   const exec::AtomicTask& task) {
  if (!task.object) return Outcome::motion_failure;
  const auto& object = ctx.scenario->graph.objects.at(*task.object);
  (void)grounded;

  const bool left_holds = !ctx.world.grippers[0].attached.empty();
  const bool right_holds = !ctx.world.grippers[1].attached.empty();
  if (!left_holds && !right_holds) return Outcome::motion_failure;
  const int g = left_holds ? 0 : 1;
  const sim::ObjectInstance* obj = ctx.world.find(ctx.world.grippers[g].attached);
  if (!obj) return Outcome::motion_failure;

  manip::GraspSpec grasp = ctx.last_grasp.value_or(manip::GraspSpec{});
  if (!ctx.last_grasp) {
    grasp.mode = manip::GraspSpec::Mode::single;
    grasp.arm = g == 0 ? ArmSide::left : ArmSide::right;
  }

  std::optional<Pose> offset_right;
  const bool dual_hold =
      left_holds && right_holds && ctx.world.grippers[0].attached == ctx.world.grippers[1].attached;
  if (dual_hold) {
    const Pose tcp_r =
        motion::forward_kinematics(ctx.scenario->models.right, ctx.world.arms.right);
    offset_right = compose(inverse(tcp_r), obj->pose);
    grasp.mode = manip::GraspSpec::Mode::dual;
  } else if (grasp.mode == manip::GraspSpec::Mode::single) {
    grasp.arm = g == 0 ? ArmSide::left : ArmSide::right;
  }

  const auto planned =
      manip::plan_place(object, grasp, obj->pose, obj->grasp_offset, offset_right,
                        ctx.world.box.body, ctx.placed, ctx.scenario->params.place);
  if (planned.status != manip::PlacePlanStatus::ok) return Outcome::motion_failure;

  motion::CollisionWorld cw = sim::build_collision_world(ctx.world, "");
  sync_attachments(cw, ctx);
  // Descending into the box is a deliberate near-contact phase.
  for (ArmSide side : {ArmSide::left, ArmSide::right}) {
    allow_gripper_contact(cw, side, ctx.world.box.body.name + ":*");
    allow_gripper_contact(cw, side, "placed:*");
  }

  const Outcome outcome = run_mapping(ctx, cw, planned.plan);
  if (outcome != Outcome::success) return outcome;
  ctx.placed.push_back(planned.footprint);
  return Outcome::success;
}

Outcome exec_stir(TrialContext& ctx, const GroundedExecution& grounded,
                  const exec::AtomicTask& task) {
  const auto& bin = task.object ? object_bin(ctx, *task.object) : ctx.world.bins.front();
  std::size_t bin_index = 0;
  for (std::size_t i = 0; i < ctx.world.bins.size(); ++i)
    if (ctx.world.bins[i].name == bin.name) bin_index = i;

  motion::CollisionWorld cw = sim::build_collision_world(ctx.world, "");
  sync_attachments(cw, ctx);
  const ArmSide side = binding_arm(grounded);
  allow_gripper_contact(cw, side, bin.name + ":*");
  allow_gripper_contact(cw, side, "obj:*");

  const auto plan = manip::plan_stir(bin, side);
  const MappedRun run = run_mapping_detailed(ctx, cw, plan);
  if (run.outcome != Outcome::success) return Outcome::motion_failure;

  // Sweep contact perturbs the bin contents; a degenerate stir that skipped
  // every sweep leaves the world unchanged.
  const bool swept = run.skipped.size() < 2;
  if (swept) sim::perturb_bin(ctx.world, bin_index, ctx.rng.next_u64());
  return Outcome::success;
}

Outcome exec_pack_seal(TrialContext& ctx, const GroundedExecution& grounded,
                       const exec::AtomicTask& task) {
  (void)grounded;
  (void)task;
  motion::CollisionWorld cw = sim::build_collision_world(ctx.world, "");
  sync_attachments(cw, ctx);
  for (ArmSide side : {ArmSide::left, ArmSide::right})
    allow_gripper_contact(cw, side, ctx.world.box.body.name + ":*");

  const auto plan = manip::plan_pack_seal(ctx.world.box);
  return run_mapping(ctx, cw, plan);
}

Outcome exec_hold(TrialContext& ctx, const GroundedExecution& grounded,
                  const exec::AtomicTask& task) {
  (void)task;
  const auto it = grounded.parameters.find("duration");
  const double duration = std::get<double>(it->second);
  sim::apply_hold(ctx.world, motion::hold(duration));
  return Outcome::success;
}

}  // namespace

const std::map<std::string, ExecutorFn>& executor_registry() {
  static const std::map<std::string, ExecutorFn> registry = {
      {"detect_rigid", exec_detect_rigid},
      {"detect_deformable", exec_detect_deformable},
      {"detect_pick", exec_detect_pick},
      {"pick_center", exec_pick},
      {"pick_cylinder", exec_pick},
      {"pick_dual_corner", exec_pick},
      {"pick_edge", exec_pick},
      {"pick_bowl", exec_pick},
      {"place_first_fit", exec_place},
      {"place_dual", exec_place},
      {"transit_carry", exec_transit},
      {"stir_bin", exec_stir},
      {"pack_seal", exec_pack_seal},
      {"hold", exec_hold},
  };
  return registry;
}

Outcome execute_grounded(TrialContext& ctx, const GroundedExecution& grounded,
                         const exec::AtomicTask& task) {
  const auto& registry = executor_registry();
  auto it = registry.find(grounded.binding.executor_name);
  if (it == registry.end())
    throw std::runtime_error("no implementation registered for executor '" +
                             grounded.binding.executor_name + "'");
  return it->second(ctx, grounded, task);
}

}  // namespace packbot::harness
