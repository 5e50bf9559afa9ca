#include "packbot/manip/grasp_templates.hpp"

#include <algorithm>
#include <cmath>

namespace packbot::manip {

using geom::Mat3;
using geom::Pose;
using geom::Vec3;
using motion::ArmSide;
using motion::GripperMove;
using motion::LabeledCartesianPlan;
using motion::Waypoint;
using motion::WaypointLabel;
using skills::ObjectCategory;

geom::Pose top_grasp_pose(const Vec3& position, double closing_yaw) {
  Mat3 r;
  r.col(0) = Vec3(0, 0, -1);                                            // approach
  r.col(1) = Vec3(std::cos(closing_yaw), std::sin(closing_yaw), 0.0);   // closing
  r.col(2) = r.col(0).cross(r.col(1));
  return Pose::from_matrix(r, position);
}

namespace {

Pose grasp_pose_from_axes(const Vec3& position, const Vec3& approach, const Vec3& closing) {
  Mat3 r;
  r.col(0) = approach.normalized();
  r.col(1) = (closing - closing.dot(r.col(0)) * r.col(0)).normalized();
  r.col(2) = r.col(0).cross(r.col(1));
  return Pose::from_matrix(r, position);
}

// Pose-level screen: would the open gripper standing at this TCP hit the
// scene? Fingers span the opening along the closing axis; the palm trails
// along the negative approach.
bool gripper_pose_clear(const motion::CollisionWorld& world, const Pose& tcp,
                        const skills::ToolSpec& tool) {
  const Vec3 approach = tcp.matrix().col(0);
  const Vec3 closing = tcp.matrix().col(1);
  const double half_span = 0.5 * tool.max_opening + 0.012;
  motion::Capsule fingers{tcp.translation - half_span * closing,
                          tcp.translation + half_span * closing, 0.011};
  motion::Capsule palm{tcp.translation - 0.10 * approach, tcp.translation - 0.03 * approach,
                       0.023};
  return motion::body_clear(world, "gripper", fingers) &&
         motion::body_clear(world, "gripper", palm);
}

double clamped_close_width(double cross_section, const skills::ToolSpec& tool,
                           const PickParams& params) {
  return std::max(0.002, std::min(cross_section - params.close_margin,
                                  tool.max_opening - 0.002));
}

void push_single_pick_waypoints(LabeledCartesianPlan& plan, ArmSide arm, const Pose& grasp,
                                const GraspSpec& spec, const skills::ObjectSpec& object,
                                const Pose& expected_object_pose) {
  const Vec3 approach = grasp.matrix().col(0);
  Waypoint pregrasp = Waypoint::single(
      arm, Pose(grasp.rotation, grasp.translation - spec.pregrasp_offset * approach));
  pregrasp.note = "pregrasp";
  plan.waypoints.push_back(pregrasp);

  Waypoint approach_wp = Waypoint::single(arm, grasp);
  approach_wp.gripper = {GripperMove::open, 0.0};
  approach_wp.note = "approach";
  plan.waypoints.push_back(approach_wp);

  Waypoint grasp_wp = Waypoint::single(arm, grasp);
  grasp_wp.gripper = {GripperMove::close, spec.close_width};
  grasp_wp.attach_on_close = motion::AttachmentHint{
      object.shape, compose(inverse(grasp), expected_object_pose), false};
  grasp_wp.note = "grasp";
  plan.waypoints.push_back(grasp_wp);

  Waypoint lift = Waypoint::single(
      arm, Pose(grasp.rotation, grasp.translation + Vec3(0, 0, spec.lift_height)));
  lift.note = "lift";
  plan.waypoints.push_back(lift);
}

void push_dual_pick_waypoints(LabeledCartesianPlan& plan, const Pose& left, const Pose& right,
                              const GraspSpec& spec, const skills::ObjectSpec& object,
                              const Pose& expected_object_pose) {
  auto offset_pose = [](const Pose& p, const Vec3& d) { return Pose(p.rotation, p.translation + d); };
  const Vec3 back_l = -spec.pregrasp_offset * left.matrix().col(0);
  const Vec3 back_r = -spec.pregrasp_offset * right.matrix().col(0);

  Waypoint pregrasp = Waypoint::dual(offset_pose(left, back_l), offset_pose(right, back_r));
  pregrasp.note = "pregrasp";
  plan.waypoints.push_back(pregrasp);

  Waypoint approach_wp = Waypoint::dual(left, right);
  approach_wp.gripper = {GripperMove::open, 0.0};
  approach_wp.note = "approach";
  plan.waypoints.push_back(approach_wp);

  Waypoint grasp_wp = Waypoint::dual(left, right);
  grasp_wp.gripper = {GripperMove::close, spec.close_width};
  grasp_wp.attach_on_close = motion::AttachmentHint{
      object.shape, compose(inverse(left), expected_object_pose), true};
  grasp_wp.note = "grasp";
  plan.waypoints.push_back(grasp_wp);

  const Vec3 up(0, 0, spec.lift_height);
  Waypoint lift = Waypoint::dual(offset_pose(left, up), offset_pose(right, up));
  lift.note = "lift";
  plan.waypoints.push_back(lift);
}

double world_half_height(const skills::ObjectSpec& object, const Pose& pose) {
  const geom::Aabb bb = geom::world_aabb(object.shape, pose);
  return 0.5 * (bb.max.z() - bb.min.z());
}

bool is_dual_category(ObjectCategory c) {
  return c == ObjectCategory::cuboid_large || c == ObjectCategory::cone ||
         c == ObjectCategory::flat_large || c == ObjectCategory::stacked;
}

PickPlanResult plan_center_grasp(const skills::ObjectSpec& object,
                                 const percept::PoseEstimate& estimate,
                                 const skills::ToolSpec& tool,
                                 const motion::CollisionWorld& world, const PickParams& params,
                                 ArmSide arm) {
  PickPlanResult result;
  const Vec3 center = estimate.pose.translation;
  const double half_h = world_half_height(object, estimate.pose);
  const double tcp_z = center.z() + std::max(0.0, half_h - 0.035);

  bool any_width_fit = false;
  for (int k = 0; k < params.wrist_orientations; ++k) {
    const double yaw = k * (2.0 * M_PI / params.wrist_orientations);
    const Pose grasp = top_grasp_pose(Vec3(center.x(), center.y(), tcp_z), yaw);
    const Vec3 closing = grasp.matrix().col(1);
    const double width = geom::support_width(object.shape, estimate.pose, closing);
    if (width > tool.max_opening) continue;
    any_width_fit = true;
    const Pose pregrasp(grasp.rotation,
                        grasp.translation + Vec3(0, 0, params.pregrasp_offset));
    if (!gripper_pose_clear(world, grasp, tool) || !gripper_pose_clear(world, pregrasp, tool))
      continue;

    result.status = PickPlanStatus::ok;
    result.grasp.mode = GraspSpec::Mode::single;
    result.grasp.arm = arm;
    result.grasp.grasp = grasp;
    result.grasp.pregrasp_offset = params.pregrasp_offset;
    result.grasp.lift_height = params.lift_height;
    result.grasp.close_width = clamped_close_width(width, tool, params);
    push_single_pick_waypoints(result.plan, arm, grasp, result.grasp, object, estimate.pose);
    return result;
  }
  result.status = any_width_fit ? PickPlanStatus::no_feasible_grasp : PickPlanStatus::width_exceeded;
  return result;
}

PickPlanResult plan_cylinder_grasp(const skills::ObjectSpec& object,
                                   const percept::PoseEstimate& estimate,
                                   const skills::ToolSpec& tool,
                                   const motion::CollisionWorld& world, const PickParams& params,
                                   ArmSide arm) {
  if (estimate.upright.value_or(true))
    return plan_center_grasp(object, estimate, tool, world, params, arm);

  PickPlanResult result;
  Vec3 axis = estimate.pose.matrix().col(2);
  if (axis.z() < 0.0) axis = -axis;

  // Approach perpendicular to the longitudinal axis, as vertical as possible.
  Vec3 down = Vec3(0, 0, 1) - axis.z() * axis;
  if (down.norm() < 1e-6) return plan_center_grasp(object, estimate, tool, world, params, arm);
  const Vec3 base_approach = -down.normalized();

  const double width = 2.0 * object.shape.radius;
  if (width > tool.max_opening) {
    result.status = PickPlanStatus::width_exceeded;
    return result;
  }

  // Rotating the approach about the axis preserves perpendicularity; sweep
  // outward from vertical until the gripper clears the scene.
  const double sweep[] = {0.0, 0.26, -0.26, 0.52, -0.52, 0.79, -0.79, 1.05};
  for (double ang : sweep) {
    const Vec3 approach = (Eigen::AngleAxisd(ang, axis) * base_approach).normalized();
    const Vec3 closing = approach.cross(axis).normalized();
    const Pose grasp = grasp_pose_from_axes(estimate.pose.translation, approach, closing);
    const Pose pregrasp(grasp.rotation, grasp.translation - params.pregrasp_offset * approach);
    if (!gripper_pose_clear(world, grasp, tool) || !gripper_pose_clear(world, pregrasp, tool))
      continue;

    result.status = PickPlanStatus::ok;
    result.grasp.mode = GraspSpec::Mode::single;
    result.grasp.arm = arm;
    result.grasp.grasp = grasp;
    result.grasp.pregrasp_offset = params.pregrasp_offset;
    result.grasp.lift_height = params.lift_height;
    result.grasp.close_width = clamped_close_width(width, tool, params);
    push_single_pick_waypoints(result.plan, arm, grasp, result.grasp, object, estimate.pose);
    return result;
  }
  result.status = PickPlanStatus::no_feasible_grasp;
  return result;
}

PickPlanResult plan_dual_grasp(const skills::ObjectSpec& object,
                               const percept::PoseEstimate& estimate,
                               const skills::ToolSpec& tool, const motion::CollisionWorld& world,
                               const PickParams& params) {
  PickPlanResult result;
  const Pose& pose = estimate.pose;
  const Vec3 center = pose.translation;

  // Candidate grasp-point pairs on diagonally opposite corners / rim points.
  std::vector<std::pair<Vec3, Vec3>> pairs;
  if (geom::is_box_like(object.shape.kind)) {
    const Vec3 e = object.shape.extents;
    const double gx = 0.5 * e.x() - params.corner_inset;
    const double gy = 0.5 * e.y() - params.corner_inset;
    const double gz = 0.5 * e.z() - std::min(0.02, 0.25 * e.z());
    pairs.push_back({pose.apply(Vec3(gx, gy, gz)), pose.apply(Vec3(-gx, -gy, gz))});
    pairs.push_back({pose.apply(Vec3(gx, -gy, gz)), pose.apply(Vec3(-gx, gy, gz))});
  } else {
    Vec3 axis = pose.matrix().col(2);
    if (axis.z() < 0.0) axis = -axis;
    const bool cone = object.shape.kind == geom::ShapeKind::cone;
    // Cones are gripped at two opposed base-edge points, round bodies at
    // opposed rim points.
    const Vec3 ring_center =
        cone ? Vec3(center - 0.5 * object.shape.height * axis + 0.015 * axis)
             : Vec3(center + 0.5 * object.shape.height * axis - 0.015 * axis);
    for (int k = 0; k < 6; ++k) {
      const double ang = k * M_PI / 6.0;
      Vec3 w = axis.cross(Vec3::UnitX());
      if (w.norm() < 1e-6) w = axis.cross(Vec3::UnitY());
      w = (Eigen::AngleAxisd(ang, axis) * w.normalized()).normalized();
      pairs.push_back({ring_center + object.shape.radius * w,
                       ring_center - object.shape.radius * w});
    }
  }

  for (auto [pa, pb] : pairs) {
    Vec3 left_pt = pa, right_pt = pb;
    if (left_pt.y() < right_pt.y()) std::swap(left_pt, right_pt);
    auto corner_grasp = [&](const Vec3& pt) {
      Vec3 inward(center.x() - pt.x(), center.y() - pt.y(), 0.0);
      if (inward.norm() < 1e-9) inward = Vec3(1, 0, 0);
      return grasp_pose_from_axes(pt, Vec3(0, 0, -1), inward.normalized());
    };
    const Pose gl = corner_grasp(left_pt);
    const Pose gr = corner_grasp(right_pt);
    const Pose pl(gl.rotation, gl.translation + Vec3(0, 0, params.pregrasp_offset));
    const Pose pr(gr.rotation, gr.translation + Vec3(0, 0, params.pregrasp_offset));
    if (!gripper_pose_clear(world, gl, tool) || !gripper_pose_clear(world, gr, tool) ||
        !gripper_pose_clear(world, pl, tool) || !gripper_pose_clear(world, pr, tool))
      continue;

    result.status = PickPlanStatus::ok;
    result.grasp.mode = GraspSpec::Mode::dual;
    result.grasp.grasp_left = gl;
    result.grasp.grasp_right = gr;
    result.grasp.pregrasp_offset = params.pregrasp_offset;
    result.grasp.lift_height = params.lift_height;
    result.grasp.close_width = 0.025;
    push_dual_pick_waypoints(result.plan, gl, gr, result.grasp, object, estimate.pose);
    return result;
  }
  result.status = PickPlanStatus::no_feasible_grasp;
  return result;
}

PickPlanResult plan_edge_grasp(const skills::ObjectSpec& object,
                               const std::vector<percept::EdgeCandidate>& candidates,
                               const skills::ToolSpec& tool, const motion::CollisionWorld& world,
                               const PickParams& params, ArmSide arm) {
  PickPlanResult result;
  const double thickness = object.shape.extents.z();
  for (const auto& cand : candidates) {
    const Vec3 approach = cand.approach_direction;
    Vec3 closing = approach.cross(cand.edge_tangent);
    if (closing.norm() < 1e-9) continue;
    closing.normalize();
    if (closing.z() < 0.0) closing = -closing;
    const Vec3 point = cand.grasp_point + 0.01 * approach;  // bite into the edge
    const Pose grasp = grasp_pose_from_axes(point, approach, closing);
    const Pose pregrasp(grasp.rotation, grasp.translation - params.pregrasp_offset * approach);
    if (!gripper_pose_clear(world, grasp, tool) || !gripper_pose_clear(world, pregrasp, tool))
      continue;

    result.status = PickPlanStatus::ok;
    result.grasp.mode = GraspSpec::Mode::single;
    result.grasp.arm = arm;
    result.grasp.grasp = grasp;
    result.grasp.pregrasp_offset = params.pregrasp_offset;
    result.grasp.lift_height = params.lift_height;
    result.grasp.close_width = std::max(0.002, thickness - 0.004);
    // The expected pose for attachment: the sheet where perception saw it.
    Pose expected = Pose::from_translation(cand.grasp_point);
    push_single_pick_waypoints(result.plan, arm, grasp, result.grasp, object, expected);
    return result;
  }
  result.status = PickPlanStatus::no_feasible_grasp;
  return result;
}

}  // namespace

PickPlanResult plan_pick(const skills::ObjectSpec& object, const PerceptionInput& perception,
                         const skills::ToolSpec& tool, const motion::CollisionWorld& world,
                         const PickParams& params) {
  const ArmSide arm = ArmSide::right;  // single-arm bindings run the right arm

  if (object.rigidity == skills::Rigidity::deformable) {
    const auto* cands = std::get_if<std::vector<percept::EdgeCandidate>>(&perception);
    if (!cands || cands->empty()) return {};
    return plan_edge_grasp(object, *cands, tool, world, params, arm);
  }

  const auto* estimate = std::get_if<percept::PoseEstimate>(&perception);
  if (!estimate) return {};

  if (is_dual_category(object.category)) {
    return plan_dual_grasp(object, *estimate, tool, world, params);
  }
  if (object.category == ObjectCategory::cylinder) {
    return plan_cylinder_grasp(object, *estimate, tool, world, params, arm);
  }
  return plan_center_grasp(object, *estimate, tool, world, params, arm);
}

PlacePlanResult plan_place(const skills::ObjectSpec& object, const GraspSpec& grasp,
                           const geom::Pose& object_world_pose,
                           const geom::Pose& actual_grasp_offset_left,
                           const std::optional<geom::Pose>& actual_grasp_offset_right,
                           const sim::BinGeometry& box_body,
                           const std::vector<PlacedFootprint>& occupancy,
                           const PlaceParams& params) {
  PlacePlanResult result;
  const geom::Aabb interior = box_body.interior_aabb();
  const geom::Aabb bb = geom::world_aabb(object.shape, object_world_pose);
  const double hx = 0.5 * (bb.max.x() - bb.min.x());
  const double hy = 0.5 * (bb.max.y() - bb.min.y());
  const double hz = 0.5 * (bb.max.z() - bb.min.z());

  const double x0 = interior.min.x() + hx + 0.005;
  const double x1 = interior.max.x() - hx - 0.005;
  const double y0 = interior.min.y() + hy + 0.005;
  const double y1 = interior.max.y() - hy - 0.005;

  std::optional<Vec3> cell;
  for (double x = x0; x <= x1 + 1e-9 && !cell; x += params.grid_pitch) {
    for (double y = y0; y <= y1 + 1e-9; y += params.grid_pitch) {
      PlacedFootprint fp{x - hx - params.footprint_inflation, y - hy - params.footprint_inflation,
                         x + hx + params.footprint_inflation, y + hy + params.footprint_inflation};
      const bool clash = std::any_of(occupancy.begin(), occupancy.end(),
                                     [&](const PlacedFootprint& o) { return fp.overlaps(o); });
      if (!clash) {
        cell = Vec3(x, y, box_body.floor_center.z() + hz + 0.001);
        result.footprint = fp;
        break;
      }
    }
  }
  if (!cell) {
    result.status = PlacePlanStatus::box_full;
    return result;
  }

  result.status = PlacePlanStatus::ok;
  result.place.target_location = Pose(object_world_pose.rotation, *cell);
  result.place.release_height = params.release_height;

  const double travel_z = box_body.rim_z() + params.travel_clearance + hz;
  const Pose object_above(object_world_pose.rotation, Vec3(cell->x(), cell->y(), travel_z));
  const Pose object_down(object_world_pose.rotation,
                         *cell + Vec3(0, 0, params.release_height));

  auto tcp_for = [](const Pose& object_pose, const Pose& offset) {
    return compose(object_pose, inverse(offset));
  };

  const bool dual = grasp.mode == GraspSpec::Mode::dual && actual_grasp_offset_right.has_value();
  auto make_wp = [&](const Pose& object_pose, WaypointLabel label,
                     const std::string& note) {
    Waypoint w = dual ? Waypoint::dual(tcp_for(object_pose, actual_grasp_offset_left),
                                       tcp_for(object_pose, *actual_grasp_offset_right), label)
                      : Waypoint::single(grasp.arm, tcp_for(object_pose, actual_grasp_offset_left),
                                         label);
    w.note = note;
    return w;
  };

  result.plan.waypoints.push_back(make_wp(object_above, WaypointLabel::required, "place_above"));
  result.plan.waypoints.push_back(make_wp(object_down, WaypointLabel::required, "place_descend"));

  Waypoint release = make_wp(object_down, WaypointLabel::required, "release");
  release.gripper = {GripperMove::open, 0.0};
  release.detach_on_open = true;
  result.plan.waypoints.push_back(release);

  const Pose object_retreat(object_world_pose.rotation,
                            Vec3(cell->x(), cell->y(), travel_z + 0.06));
  Waypoint retreat = make_wp(object_retreat, WaypointLabel::optional, "retreat");
  result.plan.waypoints.push_back(retreat);
  return result;
}

LabeledCartesianPlan plan_stir(const sim::BinGeometry& bin, ArmSide arm) {
  LabeledCartesianPlan plan;
  const geom::Aabb interior = bin.interior_aabb();
  const Vec3 center = interior.center();
  const double z_in = bin.floor_center.z() + 0.07;

  Waypoint descend =
      Waypoint::single(arm, top_grasp_pose(Vec3(center.x(), center.y(), z_in), 0.0));
  descend.note = "stir_descend";
  plan.waypoints.push_back(descend);

  const double dx = 0.30 * bin.interior.x();
  Waypoint sweep1 = Waypoint::single(
      arm, top_grasp_pose(Vec3(center.x() + dx, center.y(), z_in), 0.0), WaypointLabel::optional);
  sweep1.note = "stir_sweep";
  plan.waypoints.push_back(sweep1);
  Waypoint sweep2 = Waypoint::single(
      arm, top_grasp_pose(Vec3(center.x() - dx, center.y(), z_in), 0.0), WaypointLabel::optional);
  sweep2.note = "stir_sweep";
  plan.waypoints.push_back(sweep2);

  Waypoint retract = Waypoint::single(
      arm, top_grasp_pose(Vec3(center.x(), center.y(), bin.rim_z() + 0.12), 0.0));
  retract.note = "stir_retract";
  plan.waypoints.push_back(retract);
  return plan;
}

LabeledCartesianPlan plan_pack_seal(const sim::PackingBox& box) {
  LabeledCartesianPlan plan;
  // Opposing pairs: +y/-y first, then +x/-x. The y flaps are split between
  // the arms; the x flaps likewise.
  const int order[4] = {2, 3, 0, 1};
  for (int k = 0; k < 4; ++k) {
    const int flap = order[k];
    const ArmSide arm = (flap == 2 || flap == 0) ? ArmSide::left : ArmSide::right;
    const double hinge_yaw = flap < 2 ? M_PI / 2.0 : 0.0;

    Waypoint approach =
        Waypoint::single(arm, top_grasp_pose(box.flap_approach_point(flap), hinge_yaw));
    approach.note = "seal_approach:" + std::to_string(flap);
    plan.waypoints.push_back(approach);

    Waypoint push = Waypoint::single(arm, top_grasp_pose(box.flap_push_point(flap), hinge_yaw));
    push.note = "push_flap:" + std::to_string(flap);
    plan.waypoints.push_back(push);
  }
  return plan;
}

}  // namespace packbot::manip
