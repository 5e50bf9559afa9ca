#pragma once

#include "packbot/motion/collision.hpp"
#include "packbot/motion/waypoints.hpp"
#include "packbot/perception/detectors.hpp"
#include "packbot/sim/world.hpp"
#include "packbot/skills/types.hpp"

#include <optional>
#include <variant>
#include <vector>

namespace packbot::manip {

/// Resolved grasp geometry for one pick. Dual grasps carry one pose per arm.
struct GraspSpec {
  enum class Mode { single, dual };
  Mode mode = Mode::single;
  motion::ArmSide arm = motion::ArmSide::right;  // single mode
  geom::Pose grasp;                              // single mode
  geom::Pose grasp_left, grasp_right;            // dual mode
  double pregrasp_offset = 0.08;
  double close_width = 0.02;
  double lift_height = 0.10;
};

struct PickParams {
  int wrist_orientations = 8;     // candidate rotations at 45 degree steps
  double pregrasp_offset = 0.08;  // meters along the approach
  double lift_height = 0.10;
  double close_margin = 0.004;    // close this far under the cross-section
  double corner_inset = 0.015;    // dual grasp pull-in from the corner
};

/// Perception output feeding a pick: a pose estimate for modeled objects or
/// the ranked edge candidates for deformable ones.
using PerceptionInput = std::variant<percept::PoseEstimate, std::vector<percept::EdgeCandidate>>;

enum class PickPlanStatus { ok, no_feasible_grasp, width_exceeded };

struct PickPlanResult {
  PickPlanStatus status = PickPlanStatus::no_feasible_grasp;
  GraspSpec grasp;
  motion::LabeledCartesianPlan plan;
};

/// Object-conditioned pick template:
///   - small rigid / cube / sphere / small precise: center top grasp, wrist
///     rotations tried at 45 degree steps until one clears the scene;
///   - cylinder: top grasp when upright, otherwise approach orthogonal to the
///     longitudinal axis at mid-height;
///   - cuboid_large / cone / flat_large / stacked: two-arm grasp at diagonally
///     opposite corners (rim points for round shapes);
///   - deformable: the best-ranked edge candidate.
/// The emitted plan is [pregrasp, approach(open), grasp(close), lift], all
/// required.
PickPlanResult plan_pick(const skills::ObjectSpec& object, const PerceptionInput& perception,
                         const skills::ToolSpec& tool, const motion::CollisionWorld& world,
                         const PickParams& params = {});

struct PlaceSpec {
  geom::Pose target_location;  // object pose inside the packing box
  double release_height = 0.02;
};

struct PlacedFootprint {
  double xmin = 0, ymin = 0, xmax = 0, ymax = 0;
  bool overlaps(const PlacedFootprint& o) const {
    return xmin <= o.xmax && xmax >= o.xmin && ymin <= o.ymax && ymax >= o.ymin;
  }
};

struct PlaceParams {
  double grid_pitch = 0.02;
  double footprint_inflation = 0.01;
  double release_height = 0.02;
  double travel_clearance = 0.06;  // object bottom above the rim while moving in
};

enum class PlacePlanStatus { ok, box_full };

struct PlacePlanResult {
  PlacePlanStatus status = PlacePlanStatus::box_full;
  PlaceSpec place;
  PlacedFootprint footprint;  // inflated footprint to record on success
  motion::LabeledCartesianPlan plan;
};

/// First-fit placement over a grid of the box floor, avoiding recorded
/// footprints inflated by 1 cm. Plan: above-target, descend, release, retreat
/// (retreat optional). The object's current world pose (attached) and the
/// actual grasp offset drive the TCP targets.
PlacePlanResult plan_place(const skills::ObjectSpec& object, const GraspSpec& grasp,
                           const geom::Pose& object_world_pose,
                           const geom::Pose& actual_grasp_offset_left,
                           const std::optional<geom::Pose>& actual_grasp_offset_right,
                           const sim::BinGeometry& box_body,
                           const std::vector<PlacedFootprint>& occupancy,
                           const PlaceParams& params = {});

/// Scripted stir: descend to the bin center, two optional horizontal sweeps,
/// retract. Sweeps are optional by construction, so an edge-of-workspace bin
/// degrades to a touch-and-retract stir instead of failing.
motion::LabeledCartesianPlan plan_stir(const sim::BinGeometry& bin, motion::ArmSide arm);

/// Scripted seal sequence: flaps closed in opposing pairs, one approach and
/// one push waypoint per flap, all required. Push waypoints carry
/// "push_flap:<i>" notes the simulator turns into flap state flips.
motion::LabeledCartesianPlan plan_pack_seal(const sim::PackingBox& box);

/// Top-grasp TCP orientation: approach along -Z, fingers closing along the
/// given horizontal direction.
geom::Pose top_grasp_pose(const geom::Vec3& position, double closing_yaw);

}  // namespace packbot::manip
