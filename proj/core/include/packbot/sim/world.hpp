#pragma once

#include "packbot/geometry/shapes.hpp"
#include "packbot/motion/collision.hpp"
#include "packbot/motion/waypoints.hpp"
#include "packbot/skills/types.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace packbot::sim {

class SimError : public std::runtime_error {
 public:
  enum class Code { ScenarioInfeasible, DesyncError };
  SimError(Code code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

/// Sensor/actuation noise knobs. All probabilities in [0, 1]; zero everywhere
/// makes the world fully deterministic given geometry.
struct NoiseProfile {
  double depth_sigma = 0.0;       // meters, additive along the viewing ray
  double dropout = 0.0;           // fraction of points dropped
  double miss_rate = 0.0;         // probability an instance is missed entirely
  double slip_probability = 0.0;  // per-lift drop chance for slippery objects
  double pose_jitter_rad = 0.0;   // grasp execution jitter, rotation
  double pose_jitter_m = 0.0;     // grasp execution jitter, translation

  bool valid() const;
};

enum class ObjectStatus { in_bin, grasped, in_box, dropped };

std::string to_string(ObjectStatus s);

struct ObjectInstance {
  std::string id;  // "<name>_<k>"
  skills::ObjectSpec spec;
  geom::Pose pose;
  ObjectStatus status = ObjectStatus::in_bin;
  int grasped_by = -1;       // 0 = left, 1 = right
  geom::Pose grasp_offset;   // object pose in the TCP frame while grasped
  bool slip_pending = false; // will slip off during the next lift
  double grasp_tcp_z = 0.0;  // TCP height at attach time, for slip detection
  int home_bin = 0;
};

/// Open-top storage bin: a floor slab and four walls. `pose` locates the
/// center of the interior floor surface; bins are axis-aligned.
struct BinGeometry {
  std::string name;
  geom::Vec3 floor_center = geom::Vec3::Zero();
  geom::Vec3 interior = geom::Vec3(0.30, 0.40, 0.15);  // x span, y span, wall height
  double wall_thickness = 0.012;

  geom::Aabb interior_aabb() const;
  double rim_z() const { return floor_center.z() + interior.z(); }
  /// Floor plus four wall boxes, world frame; used for collision, occlusion
  /// and bin-cloud synthesis.
  std::vector<std::pair<std::string, geom::Aabb>> solid_parts() const;
};

/// The shipping box: a bin body plus four lid flaps, indexed +x, -x, +y, -y.
struct PackingBox {
  BinGeometry body;
  std::array<bool, 4> flap_closed{false, false, false, false};

  bool sealed() const {
    return flap_closed[0] && flap_closed[1] && flap_closed[2] && flap_closed[3];
  }
  /// Where a closing push must land for flap i (above the rim edge midpoint).
  geom::Vec3 flap_push_point(int flap) const;
  /// Standoff above the open flap's outer edge, for the approach waypoint.
  geom::Vec3 flap_approach_point(int flap) const;
};

struct GripperState {
  double opening = 0.08;
  double max_opening = 0.08;
  std::string attached;  // instance id, empty when free
};

/// Deterministic kinematic ground truth for one trial. No dynamics: objects
/// are either resting, rigidly attached to a gripper, or teleported to the
/// surface below on release.
struct WorldState {
  std::vector<ObjectInstance> objects;
  std::vector<BinGeometry> bins;
  PackingBox box;
  motion::DualConfig arms;
  std::array<GripperState, 2> grippers;
  NoiseProfile noise;  // actuation part (slip, grasp jitter) read by sim ops
  double table_z = 0.0;
  double clock = 0.0;
  std::mt19937_64 rng_engine{0};

  ObjectInstance* find(const std::string& id);
  const ObjectInstance* find(const std::string& id) const;
};

enum class InitialOrientation { upright, lying, yawed };

struct SceneObject {
  skills::ObjectSpec spec;
  int count = 1;
  int bin = 0;
  InitialOrientation orientation = InitialOrientation::upright;
  std::string stack_on;  // instance id to stack onto (applies to the first copy)
};

/// Everything reset() needs to build a world; the harness scenario wraps this
/// plus noise and file references.
struct SceneSetup {
  std::vector<BinGeometry> bins;
  BinGeometry box_body;
  std::vector<SceneObject> objects;
  NoiseProfile noise;
  double table_z = 0.0;
  double gripper_max_opening = 0.08;
};

/// Deterministic initial world: seeded non-overlapping scatter into bins,
/// arms at home, flaps open, clock zero. Throws ScenarioInfeasible when the
/// objects cannot fit.
WorldState reset(const SceneSetup& scene, const motion::DualArmModel& models, std::uint64_t seed);

struct GraspOutcome {
  bool success = false;
  std::string instance;  // attached instance id (also set for slip-doomed grasps)
  bool slipped = false;
  std::string reason;  // "attached", "nothing_in_reach", "too_wide", "slip"
};

/// Geometric grasp model at the current TCP: an object is attached when its
/// cross-section fits the gripper, its graspable feature (centroid, axis
/// point, edge, or surface for two-arm categories) lies within pick_radius of
/// the grasp center, and the slip lottery passes for slippery objects.
GraspOutcome attempt_grasp(WorldState& world, const motion::DualArmModel& models,
                           motion::ArmSide arm, double close_width, double pick_radius = 0.04);

/// Advance the arms through a planned path: attached objects track their
/// grippers rigidly, the clock accrues 1 s per radian of composite motion,
/// gripper events fire at their configs, and seal pushes flip flaps. Throws
/// DesyncError when the path does not start at the current configuration.
void apply_path(WorldState& world, const motion::DualArmModel& models,
                const motion::JointPath& path, double pick_radius = 0.04);

/// Open a gripper: the held object settles on whatever is below the release
/// point and its status becomes in_box / in_bin / dropped by landing zone.
void release(WorldState& world, const motion::DualArmModel& models, motion::ArmSide arm);

/// Bounded random planar displacement (<= 3 cm) and yaw (<= 30 deg) for every
/// object in the bin, rejection-sampled to stay inside, then re-settled so
/// stacks break apart or re-form consistently.
void perturb_bin(WorldState& world, std::size_t bin_index, std::uint64_t seed);

void apply_hold(WorldState& world, const motion::HoldCommand& cmd);

/// FNV-1a over the canonical serialization (documented field order,
/// fixed-width IEEE-754 encoding). Equal hashes == equal worlds for all
/// regression purposes.
std::uint64_t state_hash(const WorldState& world);

/// Collision world for planning: table, bins, packing box and, optionally,
/// every object except `exclude_instance` (the manipulation target).
motion::CollisionWorld build_collision_world(const WorldState& world,
                                             const std::string& exclude_instance = "",
                                             bool include_objects = true);

}  // namespace packbot::sim
