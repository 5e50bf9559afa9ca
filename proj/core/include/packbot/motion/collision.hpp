#pragma once

#include "packbot/geometry/shapes.hpp"
#include "packbot/motion/arm_model.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace packbot::motion {

struct Capsule {
  geom::Vec3 p0 = geom::Vec3::Zero();
  geom::Vec3 p1 = geom::Vec3::Zero();
  double radius = 0.0;
};

struct OrientedBox {
  geom::Pose pose;
  geom::Vec3 half = geom::Vec3::Zero();
};

using CollisionGeom = std::variant<Capsule, OrientedBox>;

/// Surface-to-surface distance (negative when penetrating is not computed;
/// contact and penetration both return 0 for box queries, <= 0 for capsules).
double distance(const CollisionGeom& a, const CollisionGeom& b);

double segment_segment_distance(const geom::Vec3& p1, const geom::Vec3& q1, const geom::Vec3& p2,
                                const geom::Vec3& q2);
double point_box_distance(const OrientedBox& box, const geom::Vec3& p);
double segment_box_distance(const OrientedBox& box, const geom::Vec3& p0, const geom::Vec3& p1);

/// Conservative capsule hull: exact for spheres/cylinders/cones (up to end
/// caps), circumscribed for boxes.
Capsule bounding_capsule(const geom::ShapePrimitive& s, const geom::Pose& pose);

CollisionGeom collision_geom_for(const geom::ShapePrimitive& s, const geom::Pose& pose);

struct Obstacle {
  std::string name;
  CollisionGeom geom;
};

struct AttachedObject {
  geom::ShapePrimitive shape;
  geom::Pose grasp_offset;  // object pose in the TCP frame
  bool dual = false;        // held by both arms; skip checks against either arm's links
};

/// Static obstacles plus per-arm attachments. `allowed_pairs` suppresses
/// specific body/obstacle checks (obstacle side supports a trailing '*'),
/// mirroring an allowed-collision matrix for deliberate contact phases.
struct CollisionWorld {
  std::vector<Obstacle> obstacles;
  std::optional<AttachedObject> attached_left;
  std::optional<AttachedObject> attached_right;
  std::vector<std::pair<std::string, std::string>> allowed_pairs;
  double clearance = 0.005;

  void add_box_obstacle(const std::string& name, const geom::Aabb& box);
  void add_shape_obstacle(const std::string& name, const geom::ShapePrimitive& s,
                          const geom::Pose& pose);
  void allow(const std::string& body, const std::string& obstacle_pattern);
};

struct CollisionPair {
  std::string body_a;
  std::string body_b;
  double distance = 0.0;
};

struct CollisionReport {
  bool colliding = false;
  double min_distance = std::numeric_limits<double>::infinity();
  std::vector<CollisionPair> pairs;  // pairs closer than the margin
};

/// Named world-frame collision bodies of one arm at configuration q,
/// including the attachment when present.
std::vector<std::pair<std::string, CollisionGeom>> arm_bodies(
    const ArmModel& arm, const JointVector& q, const std::string& prefix,
    const std::optional<AttachedObject>& attached);

/// All colliding pairs among {left links, right links, attachments} x
/// {obstacles, other arm} at margin `margin` (clearance when negative).
CollisionReport check_collision(const CollisionWorld& world, const DualArmModel& models,
                                const DualConfig& c, double margin = -1.0);

/// Fast predicate used by the planner.
bool in_collision(const CollisionWorld& world, const DualArmModel& models, const DualConfig& c,
                  double margin = -1.0);

/// True when a free-floating body clears every obstacle (honoring allowed
/// pairs) by the margin. Used for pose-level grasp screening.
bool body_clear(const CollisionWorld& world, const std::string& body_name,
                const CollisionGeom& geom, double margin = -1.0);

}  // namespace packbot::motion
