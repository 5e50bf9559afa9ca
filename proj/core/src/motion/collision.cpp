#include "packbot/motion/collision.hpp"

#include "packbot/motion/kinematics.hpp"

#include <algorithm>
#include <cmath>

namespace packbot::motion {

using geom::Vec3;

double segment_segment_distance(const Vec3& p1, const Vec3& q1, const Vec3& p2, const Vec3& q2) {
  // Closest points between two segments (Ericson, Real-Time Collision
  // Detection, 5.1.9).
  const Vec3 d1 = q1 - p1;
  const Vec3 d2 = q2 - p2;
  const Vec3 r = p1 - p2;
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double f = d2.dot(r);
  double s = 0.0, t = 0.0;
  constexpr double kEps = 1e-14;

  if (a <= kEps && e <= kEps) return r.norm();
  if (a <= kEps) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= kEps) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      s = denom > kEps ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return ((p1 + s * d1) - (p2 + t * d2)).norm();
}

double point_box_distance(const OrientedBox& box, const Vec3& p) {
  const Vec3 local = inverse(box.pose).apply(p);
  const Vec3 clamped = local.cwiseMax(-box.half).cwiseMin(box.half);
  return (local - clamped).norm();
}

double segment_box_distance(const OrientedBox& box, const Vec3& p0, const Vec3& p1) {
  // Distance from a point on the segment to the box is convex in the segment
  // parameter, so ternary search converges to the minimum.
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 48; ++i) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    const double d1 = point_box_distance(box, p0 + m1 * (p1 - p0));
    const double d2 = point_box_distance(box, p0 + m2 * (p1 - p0));
    if (d1 < d2)
      hi = m2;
    else
      lo = m1;
  }
  const double dm = point_box_distance(box, p0 + 0.5 * (lo + hi) * (p1 - p0));
  const double d0 = point_box_distance(box, p0);
  const double d1 = point_box_distance(box, p1);
  return std::min({dm, d0, d1});
}

double distance(const CollisionGeom& a, const CollisionGeom& b) {
  if (std::holds_alternative<Capsule>(a) && std::holds_alternative<Capsule>(b)) {
    const auto& ca = std::get<Capsule>(a);
    const auto& cb = std::get<Capsule>(b);
    return segment_segment_distance(ca.p0, ca.p1, cb.p0, cb.p1) - ca.radius - cb.radius;
  }
  if (std::holds_alternative<Capsule>(a) && std::holds_alternative<OrientedBox>(b)) {
    const auto& ca = std::get<Capsule>(a);
    return segment_box_distance(std::get<OrientedBox>(b), ca.p0, ca.p1) - ca.radius;
  }
  if (std::holds_alternative<OrientedBox>(a) && std::holds_alternative<Capsule>(b)) {
    return distance(b, a);
  }
  // Box-box never occurs between moving bodies; every moving body is a
  // capsule. Fall back to a conservative capsule hull of the first box.
  const auto& ba = std::get<OrientedBox>(a);
  Capsule hull;
  int longest = 0;
  ba.half.maxCoeff(&longest);
  Vec3 axis = Vec3::Zero();
  axis[longest] = ba.half[longest];
  hull.p0 = ba.pose.apply(-axis);
  hull.p1 = ba.pose.apply(axis);
  Vec3 cross = ba.half;
  cross[longest] = 0.0;
  hull.radius = cross.norm();
  return distance(CollisionGeom(hull), b);
}

Capsule bounding_capsule(const geom::ShapePrimitive& s, const geom::Pose& pose) {
  using geom::ShapeKind;
  Capsule c;
  switch (s.kind) {
    case ShapeKind::sphere:
      c.p0 = c.p1 = pose.translation;
      c.radius = s.radius;
      break;
    case ShapeKind::cylinder:
    case ShapeKind::cone: {
      const Vec3 axis = pose.matrix().col(2);
      c.p0 = pose.translation - 0.5 * s.height * axis;
      c.p1 = pose.translation + 0.5 * s.height * axis;
      c.radius = s.radius;
      break;
    }
    case ShapeKind::box:
    case ShapeKind::flat_slab:
    case ShapeKind::deformable_sheet: {
      int longest = 0;
      s.extents.maxCoeff(&longest);
      Vec3 axis = Vec3::Zero();
      axis[longest] = 0.5 * s.extents[longest];
      c.p0 = pose.apply(-axis);
      c.p1 = pose.apply(axis);
      Vec3 cross = 0.5 * s.extents;
      cross[longest] = 0.0;
      c.radius = cross.norm();
      break;
    }
  }
  return c;
}

CollisionGeom collision_geom_for(const geom::ShapePrimitive& s, const geom::Pose& pose) {
  if (geom::is_box_like(s.kind)) return OrientedBox{pose, 0.5 * s.extents};
  return bounding_capsule(s, pose);
}

void CollisionWorld::add_box_obstacle(const std::string& name, const geom::Aabb& box) {
  obstacles.push_back(
      {name, OrientedBox{geom::Pose::from_translation(box.center()), 0.5 * box.size()}});
}

void CollisionWorld::add_shape_obstacle(const std::string& name, const geom::ShapePrimitive& s,
                                        const geom::Pose& pose) {
  obstacles.push_back({name, collision_geom_for(s, pose)});
}

void CollisionWorld::allow(const std::string& body, const std::string& obstacle_pattern) {
  allowed_pairs.emplace_back(body, obstacle_pattern);
}

namespace {

bool pattern_matches(const std::string& pattern, const std::string& name) {
  if (!pattern.empty() && pattern.back() == '*')
    return name.compare(0, pattern.size() - 1, pattern, 0, pattern.size() - 1) == 0;
  return pattern == name;
}

bool pair_allowed(const CollisionWorld& world, const std::string& body,
                  const std::string& obstacle) {
  for (const auto& [b, o] : world.allowed_pairs) {
    if (pattern_matches(b, body) && pattern_matches(o, obstacle)) return true;
  }
  return false;
}

Capsule transform_capsule(const geom::Pose& pose, const LinkCapsule& link) {
  return {pose.apply(link.p0), pose.apply(link.p1), link.radius};
}

}  // namespace

std::vector<std::pair<std::string, CollisionGeom>> arm_bodies(
    const ArmModel& arm, const JointVector& q, const std::string& prefix,
    const std::optional<AttachedObject>& attached) {
  const FkResult fk = forward_kinematics_full(arm, q);
  std::vector<std::pair<std::string, CollisionGeom>> bodies;
  bodies.reserve(arm.links.size() + 1);
  for (const LinkCapsule& link : arm.links) {
    const geom::Pose& frame = fk.joint_frames[static_cast<std::size_t>(link.joint_index)];
    bodies.emplace_back(prefix + ":" + link.name, transform_capsule(frame, link));
  }
  if (attached) {
    const geom::Pose obj_pose = compose(fk.tcp, attached->grasp_offset);
    bodies.emplace_back(prefix + ":attached", CollisionGeom(bounding_capsule(attached->shape, obj_pose)));
  }
  return bodies;
}

CollisionReport check_collision(const CollisionWorld& world, const DualArmModel& models,
                                const DualConfig& c, double margin) {
  const double m = margin >= 0.0 ? margin : world.clearance;
  CollisionReport report;

  const auto left = arm_bodies(models.left, c.left, "left", world.attached_left);
  const auto right = arm_bodies(models.right, c.right, "right", world.attached_right);

  auto consider = [&](const std::string& a, const CollisionGeom& ga, const std::string& b,
                      const CollisionGeom& gb) {
    if (pair_allowed(world, a, b) || pair_allowed(world, b, a)) return;
    const double d = distance(ga, gb);
    report.min_distance = std::min(report.min_distance, d);
    if (d < m) {
      report.colliding = true;
      report.pairs.push_back({a, b, d});
    }
  };

  for (const auto& [name, body] : left)
    for (const Obstacle& obs : world.obstacles) consider(name, body, obs.name, obs.geom);
  for (const auto& [name, body] : right)
    for (const Obstacle& obs : world.obstacles) consider(name, body, obs.name, obs.geom);

  const bool left_dual = world.attached_left && world.attached_left->dual;
  const bool right_dual = world.attached_right && world.attached_right->dual;
  for (const auto& [la, ga] : left) {
    for (const auto& [ra, gb] : right) {
      // A dual-held object legitimately touches both grippers.
      if (left_dual && la == "left:attached") continue;
      if (right_dual && ra == "right:attached") continue;
      consider(la, ga, ra, gb);
    }
  }
  return report;
}

bool body_clear(const CollisionWorld& world, const std::string& body_name,
                const CollisionGeom& geom, double margin) {
  const double m = margin >= 0.0 ? margin : world.clearance;
  for (const Obstacle& obs : world.obstacles) {
    if (pair_allowed(world, body_name, obs.name)) continue;
    if (distance(geom, obs.geom) < m) return false;
  }
  return true;
}

bool in_collision(const CollisionWorld& world, const DualArmModel& models, const DualConfig& c,
                  double margin) {
  const double m = margin >= 0.0 ? margin : world.clearance;

  const auto left = arm_bodies(models.left, c.left, "left", world.attached_left);
  const auto right = arm_bodies(models.right, c.right, "right", world.attached_right);

  auto hit = [&](const std::string& a, const CollisionGeom& ga, const std::string& b,
                 const CollisionGeom& gb) {
    if (pair_allowed(world, a, b) || pair_allowed(world, b, a)) return false;
    return distance(ga, gb) < m;
  };

  for (const auto& [name, body] : left)
    for (const Obstacle& obs : world.obstacles)
      if (hit(name, body, obs.name, obs.geom)) return true;
  for (const auto& [name, body] : right)
    for (const Obstacle& obs : world.obstacles)
      if (hit(name, body, obs.name, obs.geom)) return true;

  const bool left_dual = world.attached_left && world.attached_left->dual;
  const bool right_dual = world.attached_right && world.attached_right->dual;
  for (const auto& [la, ga] : left) {
    if (left_dual && la == "left:attached") continue;
    for (const auto& [ra, gb] : right) {
      if (right_dual && ra == "right:attached") continue;
      if (hit(la, ga, ra, gb)) return true;
    }
  }
  return false;
}

}  // namespace packbot::motion
