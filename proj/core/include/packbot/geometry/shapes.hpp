#pragma once

#include "packbot/geometry/point_cloud.hpp"
#include "packbot/geometry/pose.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace packbot::geom {

enum class ShapeKind : std::uint8_t {
  box,
  cylinder,
  sphere,
  cone,
  flat_slab,
  deformable_sheet,
};

std::string to_string(ShapeKind k);
std::optional<ShapeKind> shape_kind_from_string(const std::string& s);

/// Analytic solid in its canonical frame (identity pose).
///
/// All shapes are centered on the origin of their canonical frame so that the
/// axis-aligned bounding box is symmetric: boxes/slabs/sheets span +-extents/2,
/// cylinders and cones span z in [-height/2, height/2] (cone apex at +z),
/// spheres are centered. Dimensions must be strictly positive.
struct ShapePrimitive {
  ShapeKind kind = ShapeKind::box;
  Vec3 extents = Vec3::Zero();  // box-like kinds
  double radius = 0.0;          // sphere, cylinder, cone
  double height = 0.0;          // cylinder, cone

  static ShapePrimitive make_box(const Vec3& extents);
  static ShapePrimitive make_cylinder(double radius, double height);
  static ShapePrimitive make_sphere(double radius);
  static ShapePrimitive make_cone(double radius, double height);
  static ShapePrimitive make_flat_slab(const Vec3& extents);
  static ShapePrimitive make_deformable_sheet(const Vec3& extents);
};

/// Box-like kinds sample and collide as rectangular cuboids.
bool is_box_like(ShapeKind k);

/// Kinds with a longitudinal axis (local +Z): cylinders and cones.
bool has_longitudinal_axis(ShapeKind k);

double surface_area(const ShapePrimitive& s);

/// Exactly n points on the analytic surface, deterministic for a fixed seed.
PointCloud sample_surface(const ShapePrimitive& s, std::size_t n, std::uint64_t seed);

/// Unsigned distance from a point (canonical frame) to the surface.
double surface_distance(const ShapePrimitive& s, const Vec3& local_point);

/// Nearest hit parameter t >= t_min along origin + t*dir, if any.
std::optional<double> ray_hit(const ShapePrimitive& s, const Pose& pose, const Vec3& origin,
                              const Vec3& dir, double t_min = 1e-9);

/// Extent of the posed shape along a (unit) direction: max projection minus min.
double support_width(const ShapePrimitive& s, const Pose& pose, const Vec3& dir);

struct Aabb {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  bool contains(const Vec3& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
  bool overlaps(const Aabb& o) const {
    return (min.array() <= o.max.array()).all() && (max.array() >= o.min.array()).all();
  }
  Aabb inflated(double m) const { return {min - Vec3::Constant(m), max + Vec3::Constant(m)}; }
  Vec3 center() const { return 0.5 * (min + max); }
  Vec3 size() const { return max - min; }
};

/// Tight world-frame AABB for boxes and spheres, conservative for cylinders
/// and cones (axis sweep plus radius).
Aabb world_aabb(const ShapePrimitive& s, const Pose& pose);

}  // namespace packbot::geom
