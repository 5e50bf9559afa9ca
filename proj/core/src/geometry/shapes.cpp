#include "packbot/geometry/shapes.hpp"

#include "packbot/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace packbot::geom {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0)) throw std::invalid_argument(std::string(what) + " must be strictly positive");
}

void require_positive_extents(const Vec3& e) {
  require_positive(e.x(), "extent.x");
  require_positive(e.y(), "extent.y");
  require_positive(e.z(), "extent.z");
}

}  // namespace

std::string to_string(ShapeKind k) {
  switch (k) {
    case ShapeKind::box: return "box";
    case ShapeKind::cylinder: return "cylinder";
    case ShapeKind::sphere: return "sphere";
    case ShapeKind::cone: return "cone";
    case ShapeKind::flat_slab: return "flat_slab";
    case ShapeKind::deformable_sheet: return "deformable_sheet";
  }
  return "?";
}

std::optional<ShapeKind> shape_kind_from_string(const std::string& s) {
  if (s == "box") return ShapeKind::box;
  if (s == "cylinder") return ShapeKind::cylinder;
  if (s == "sphere") return ShapeKind::sphere;
  if (s == "cone") return ShapeKind::cone;
  if (s == "flat_slab") return ShapeKind::flat_slab;
  if (s == "deformable_sheet") return ShapeKind::deformable_sheet;
  return std::nullopt;
}

ShapePrimitive ShapePrimitive::make_box(const Vec3& extents) {
  require_positive_extents(extents);
  return {ShapeKind::box, extents, 0.0, 0.0};
}

ShapePrimitive ShapePrimitive::make_cylinder(double radius, double height) {
  require_positive(radius, "radius");
  require_positive(height, "height");
  return {ShapeKind::cylinder, Vec3::Zero(), radius, height};
}

ShapePrimitive ShapePrimitive::make_sphere(double radius) {
  require_positive(radius, "radius");
  return {ShapeKind::sphere, Vec3::Zero(), radius, 0.0};
}

ShapePrimitive ShapePrimitive::make_cone(double radius, double height) {
  require_positive(radius, "radius");
  require_positive(height, "height");
  return {ShapeKind::cone, Vec3::Zero(), radius, height};
}

ShapePrimitive ShapePrimitive::make_flat_slab(const Vec3& extents) {
  require_positive_extents(extents);
  return {ShapeKind::flat_slab, extents, 0.0, 0.0};
}

ShapePrimitive ShapePrimitive::make_deformable_sheet(const Vec3& extents) {
  require_positive_extents(extents);
  return {ShapeKind::deformable_sheet, extents, 0.0, 0.0};
}

bool is_box_like(ShapeKind k) {
  return k == ShapeKind::box || k == ShapeKind::flat_slab || k == ShapeKind::deformable_sheet;
}

bool has_longitudinal_axis(ShapeKind k) {
  return k == ShapeKind::cylinder || k == ShapeKind::cone;
}

double surface_area(const ShapePrimitive& s) {
  switch (s.kind) {
    case ShapeKind::box:
    case ShapeKind::flat_slab:
    case ShapeKind::deformable_sheet: {
      const Vec3& e = s.extents;
      return 2.0 * (e.x() * e.y() + e.y() * e.z() + e.z() * e.x());
    }
    case ShapeKind::cylinder:
      return 2.0 * M_PI * s.radius * s.height + 2.0 * M_PI * s.radius * s.radius;
    case ShapeKind::sphere:
      return 4.0 * M_PI * s.radius * s.radius;
    case ShapeKind::cone: {
      const double slant = std::hypot(s.radius, s.height);
      return M_PI * s.radius * slant + M_PI * s.radius * s.radius;
    }
  }
  return 0.0;
}

namespace {

Vec3 sample_box_surface(const Vec3& extents, Rng& rng) {
  const Vec3 h = 0.5 * extents;
  // Face selection weighted by area; faces indexed by fixed axis 0..2, sign.
  const double ax = extents.y() * extents.z();
  const double ay = extents.x() * extents.z();
  const double az = extents.x() * extents.y();
  const double total = 2.0 * (ax + ay + az);
  double u = rng.uniform() * total;
  int axis;
  if (u < 2.0 * ax) {
    axis = 0;
    u /= 2.0 * ax;
  } else if (u < 2.0 * (ax + ay)) {
    axis = 1;
    u = (u - 2.0 * ax) / (2.0 * ay);
  } else {
    axis = 2;
    u = (u - 2.0 * (ax + ay)) / (2.0 * az);
  }
  const double sign = (u < 0.5) ? -1.0 : 1.0;
  Vec3 p;
  p[axis] = sign * h[axis];
  p[(axis + 1) % 3] = rng.uniform(-h[(axis + 1) % 3], h[(axis + 1) % 3]);
  p[(axis + 2) % 3] = rng.uniform(-h[(axis + 2) % 3], h[(axis + 2) % 3]);
  return p;
}

Vec3 sample_cylinder_surface(double r, double h, Rng& rng) {
  const double side = 2.0 * M_PI * r * h;
  const double cap = M_PI * r * r;
  const double u = rng.uniform() * (side + 2.0 * cap);
  if (u < side) {
    const double phi = rng.uniform(0.0, 2.0 * M_PI);
    return {r * std::cos(phi), r * std::sin(phi), rng.uniform(-0.5 * h, 0.5 * h)};
  }
  const double z = (u < side + cap) ? -0.5 * h : 0.5 * h;
  const double rho = r * std::sqrt(rng.uniform());
  const double phi = rng.uniform(0.0, 2.0 * M_PI);
  return {rho * std::cos(phi), rho * std::sin(phi), z};
}

Vec3 sample_cone_surface(double r, double h, Rng& rng) {
  // Apex at +h/2, base disc at -h/2.
  const double slant = std::hypot(r, h);
  const double lateral = M_PI * r * slant;
  const double base = M_PI * r * r;
  const double u = rng.uniform() * (lateral + base);
  const double phi = rng.uniform(0.0, 2.0 * M_PI);
  if (u < lateral) {
    // Parameterize by distance from apex; area density grows linearly.
    const double t = std::sqrt(rng.uniform());  // fraction of slant from apex
    const double rho = r * t;
    const double z = 0.5 * h - h * t;
    return {rho * std::cos(phi), rho * std::sin(phi), z};
  }
  const double rho = r * std::sqrt(rng.uniform());
  return {rho * std::cos(phi), rho * std::sin(phi), -0.5 * h};
}

}  // namespace

PointCloud sample_surface(const ShapePrimitive& s, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_surface requires n >= 1");
  Rng rng(seed);
  PointCloud cloud;
  cloud.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    switch (s.kind) {
      case ShapeKind::box:
      case ShapeKind::flat_slab:
      case ShapeKind::deformable_sheet:
        cloud.points.push_back(sample_box_surface(s.extents, rng));
        break;
      case ShapeKind::cylinder:
        cloud.points.push_back(sample_cylinder_surface(s.radius, s.height, rng));
        break;
      case ShapeKind::sphere:
        cloud.points.push_back(s.radius * rng.unit_vector());
        break;
      case ShapeKind::cone:
        cloud.points.push_back(sample_cone_surface(s.radius, s.height, rng));
        break;
    }
  }
  return cloud;
}

namespace {

double box_surface_distance(const Vec3& half, const Vec3& p) {
  const Vec3 q = p.cwiseAbs() - half;
  const double outside = q.cwiseMax(0.0).norm();
  const double inside = std::min(q.maxCoeff(), 0.0);
  return std::abs(outside + inside);  // |signed distance|
}

double cylinder_surface_distance(double r, double h, const Vec3& p) {
  const double rho = std::hypot(p.x(), p.y());
  const double dr = rho - r;
  const double dz = std::abs(p.z()) - 0.5 * h;
  const double outside = std::hypot(std::max(dr, 0.0), std::max(dz, 0.0));
  const double inside = std::min(std::max(dr, dz), 0.0);
  return std::abs(outside + inside);
}

// Distance in the (rho, z) half-plane from a point to a 2D segment.
double planar_segment_distance(double rho, double z, double r0, double z0, double r1, double z1) {
  const double vx = r1 - r0;
  const double vz = z1 - z0;
  const double len2 = vx * vx + vz * vz;
  double t = len2 > 0.0 ? ((rho - r0) * vx + (z - z0) * vz) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(rho - (r0 + t * vx), z - (z0 + t * vz));
}

double cone_surface_distance(double r, double h, const Vec3& p) {
  const double rho = std::hypot(p.x(), p.y());
  // Lateral surface: segment from (r, -h/2) to (0, +h/2) in the (rho, z) plane.
  const double lat = planar_segment_distance(rho, p.z(), r, -0.5 * h, 0.0, 0.5 * h);
  // Base disc at z = -h/2.
  const double base =
      (rho <= r) ? std::abs(p.z() + 0.5 * h)
                 : std::hypot(rho - r, p.z() + 0.5 * h);
  return std::min(lat, base);
}

}  // namespace

double surface_distance(const ShapePrimitive& s, const Vec3& p) {
  switch (s.kind) {
    case ShapeKind::box:
    case ShapeKind::flat_slab:
    case ShapeKind::deformable_sheet:
      return box_surface_distance(0.5 * s.extents, p);
    case ShapeKind::cylinder:
      return cylinder_surface_distance(s.radius, s.height, p);
    case ShapeKind::sphere:
      return std::abs(p.norm() - s.radius);
    case ShapeKind::cone:
      return cone_surface_distance(s.radius, s.height, p);
  }
  return std::numeric_limits<double>::infinity();
}

namespace {

std::optional<double> ray_box(const Vec3& half, const Vec3& o, const Vec3& d, double t_min) {
  double t0 = -std::numeric_limits<double>::infinity();
  double t1 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    if (std::abs(d[i]) < 1e-14) {
      if (std::abs(o[i]) > half[i]) return std::nullopt;
      continue;
    }
    double a = (-half[i] - o[i]) / d[i];
    double b = (half[i] - o[i]) / d[i];
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
    if (t0 > t1) return std::nullopt;
  }
  if (t1 < t_min) return std::nullopt;
  return t0 >= t_min ? t0 : t1;
}

std::optional<double> ray_sphere(double r, const Vec3& o, const Vec3& d, double t_min) {
  const double b = o.dot(d);
  const double c = o.squaredNorm() - r * r;
  const double disc = b * b - c;
  if (disc < 0.0) return std::nullopt;
  const double sq = std::sqrt(disc);
  const double ta = -b - sq;
  const double tb = -b + sq;
  if (ta >= t_min) return ta;
  if (tb >= t_min) return tb;
  return std::nullopt;
}

void consider(std::optional<double>& best, double t, double t_min) {
  if (t >= t_min && (!best || t < *best)) best = t;
}

std::optional<double> ray_cylinder(double r, double h, const Vec3& o, const Vec3& d,
                                   double t_min) {
  std::optional<double> best;
  const double hz = 0.5 * h;
  // Side wall: x^2 + y^2 = r^2.
  const double a = d.x() * d.x() + d.y() * d.y();
  if (a > 1e-14) {
    const double b = o.x() * d.x() + o.y() * d.y();
    const double c = o.x() * o.x() + o.y() * o.y() - r * r;
    const double disc = b * b - a * c;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      for (double t : {(-b - sq) / a, (-b + sq) / a}) {
        const double z = o.z() + t * d.z();
        if (std::abs(z) <= hz) consider(best, t, t_min);
      }
    }
  }
  // Caps.
  if (std::abs(d.z()) > 1e-14) {
    for (double zc : {-hz, hz}) {
      const double t = (zc - o.z()) / d.z();
      const Vec3 p = o + t * d;
      if (p.x() * p.x() + p.y() * p.y() <= r * r) consider(best, t, t_min);
    }
  }
  return best;
}

std::optional<double> ray_cone(double r, double h, const Vec3& o, const Vec3& d, double t_min) {
  std::optional<double> best;
  // Lateral: rho = r * (h/2 - z) / h for z in [-h/2, h/2].
  // Rewrite as x^2 + y^2 - k^2 (h/2 - z)^2 = 0 with k = r/h.
  const double k = r / h;
  const double zo = 0.5 * h - o.z();  // distance below apex, along -z
  const double a = d.x() * d.x() + d.y() * d.y() - k * k * d.z() * d.z();
  const double b = o.x() * d.x() + o.y() * d.y() + k * k * zo * d.z();
  const double c = o.x() * o.x() + o.y() * o.y() - k * k * zo * zo;
  if (std::abs(a) > 1e-14) {
    const double disc = b * b - a * c;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      for (double t : {(-b - sq) / a, (-b + sq) / a}) {
        const double z = o.z() + t * d.z();
        if (z >= -0.5 * h && z <= 0.5 * h) consider(best, t, t_min);
      }
    }
  } else if (std::abs(b) > 1e-14) {
    const double t = -c / (2.0 * b);
    const double z = o.z() + t * d.z();
    if (z >= -0.5 * h && z <= 0.5 * h) consider(best, t, t_min);
  }
  // Base disc.
  if (std::abs(d.z()) > 1e-14) {
    const double t = (-0.5 * h - o.z()) / d.z();
    const Vec3 p = o + t * d;
    if (p.x() * p.x() + p.y() * p.y() <= r * r) consider(best, t, t_min);
  }
  return best;
}

}  // namespace

std::optional<double> ray_hit(const ShapePrimitive& s, const Pose& pose, const Vec3& origin,
                              const Vec3& dir, double t_min) {
  const Pose inv = inverse(pose);
  const Vec3 o = inv.apply(origin);
  const Vec3 d = inv.rotation * dir;
  switch (s.kind) {
    case ShapeKind::box:
    case ShapeKind::flat_slab:
    case ShapeKind::deformable_sheet:
      return ray_box(0.5 * s.extents, o, d, t_min);
    case ShapeKind::cylinder:
      return ray_cylinder(s.radius, s.height, o, d, t_min);
    case ShapeKind::sphere:
      return ray_sphere(s.radius, o, d, t_min);
    case ShapeKind::cone:
      return ray_cone(s.radius, s.height, o, d, t_min);
  }
  return std::nullopt;
}

double support_width(const ShapePrimitive& s, const Pose& pose, const Vec3& dir) {
  const Vec3 u = dir.normalized();
  const Mat3 rot = pose.matrix();
  switch (s.kind) {
    case ShapeKind::box:
    case ShapeKind::flat_slab:
    case ShapeKind::deformable_sheet: {
      double w = 0.0;
      for (int i = 0; i < 3; ++i) w += s.extents[i] * std::abs(u.dot(rot.col(i)));
      return w;
    }
    case ShapeKind::sphere:
      return 2.0 * s.radius;
    case ShapeKind::cylinder: {
      const double c = std::abs(u.dot(rot.col(2)));
      return s.height * c + 2.0 * s.radius * std::sqrt(std::max(0.0, 1.0 - c * c));
    }
    case ShapeKind::cone: {
      const Vec3 axis = rot.col(2);
      const Vec3 apex = pose.translation + 0.5 * s.height * axis;
      const Vec3 base = pose.translation - 0.5 * s.height * axis;
      const double c = u.dot(axis);
      const double ring = s.radius * std::sqrt(std::max(0.0, 1.0 - c * c));
      const double hi = std::max(u.dot(apex), u.dot(base) + ring);
      const double lo = std::min(u.dot(apex), u.dot(base) - ring);
      return hi - lo;
    }
  }
  return 0.0;
}

Aabb world_aabb(const ShapePrimitive& s, const Pose& pose) {
  const Mat3 rot = pose.matrix();
  const Vec3& t = pose.translation;
  switch (s.kind) {
    case ShapeKind::box:
    case ShapeKind::flat_slab:
    case ShapeKind::deformable_sheet: {
      Vec3 r = Vec3::Zero();
      for (int i = 0; i < 3; ++i)
        r += 0.5 * s.extents[i] * rot.col(i).cwiseAbs();
      return {t - r, t + r};
    }
    case ShapeKind::sphere:
      return {t - Vec3::Constant(s.radius), t + Vec3::Constant(s.radius)};
    case ShapeKind::cylinder:
    case ShapeKind::cone: {
      const Vec3 a = 0.5 * s.height * rot.col(2);
      Vec3 r;
      for (int i = 0; i < 3; ++i) {
        const double c = rot.col(2)[i];
        r[i] = std::abs(a[i]) + s.radius * std::sqrt(std::max(0.0, 1.0 - c * c));
      }
      return {t - r, t + r};
    }
  }
  return {t, t};
}

}  // namespace packbot::geom
