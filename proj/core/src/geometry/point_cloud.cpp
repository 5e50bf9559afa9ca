#include "packbot/geometry/point_cloud.hpp"

#include <cmath>

namespace packbot::geom {

PointCloud transform_cloud(const Pose& p, const PointCloud& c) {
  PointCloud out;
  out.points.reserve(c.points.size());
  const Mat3 rot = p.matrix();
  for (const Vec3& x : c.points) out.points.push_back(rot * x + p.translation);
  out.labels = c.labels;
  return out;
}

Vec3 centroid(const PointCloud& c) {
  Vec3 sum = Vec3::Zero();
  if (c.points.empty()) return sum;
  for (const Vec3& x : c.points) sum += x;
  return sum / static_cast<double>(c.points.size());
}

bool cloud_valid(const PointCloud& c) {
  for (const Vec3& x : c.points) {
    if (!x.allFinite()) return false;
  }
  if (c.labels && c.labels->size() != c.points.size()) return false;
  return true;
}

}  // namespace packbot::geom
