#pragma once

#include "packbot/geometry/pose.hpp"

#include <optional>
#include <vector>

namespace packbot::geom {

/// Unordered set of 3D points in meters, with optional per-point instance
/// labels (same length as points when present).
struct PointCloud {
  std::vector<Vec3> points;
  std::optional<std::vector<int>> labels;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

PointCloud transform_cloud(const Pose& p, const PointCloud& c);

Vec3 centroid(const PointCloud& c);

/// True iff all coordinates are finite and labels, when present, match the
/// point count.
bool cloud_valid(const PointCloud& c);

}  // namespace packbot::geom
