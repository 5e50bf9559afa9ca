#pragma once

#include "packbot/geometry/point_cloud.hpp"
#include "packbot/sim/world.hpp"
#include "packbot/skills/types.hpp"

#include <map>
#include <string>

namespace packbot::percept {

struct SegmentationParams {
  int points_per_object = 350;
  int points_per_bin = 500;
  double fov_deg = 80.0;          // full cone angle of the camera
  double cleanup_radius = 0.015;  // object points carved out of bin clouds
};

/// Per-instance point clouds in the robot base frame, with a visibility-based
/// confidence per instance.
struct SegmentedCloud {
  std::map<std::string, geom::PointCloud> instances;
  std::map<std::string, double> confidences;

  bool has(const std::string& id) const { return instances.count(id) > 0; }
};

/// Synthetic stand-in for an instance-segmentation camera: surface points of
/// every object visible from the sensor (ray-cast occlusion against all solid
/// geometry, view-cone test), Gaussian depth noise along the ray, random point
/// dropout, and whole-instance misses at noise.miss_rate. Bins and the packing
/// box contribute their own clouds, cleaned of points overlapping object
/// points. Deterministic for a fixed seed.
SegmentedCloud segment_scene(const sim::WorldState& world, const skills::SensorSpec& sensor,
                             const sim::NoiseProfile& noise, std::uint64_t seed,
                             const SegmentationParams& params = {});

}  // namespace packbot::percept
