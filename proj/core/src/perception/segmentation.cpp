#include "packbot/perception/segmentation.hpp"

#include "packbot/rng.hpp"

#include <cmath>

namespace packbot::percept {

using geom::Pose;
using geom::ShapePrimitive;
using geom::Vec3;

namespace {

struct Occluder {
  ShapePrimitive shape;
  Pose pose;
};

ShapePrimitive box_from_aabb(const geom::Aabb& bb, Pose& pose_out) {
  pose_out = Pose::from_translation(bb.center());
  return ShapePrimitive::make_box(bb.size());
}

bool visible(const Vec3& point, const Vec3& cam, const Vec3& optical_axis, double cos_half_fov,
             const std::vector<Occluder>& occluders) {
  const Vec3 delta = point - cam;
  const double dist = delta.norm();
  if (dist < 1e-9) return false;
  const Vec3 dir = delta / dist;
  if (dir.dot(optical_axis) < cos_half_fov) return false;
  for (const Occluder& occ : occluders) {
    const auto hit = geom::ray_hit(occ.shape, occ.pose, cam, dir, 1e-6);
    if (hit && *hit < dist - 1e-6) return false;
  }
  return true;
}

}  // namespace

SegmentedCloud segment_scene(const sim::WorldState& world, const skills::SensorSpec& sensor,
                             const sim::NoiseProfile& noise, std::uint64_t seed,
                             const SegmentationParams& params) {
  SegmentedCloud out;
  Rng root(seed);

  const Vec3 cam = sensor.mount_pose.translation;
  const Vec3 optical_axis = sensor.mount_pose.rotation * Vec3::UnitZ();
  const double cos_half_fov = std::cos(geom::deg_to_rad(0.5 * params.fov_deg));

  std::vector<Occluder> occluders;
  for (const auto& obj : world.objects) occluders.push_back({obj.spec.shape, obj.pose});
  auto add_parts = [&](const sim::BinGeometry& bin) {
    for (const auto& [name, bb] : bin.solid_parts()) {
      Pose pose;
      const ShapePrimitive shape = box_from_aabb(bb, pose);
      occluders.push_back({shape, pose});
    }
  };
  for (const auto& bin : world.bins) add_parts(bin);
  add_parts(world.box.body);

  auto observe = [&](const ShapePrimitive& shape, const Pose& pose, int n_points, Rng& rng,
                     geom::PointCloud& cloud_out, int& sampled_out) {
    const geom::PointCloud local = geom::sample_surface(shape, n_points, rng.next_u64());
    sampled_out += n_points;
    for (const Vec3& lp : local.points) {
      const Vec3 wp = pose.apply(lp);
      if (!visible(wp, cam, optical_axis, cos_half_fov, occluders)) continue;
      if (noise.dropout > 0.0 && rng.bernoulli(noise.dropout)) continue;
      Vec3 p = wp;
      if (noise.depth_sigma > 0.0) {
        const Vec3 ray = (wp - cam).normalized();
        p += noise.depth_sigma * rng.normal() * ray;
      }
      cloud_out.points.push_back(p);
    }
  };

  // Object instances; each gets its own reproducible stream.
  std::uint64_t salt = 1;
  for (const auto& obj : world.objects) {
    Rng rng = root.fork(salt++);
    if (noise.miss_rate > 0.0 && rng.bernoulli(noise.miss_rate)) continue;
    geom::PointCloud cloud;
    int sampled = 0;
    observe(obj.spec.shape, obj.pose, params.points_per_object, rng, cloud, sampled);
    if (cloud.empty()) continue;
    out.confidences[obj.id] =
        static_cast<double>(cloud.size()) / std::max(1, sampled);
    out.instances.emplace(obj.id, std::move(cloud));
  }

  // Bin and packing-box clouds, with object points carved out (semantic
  // prior: a container's cloud must not contain item points).
  std::vector<Vec3> object_points;
  for (const auto& [id, cloud] : out.instances)
    object_points.insert(object_points.end(), cloud.points.begin(), cloud.points.end());
  const double cleanup_sq = params.cleanup_radius * params.cleanup_radius;

  auto observe_container = [&](const sim::BinGeometry& bin) {
    Rng rng = root.fork(salt++);
    geom::PointCloud cloud;
    int sampled = 0;
    const auto parts = bin.solid_parts();
    const int per_part = std::max(1, params.points_per_bin / static_cast<int>(parts.size()));
    for (const auto& [name, bb] : parts) {
      Pose pose;
      const ShapePrimitive shape = box_from_aabb(bb, pose);
      observe(shape, pose, per_part, rng, cloud, sampled);
    }
    geom::PointCloud cleaned;
    for (const Vec3& p : cloud.points) {
      bool near_object = false;
      for (const Vec3& q : object_points) {
        if ((p - q).squaredNorm() < cleanup_sq) {
          near_object = true;
          break;
        }
      }
      if (!near_object) cleaned.points.push_back(p);
    }
    if (cleaned.empty()) return;
    out.confidences[bin.name] =
        static_cast<double>(cleaned.size()) / std::max(1, sampled);
    out.instances.emplace(bin.name, std::move(cleaned));
  };
  for (const auto& bin : world.bins) observe_container(bin);
  observe_container(world.box.body);

  return out;
}

}  // namespace packbot::percept
