#include "packbot/sim/world.hpp"

#include "packbot/motion/kinematics.hpp"
#include "packbot/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace packbot::sim {

using geom::Aabb;
using geom::Pose;
using geom::Vec3;
using motion::ArmSide;

bool NoiseProfile::valid() const {
  auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
  return depth_sigma >= 0.0 && in01(dropout) && in01(miss_rate) && in01(slip_probability) &&
         pose_jitter_rad >= 0.0 && pose_jitter_m >= 0.0;
}

std::string to_string(ObjectStatus s) {
  switch (s) {
    case ObjectStatus::in_bin: return "in_bin";
    case ObjectStatus::grasped: return "grasped";
    case ObjectStatus::in_box: return "in_box";
    case ObjectStatus::dropped: return "dropped";
  }
  return "?";
}

Aabb BinGeometry::interior_aabb() const {
  const Vec3 half(0.5 * interior.x(), 0.5 * interior.y(), 0.0);
  return {floor_center - half, floor_center + Vec3(half.x(), half.y(), interior.z())};
}

std::vector<std::pair<std::string, Aabb>> BinGeometry::solid_parts() const {
  std::vector<std::pair<std::string, Aabb>> parts;
  const double hx = 0.5 * interior.x();
  const double hy = 0.5 * interior.y();
  const double z0 = floor_center.z();
  const double z1 = rim_z();
  const double t = wall_thickness;
  const Vec3& c = floor_center;
  parts.push_back({name + ":floor", {c - Vec3(hx + t, hy + t, t), c + Vec3(hx + t, hy + t, 0)}});
  parts.push_back({name + ":wall_xp",
                   {Vec3(c.x() + hx, c.y() - hy - t, z0), Vec3(c.x() + hx + t, c.y() + hy + t, z1)}});
  parts.push_back({name + ":wall_xn",
                   {Vec3(c.x() - hx - t, c.y() - hy - t, z0), Vec3(c.x() - hx, c.y() + hy + t, z1)}});
  parts.push_back({name + ":wall_yp",
                   {Vec3(c.x() - hx - t, c.y() + hy, z0), Vec3(c.x() + hx + t, c.y() + hy + t, z1)}});
  parts.push_back({name + ":wall_yn",
                   {Vec3(c.x() - hx - t, c.y() - hy - t, z0), Vec3(c.x() + hx + t, c.y() - hy, z1)}});
  return parts;
}

namespace {

// Flap index convention: 0 = +x, 1 = -x, 2 = +y, 3 = -y.
Vec3 flap_edge_midpoint(const BinGeometry& body, int flap) {
  const double hx = 0.5 * body.interior.x();
  const double hy = 0.5 * body.interior.y();
  Vec3 p = body.floor_center;
  p.z() = body.rim_z();
  switch (flap) {
    case 0: p.x() += hx; break;
    case 1: p.x() -= hx; break;
    case 2: p.y() += hy; break;
    default: p.y() -= hy; break;
  }
  return p;
}

Vec3 flap_outward(int flap) {
  switch (flap) {
    case 0: return Vec3(1, 0, 0);
    case 1: return Vec3(-1, 0, 0);
    case 2: return Vec3(0, 1, 0);
    default: return Vec3(0, -1, 0);
  }
}

double flap_length(const BinGeometry& body, int flap) {
  return flap < 2 ? 0.5 * body.interior.y() : 0.5 * body.interior.x();
}

double uniform01(std::mt19937_64& eng) {
  return std::ldexp(static_cast<double>(eng() >> 11), -53);
}

double uniform_range(std::mt19937_64& eng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(eng);
}

}  // namespace

Vec3 PackingBox::flap_push_point(int flap) const {
  return flap_edge_midpoint(body, flap) + Vec3(0, 0, 0.03);
}

Vec3 PackingBox::flap_approach_point(int flap) const {
  return flap_edge_midpoint(body, flap) + flap_length(body, flap) * flap_outward(flap) +
         Vec3(0, 0, 0.08);
}

ObjectInstance* WorldState::find(const std::string& id) {
  for (auto& o : objects)
    if (o.id == id) return &o;
  return nullptr;
}

const ObjectInstance* WorldState::find(const std::string& id) const {
  for (const auto& o : objects)
    if (o.id == id) return &o;
  return nullptr;
}

namespace {

double half_height(const ObjectInstance& obj) {
  const Aabb bb = geom::world_aabb(obj.spec.shape, obj.pose);
  return 0.5 * (bb.max.z() - bb.min.z());
}

struct Rect {
  double xmin, ymin, xmax, ymax;
  bool overlaps(const Rect& o) const {
    return xmin <= o.xmax && xmax >= o.xmin && ymin <= o.ymax && ymax >= o.ymin;
  }
  bool contains(double x, double y) const {
    return x >= xmin && x <= xmax && y >= ymin && y <= ymax;
  }
};

Rect footprint(const ObjectInstance& obj, double inflate = 0.0) {
  const Aabb bb = geom::world_aabb(obj.spec.shape, obj.pose);
  return {bb.min.x() - inflate, bb.min.y() - inflate, bb.max.x() + inflate, bb.max.y() + inflate};
}

// Highest resting surface under (x, y) that sits at or below z_from.
double support_z(const WorldState& world, double x, double y, double z_from,
                 const std::string& ignore_id) {
  double best = 0.0;  // table plane
  for (const auto& bin : world.bins) {
    const Aabb in = bin.interior_aabb();
    if (x >= in.min.x() && x <= in.max.x() && y >= in.min.y() && y <= in.max.y())
      best = std::max(best, bin.floor_center.z());
  }
  {
    const Aabb in = world.box.body.interior_aabb();
    if (x >= in.min.x() && x <= in.max.x() && y >= in.min.y() && y <= in.max.y())
      best = std::max(best, world.box.body.floor_center.z());
  }
  for (const auto& other : world.objects) {
    if (other.id == ignore_id || other.status == ObjectStatus::grasped) continue;
    const Rect r = footprint(other);
    if (!r.contains(x, y)) continue;
    const Aabb bb = geom::world_aabb(other.spec.shape, other.pose);
    if (bb.max.z() <= z_from + 1e-9) best = std::max(best, bb.max.z());
  }
  return best;
}

void settle_object(WorldState& world, ObjectInstance& obj, bool force_dropped) {
  const double hz = half_height(obj);
  const double x = obj.pose.translation.x();
  const double y = obj.pose.translation.y();
  const double rest = support_z(world, x, y, obj.pose.translation.z(), obj.id);
  obj.pose.translation.z() = rest + hz;

  if (force_dropped) {
    obj.status = ObjectStatus::dropped;
    return;
  }
  const Aabb box_in = world.box.body.interior_aabb();
  if (x >= box_in.min.x() && x <= box_in.max.x() && y >= box_in.min.y() &&
      y <= box_in.max.y() && obj.pose.translation.z() <= world.box.body.rim_z() + 0.10) {
    obj.status = ObjectStatus::in_box;
    return;
  }
  for (std::size_t b = 0; b < world.bins.size(); ++b) {
    const Aabb in = world.bins[b].interior_aabb();
    if (x >= in.min.x() && x <= in.max.x() && y >= in.min.y() && y <= in.max.y()) {
      obj.status = ObjectStatus::in_bin;
      return;
    }
  }
  obj.status = ObjectStatus::dropped;
}

void detach(WorldState& world, ObjectInstance& obj) {
  obj.status = ObjectStatus::in_bin;  // settled right after by the caller
  obj.grasped_by = -1;
  obj.slip_pending = false;
  for (auto& g : world.grippers)
    if (g.attached == obj.id) g.attached.clear();
}

geom::Pose tcp_pose(const WorldState& world, const motion::DualArmModel& models, ArmSide side) {
  const motion::ArmModel& arm = side == ArmSide::left ? models.left : models.right;
  const motion::JointVector& q = side == ArmSide::left ? world.arms.left : world.arms.right;
  return motion::forward_kinematics(arm, q);
}

}  // namespace

WorldState reset(const SceneSetup& scene, const motion::DualArmModel& models,
                 std::uint64_t seed) {
  WorldState world;
  world.bins = scene.bins;
  world.box.body = scene.box_body;
  world.noise = scene.noise;
  world.table_z = scene.table_z;
  world.arms = models.home();
  world.grippers[0].max_opening = world.grippers[0].opening = scene.gripper_max_opening;
  world.grippers[1].max_opening = world.grippers[1].opening = scene.gripper_max_opening;
  world.rng_engine.seed(seed);

  // Packing-area lower bound per bin before any sampling.
  std::vector<double> bin_load(scene.bins.size(), 0.0);
  for (const auto& so : scene.objects) {
    if (so.bin < 0 || so.bin >= static_cast<int>(scene.bins.size()))
      throw SimError(SimError::Code::ScenarioInfeasible,
                     "object '" + so.spec.name + "' assigned to missing bin");
    const Aabb bb = geom::world_aabb(so.spec.shape, Pose::identity());
    const double area = (bb.max.x() - bb.min.x()) * (bb.max.y() - bb.min.y());
    bin_load[static_cast<std::size_t>(so.bin)] += area * so.count;
  }
  for (std::size_t b = 0; b < scene.bins.size(); ++b) {
    const double floor_area = scene.bins[b].interior.x() * scene.bins[b].interior.y();
    if (bin_load[b] > 0.65 * floor_area)
      throw SimError(SimError::Code::ScenarioInfeasible,
                     "bin '" + scene.bins[b].name + "' cannot hold the assigned objects");
  }

  for (const auto& so : scene.objects) {
    for (int k = 0; k < so.count; ++k) {
      ObjectInstance obj;
      obj.id = so.spec.name + "_" + std::to_string(k);
      obj.spec = so.spec;
      obj.home_bin = so.bin;
      obj.status = ObjectStatus::in_bin;

      // Orientation first; the footprint depends on it.
      const double yaw = uniform_range(world.rng_engine, 0.0, 2.0 * M_PI);
      if (so.orientation == InitialOrientation::lying &&
          geom::has_longitudinal_axis(so.spec.shape.kind)) {
        obj.pose.rotation = geom::Quat(Eigen::AngleAxisd(yaw, Vec3::UnitZ()) *
                                       Eigen::AngleAxisd(M_PI / 2.0, Vec3::UnitY()));
      } else if (so.spec.shape.kind != geom::ShapeKind::sphere) {
        obj.pose.rotation = geom::Quat(Eigen::AngleAxisd(yaw, Vec3::UnitZ()));
      }

      const BinGeometry& bin = scene.bins[static_cast<std::size_t>(so.bin)];
      const Aabb interior = bin.interior_aabb();
      const Aabb bb0 = geom::world_aabb(obj.spec.shape, obj.pose);
      const double hx = 0.5 * (bb0.max.x() - bb0.min.x());
      const double hy = 0.5 * (bb0.max.y() - bb0.min.y());
      const double hz = 0.5 * (bb0.max.z() - bb0.min.z());

      if (!so.stack_on.empty() && k == 0) {
        const ObjectInstance* base = world.find(so.stack_on);
        if (!base)
          throw SimError(SimError::Code::ScenarioInfeasible,
                         "stack_on target '" + so.stack_on + "' not placed yet");
        const Aabb bbb = geom::world_aabb(base->spec.shape, base->pose);
        obj.pose.translation =
            Vec3(base->pose.translation.x() + uniform_range(world.rng_engine, -0.005, 0.005),
                 base->pose.translation.y() + uniform_range(world.rng_engine, -0.005, 0.005),
                 bbb.max.z() + hz);
        world.objects.push_back(obj);
        continue;
      }

      const double xmin = interior.min.x() + hx + 0.005;
      const double xmax = interior.max.x() - hx - 0.005;
      const double ymin = interior.min.y() + hy + 0.005;
      const double ymax = interior.max.y() - hy - 0.005;
      if (xmin >= xmax || ymin >= ymax)
        throw SimError(SimError::Code::ScenarioInfeasible,
                       "object '" + obj.id + "' does not fit bin '" + bin.name + "'");

      bool placed = false;
      for (int attempt = 0; attempt < 300 && !placed; ++attempt) {
        obj.pose.translation = Vec3(uniform_range(world.rng_engine, xmin, xmax),
                                    uniform_range(world.rng_engine, ymin, ymax),
                                    bin.floor_center.z() + hz);
        const Rect mine = footprint(obj, 0.01);
        placed = true;
        for (const auto& other : world.objects) {
          if (other.home_bin != so.bin) continue;
          if (mine.overlaps(footprint(other))) {
            placed = false;
            break;
          }
        }
      }
      if (!placed)
        throw SimError(SimError::Code::ScenarioInfeasible,
                       "could not scatter '" + obj.id + "' without overlap");
      world.objects.push_back(obj);
    }
  }
  return world;
}

namespace {

// Graspable feature distance from the grasp center, per category.
double feature_distance(const ObjectInstance& obj, const Vec3& grasp_center) {
  using skills::ObjectCategory;
  const auto& shape = obj.spec.shape;
  switch (obj.spec.category) {
    case ObjectCategory::cylinder: {
      const Vec3 axis = obj.pose.matrix().col(2);
      const Vec3 lo = obj.pose.translation - 0.5 * shape.height * axis;
      const Vec3 d = grasp_center - lo;
      const double t = std::clamp(d.dot(axis), 0.0, shape.height);
      return (grasp_center - (lo + t * axis)).norm();
    }
    case ObjectCategory::deformable: {
      // Nearest point on the sheet's mid-plane boundary ring.
      const Vec3 local = inverse(obj.pose).apply(grasp_center);
      const double hx = 0.5 * shape.extents.x();
      const double hy = 0.5 * shape.extents.y();
      const double cx = std::clamp(local.x(), -hx, hx);
      const double cy = std::clamp(local.y(), -hy, hy);
      // Push the clamped point to the nearest edge of the rectangle.
      const double dx = hx - std::abs(cx);
      const double dy = hy - std::abs(cy);
      Vec3 edge(cx, cy, 0.0);
      if (dx < dy)
        edge.x() = cx >= 0 ? hx : -hx;
      else
        edge.y() = cy >= 0 ? hy : -hy;
      return (local - edge).norm();
    }
    case ObjectCategory::cuboid_large:
    case ObjectCategory::cone:
    case ObjectCategory::flat_large:
    case ObjectCategory::stacked:
      // Two-arm categories grasp the surface (corners, rims, edges).
      return geom::surface_distance(shape, inverse(obj.pose).apply(grasp_center));
    default:
      return (grasp_center - obj.pose.translation).norm();
  }
}

bool is_dual_category(skills::ObjectCategory c) {
  using skills::ObjectCategory;
  return c == ObjectCategory::cuboid_large || c == ObjectCategory::cone ||
         c == ObjectCategory::flat_large || c == ObjectCategory::stacked;
}

void attach_object(WorldState& world, ObjectInstance& obj, ArmSide arm, const Pose& tcp,
                   double close_width) {
  obj.status = ObjectStatus::grasped;
  obj.grasped_by = arm == ArmSide::left ? 0 : 1;
  Pose offset = compose(inverse(tcp), obj.pose);
  if (world.noise.pose_jitter_rad > 0.0 || world.noise.pose_jitter_m > 0.0) {
    auto& eng = world.rng_engine;
    const Vec3 axis = Vec3(uniform_range(eng, -1, 1), uniform_range(eng, -1, 1),
                           uniform_range(eng, -1, 1))
                          .normalized();
    const double ang = uniform_range(eng, -world.noise.pose_jitter_rad, world.noise.pose_jitter_rad);
    const Vec3 dt(uniform_range(eng, -world.noise.pose_jitter_m, world.noise.pose_jitter_m),
                  uniform_range(eng, -world.noise.pose_jitter_m, world.noise.pose_jitter_m),
                  uniform_range(eng, -world.noise.pose_jitter_m, world.noise.pose_jitter_m));
    offset = compose(offset, Pose::from_axis_angle(axis, ang, dt));
  }
  obj.grasp_offset = offset;
  obj.grasp_tcp_z = tcp.translation.z();
  auto& gripper = world.grippers[obj.grasped_by];
  gripper.attached = obj.id;
  gripper.opening = close_width;
}

}  // namespace

GraspOutcome attempt_grasp(WorldState& world, const motion::DualArmModel& models, ArmSide arm,
                           double close_width, double pick_radius) {
  GraspOutcome out;
  auto& gripper = world.grippers[arm == ArmSide::left ? 0 : 1];
  if (!gripper.attached.empty()) {
    out.reason = "already_holding";
    return out;
  }
  const Pose tcp = tcp_pose(world, models, arm);
  const Vec3 center = tcp.translation;
  const Vec3 closing_axis = tcp.matrix().col(1);

  ObjectInstance* best = nullptr;
  double best_d = pick_radius;
  for (auto& obj : world.objects) {
    if (obj.status != ObjectStatus::in_bin && obj.status != ObjectStatus::dropped) continue;
    const double d = feature_distance(obj, center);
    if (d <= best_d) {
      best_d = d;
      best = &obj;
    }
  }
  if (!best) {
    out.reason = "nothing_in_reach";
    return out;
  }

  const double width = geom::support_width(best->spec.shape, best->pose, closing_axis);
  if (width > gripper.max_opening + 1e-9 || width < close_width - 0.005) {
    out.reason = "width";
    return out;
  }

  bool slipped = false;
  if (best->spec.slippery && world.noise.slip_probability > 0.0) {
    slipped = uniform01(world.rng_engine) < world.noise.slip_probability;
  }
  attach_object(world, *best, arm, tcp, close_width);
  best->slip_pending = slipped;
  out.instance = best->id;
  out.slipped = slipped;
  out.success = !slipped;
  out.reason = slipped ? "slip" : "attached";
  return out;
}

namespace {

// Both arms closing at the same step near the same two-arm object: corner
// pinch, no width constraint, grasp centers must straddle the centroid.
bool try_dual_grasp(WorldState& world, const motion::DualArmModel& models, double close_width,
                    double pick_radius) {
  if (!world.grippers[0].attached.empty() || !world.grippers[1].attached.empty()) return false;
  const Pose tcp_l = tcp_pose(world, models, ArmSide::left);
  const Pose tcp_r = tcp_pose(world, models, ArmSide::right);

  ObjectInstance* best = nullptr;
  double best_sum = 2.0 * pick_radius;
  for (auto& obj : world.objects) {
    if (obj.status != ObjectStatus::in_bin && obj.status != ObjectStatus::dropped) continue;
    if (!is_dual_category(obj.spec.category)) continue;
    const double dl = feature_distance(obj, tcp_l.translation);
    const double dr = feature_distance(obj, tcp_r.translation);
    if (dl > pick_radius || dr > pick_radius) continue;
    const Vec3 u = tcp_l.translation - obj.pose.translation;
    const Vec3 v = tcp_r.translation - obj.pose.translation;
    if (Eigen::Vector2d(u.x(), u.y()).dot(Eigen::Vector2d(v.x(), v.y())) >= 0.0) continue;
    if (dl + dr < best_sum) {
      best_sum = dl + dr;
      best = &obj;
    }
  }
  if (!best) return false;

  bool slipped = false;
  if (best->spec.slippery && world.noise.slip_probability > 0.0)
    slipped = uniform01(world.rng_engine) < world.noise.slip_probability;

  attach_object(world, *best, ArmSide::left, tcp_l, close_width);
  best->slip_pending = slipped;
  world.grippers[1].attached = best->id;  // assisting arm
  world.grippers[1].opening = close_width;
  return true;
}

void drop_attached(WorldState& world, ArmSide arm, bool force_dropped) {
  auto& gripper = world.grippers[arm == ArmSide::left ? 0 : 1];
  if (gripper.attached.empty()) return;
  ObjectInstance* obj = world.find(gripper.attached);
  if (obj) {
    detach(world, *obj);
    settle_object(world, *obj, force_dropped);
  }
}

}  // namespace

void release(WorldState& world, const motion::DualArmModel& models, ArmSide arm) {
  (void)models;
  drop_attached(world, arm, false);
  auto& gripper = world.grippers[arm == ArmSide::left ? 0 : 1];
  gripper.opening = gripper.max_opening;
}

void apply_path(WorldState& world, const motion::DualArmModel& models,
                const motion::JointPath& path, double pick_radius) {
  if (path.configs.empty()) return;
  if (!path.configs.front().approx_equal(world.arms, 1e-6))
    throw SimError(SimError::Code::DesyncError,
                   "path does not start at the current arm configuration");

  std::map<std::size_t, std::vector<motion::GripperEvent>> events;
  for (const auto& ev : path.gripper_events) events[ev.config_index].push_back(ev);
  std::map<std::size_t, std::vector<motion::WaypointMark>> marks;
  for (const auto& mk : path.waypoint_marks) marks[mk.config_index].push_back(mk);

  for (std::size_t i = 0; i < path.configs.size(); ++i) {
    if (i > 0) {
      const double dl = (path.configs[i].left - path.configs[i - 1].left).lpNorm<Eigen::Infinity>();
      const double dr =
          (path.configs[i].right - path.configs[i - 1].right).lpNorm<Eigen::Infinity>();
      world.clock += std::max(dl, dr);  // 1 s per radian of composite motion
    }
    world.arms = path.configs[i];

    // Attached objects track their grippers rigidly; slip drops fire once the
    // gripper has risen clear of the grasp height.
    for (int g = 0; g < 2; ++g) {
      if (world.grippers[g].attached.empty()) continue;
      ObjectInstance* obj = world.find(world.grippers[g].attached);
      if (!obj || obj->grasped_by != g) continue;
      const Pose tcp = tcp_pose(world, models, g == 0 ? ArmSide::left : ArmSide::right);
      obj->pose = compose(tcp, obj->grasp_offset);
      if (obj->slip_pending && tcp.translation.z() - obj->grasp_tcp_z > 0.04) {
        const ArmSide side = g == 0 ? ArmSide::left : ArmSide::right;
        drop_attached(world, side, /*force_dropped=*/true);
      }
    }

    // Seal pushes: a marked push waypoint reached near the flap edge closes it.
    if (auto it = marks.find(i); it != marks.end()) {
      for (const auto& mk : it->second) {
        if (mk.note.rfind("push_flap:", 0) != 0) continue;
        const int flap = std::stoi(mk.note.substr(10));
        if (flap < 0 || flap > 3) continue;
        const Vec3 push = world.box.flap_push_point(flap);
        const double dl = (tcp_pose(world, models, ArmSide::left).translation - push).norm();
        const double dr = (tcp_pose(world, models, ArmSide::right).translation - push).norm();
        if (std::min(dl, dr) < 0.05) world.box.flap_closed[static_cast<std::size_t>(flap)] = true;
      }
    }

    if (auto it = events.find(i); it != events.end()) {
      const auto& evs = it->second;
      const bool left_close = std::any_of(evs.begin(), evs.end(), [](const auto& e) {
        return e.arm == ArmSide::left && e.action.move == motion::GripperMove::close;
      });
      const bool right_close = std::any_of(evs.begin(), evs.end(), [](const auto& e) {
        return e.arm == ArmSide::right && e.action.move == motion::GripperMove::close;
      });

      for (const auto& ev : evs) {
        if (ev.action.move == motion::GripperMove::open) {
          release(world, models, ev.arm);
        }
      }
      if (left_close && right_close) {
        const double w = evs.front().action.width;
        if (!try_dual_grasp(world, models, w, pick_radius)) {
          attempt_grasp(world, models, ArmSide::left, w, pick_radius);
          attempt_grasp(world, models, ArmSide::right, w, pick_radius);
        }
      } else {
        for (const auto& ev : evs) {
          if (ev.action.move == motion::GripperMove::close)
            attempt_grasp(world, models, ev.arm, ev.action.width, pick_radius);
        }
      }
    }
  }
}

void perturb_bin(WorldState& world, std::size_t bin_index, std::uint64_t seed) {
  if (bin_index >= world.bins.size()) return;
  const BinGeometry& bin = world.bins[bin_index];
  const Aabb interior = bin.interior_aabb();
  std::mt19937_64 eng(seed);

  std::vector<ObjectInstance*> inside;
  for (auto& obj : world.objects) {
    if (obj.status != ObjectStatus::in_bin && obj.status != ObjectStatus::dropped) continue;
    const Vec3& p = obj.pose.translation;
    if (p.x() >= interior.min.x() && p.x() <= interior.max.x() && p.y() >= interior.min.y() &&
        p.y() <= interior.max.y())
      inside.push_back(&obj);
  }

  for (ObjectInstance* obj : inside) {
    for (int attempt = 0; attempt < 100; ++attempt) {
      const double r = 0.03 * std::sqrt(uniform01(eng));
      const double phi = uniform_range(eng, 0.0, 2.0 * M_PI);
      const double yaw = uniform_range(eng, -M_PI / 6.0, M_PI / 6.0);
      ObjectInstance candidate = *obj;
      candidate.pose.translation.x() += r * std::cos(phi);
      candidate.pose.translation.y() += r * std::sin(phi);
      candidate.pose.rotation =
          (geom::Quat(Eigen::AngleAxisd(yaw, Vec3::UnitZ())) * candidate.pose.rotation)
              .normalized();
      const Rect fp = footprint(candidate);
      if (fp.xmin >= interior.min.x() && fp.xmax <= interior.max.x() &&
          fp.ymin >= interior.min.y() && fp.ymax <= interior.max.y()) {
        obj->pose = candidate.pose;
        break;
      }
    }
  }

  // Re-settle bottom-up so stacks break apart or re-form consistently.
  std::sort(inside.begin(), inside.end(), [](const ObjectInstance* a, const ObjectInstance* b) {
    return a->pose.translation.z() < b->pose.translation.z();
  });
  std::vector<ObjectInstance*> settled;
  for (ObjectInstance* obj : inside) {
    const double hz = half_height(*obj);
    double rest = bin.floor_center.z();
    const Rect mine = footprint(*obj);
    for (const ObjectInstance* other : settled) {
      if (mine.overlaps(footprint(*other))) {
        const Aabb bb = geom::world_aabb(other->spec.shape, other->pose);
        rest = std::max(rest, bb.max.z());
      }
    }
    obj->pose.translation.z() = rest + hz;
    settled.push_back(obj);
  }
}

void apply_hold(WorldState& world, const motion::HoldCommand& cmd) { world.clock += cmd.seconds; }

std::uint64_t state_hash(const WorldState& world) {
  Fnv1a h;
  auto put_pose = [&](const Pose& p) {
    h.put_double(p.rotation.w());
    h.put_double(p.rotation.x());
    h.put_double(p.rotation.y());
    h.put_double(p.rotation.z());
    h.put_double(p.translation.x());
    h.put_double(p.translation.y());
    h.put_double(p.translation.z());
  };
  auto put_vec = [&](const Vec3& v) {
    h.put_double(v.x());
    h.put_double(v.y());
    h.put_double(v.z());
  };

  h.put_double(world.clock);
  h.put_double(world.table_z);

  std::vector<const ObjectInstance*> ordered;
  for (const auto& o : world.objects) ordered.push_back(&o);
  std::sort(ordered.begin(), ordered.end(),
            [](const ObjectInstance* a, const ObjectInstance* b) { return a->id < b->id; });
  h.put_u64(ordered.size());
  for (const ObjectInstance* o : ordered) {
    h.put_string(o->id);
    h.put_string(o->spec.name);
    h.put_i64(static_cast<int>(o->spec.category));
    put_pose(o->pose);
    h.put_i64(static_cast<int>(o->status));
    h.put_i64(o->grasped_by);
    put_pose(o->grasp_offset);
    h.put_i64(o->slip_pending ? 1 : 0);
    h.put_i64(o->home_bin);
  }

  h.put_u64(world.bins.size());
  for (const auto& b : world.bins) {
    h.put_string(b.name);
    put_vec(b.floor_center);
    put_vec(b.interior);
    h.put_double(b.wall_thickness);
  }
  h.put_string(world.box.body.name);
  put_vec(world.box.body.floor_center);
  put_vec(world.box.body.interior);
  for (bool f : world.box.flap_closed) h.put_i64(f ? 1 : 0);

  for (int i = 0; i < world.arms.left.size(); ++i) h.put_double(world.arms.left[i]);
  for (int i = 0; i < world.arms.right.size(); ++i) h.put_double(world.arms.right[i]);
  for (const auto& g : world.grippers) {
    h.put_double(g.opening);
    h.put_double(g.max_opening);
    h.put_string(g.attached);
  }

  std::ostringstream rng_text;
  rng_text << world.rng_engine;
  h.put_string(rng_text.str());
  return h.value();
}

motion::CollisionWorld build_collision_world(const WorldState& world,
                                             const std::string& exclude_instance,
                                             bool include_objects) {
  motion::CollisionWorld cw;
  cw.add_box_obstacle("table",
                      {Vec3(-1.5, -1.5, world.table_z - 0.04), Vec3(1.5, 1.5, world.table_z)});
  for (const auto& bin : world.bins)
    for (const auto& [name, box] : bin.solid_parts()) cw.add_box_obstacle(name, box);
  for (const auto& [name, box] : world.box.body.solid_parts()) cw.add_box_obstacle(name, box);
  if (include_objects) {
    for (const auto& obj : world.objects) {
      if (obj.id == exclude_instance || obj.status == ObjectStatus::grasped) continue;
      cw.add_shape_obstacle("obj:" + obj.id, obj.spec.shape, obj.pose);
    }
  }
  return cw;
}

}  // namespace packbot::sim
