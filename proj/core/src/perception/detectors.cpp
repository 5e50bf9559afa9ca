#include "packbot/perception/detectors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace packbot::percept {

using geom::Mat3;
using geom::Pose;
using geom::Vec3;

namespace {

bool id_matches(const std::string& id, const std::string& object_name) {
  if (id == object_name) return true;
  return id.size() > object_name.size() + 1 &&
         id.compare(0, object_name.size(), object_name) == 0 && id[object_name.size()] == '_';
}

// Largest matching instance cloud, optionally restricted to a region.
const geom::PointCloud* pick_instance(const SegmentedCloud& seg, const std::string& name,
                                      const std::optional<geom::Aabb>& region,
                                      std::string& id_out) {
  const geom::PointCloud* best = nullptr;
  for (const auto& [id, cloud] : seg.instances) {
    if (!id_matches(id, name)) continue;
    if (region && !region->contains(geom::centroid(cloud))) continue;
    if (!best || cloud.size() > best->size()) {
      best = &cloud;
      id_out = id;
    }
  }
  return best;
}

}  // namespace

geom::Vec3 fit_sphere_center(const geom::PointCloud& cloud, double radius) {
  // Algebraic initialization: |p|^2 = 2 p . c + (r^2 - |c|^2), linear in (c, k).
  const auto n = static_cast<Eigen::Index>(cloud.size());
  Eigen::MatrixXd a(n, 4);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec3& p = cloud.points[static_cast<std::size_t>(i)];
    a(i, 0) = 2.0 * p.x();
    a(i, 1) = 2.0 * p.y();
    a(i, 2) = 2.0 * p.z();
    a(i, 3) = 1.0;
    b(i) = p.squaredNorm();
  }
  const Eigen::Vector4d sol = a.colPivHouseholderQr().solve(b);
  Vec3 c = sol.head<3>();

  // Gauss-Newton with the known radius tightens partial-view fits.
  for (int iter = 0; iter < 12; ++iter) {
    Mat3 jtj = Mat3::Zero();
    Vec3 jtr = Vec3::Zero();
    for (const Vec3& p : cloud.points) {
      const Vec3 d = c - p;
      const double dist = d.norm();
      if (dist < 1e-12) continue;
      const Vec3 j = d / dist;
      const double r = dist - radius;
      jtj += j * j.transpose();
      jtr += j * r;
    }
    const Vec3 step = (jtj + 1e-9 * Mat3::Identity()).ldlt().solve(jtr);
    c -= step;
    if (step.norm() < 1e-10) break;
  }
  return c;
}

RigidDetection detect_rigid(const SegmentedCloud& seg, const skills::ObjectSpec& object,
                            const DetectParams& params) {
  RigidDetection out;
  if (object.rigidity != skills::Rigidity::rigid) return out;

  const geom::PointCloud* cloud = pick_instance(seg, object.name, params.region, out.instance);
  if (!cloud) {
    out.status = DetectStatus::not_found;
    return out;
  }

  if (object.category == skills::ObjectCategory::sphere) {
    // Position-only representation: least-squares center, identity rotation.
    const Vec3 c = fit_sphere_center(*cloud, object.shape.radius);
    double sum_sq = 0.0;
    for (const Vec3& p : cloud->points) {
      const double r = (p - c).norm() - object.shape.radius;
      sum_sq += r * r;
    }
    out.estimate.pose = Pose::from_translation(c);
    out.estimate.residual = std::sqrt(sum_sq / static_cast<double>(cloud->size()));
    out.estimate.converged = out.estimate.residual < params.icp.accept_residual;
    out.status = DetectStatus::ok;
    return out;
  }

  try {
    const IcpResult icp = icp_register(*cloud, object.shape, params.initial_guesses, params.icp);
    out.estimate.pose = icp.pose;
    out.estimate.residual = icp.residual;
    out.estimate.converged = icp.converged;
  } catch (const DegenerateCloud&) {
    out.status = DetectStatus::degenerate;
    return out;
  }

  if (object.perceptive_features.count(skills::PerceptiveFeature::upright_flag)) {
    const double tilt = geom::axis_tilt(out.estimate.pose, Vec3::UnitZ());
    // Axial symmetry makes tilt flip-invariant; a flipped registration of a
    // cylinder reports pi - tilt for the same physical lean.
    const double canonical = std::min(tilt, M_PI - tilt);
    out.estimate.upright = canonical <= geom::deg_to_rad(params.icp.upright_threshold_deg);
  }
  out.status = DetectStatus::ok;
  return out;
}

namespace {

struct Projected {
  Vec3 origin;
  Vec3 e1, e2;  // in-plane basis
  std::vector<Eigen::Vector2d> uv;

  Vec3 lift(const Eigen::Vector2d& p) const { return origin + p.x() * e1 + p.y() * e2; }
  Vec3 lift_dir(const Eigen::Vector2d& d) const { return (d.x() * e1 + d.y() * e2).normalized(); }
};

Projected project_to_principal_plane(const geom::PointCloud& cloud) {
  Projected out;
  Vec3 mean = Vec3::Zero();
  for (const Vec3& p : cloud.points) mean += p;
  mean /= static_cast<double>(cloud.size());
  Mat3 cov = Mat3::Zero();
  for (const Vec3& p : cloud.points) cov += (p - mean) * (p - mean).transpose();
  Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
  out.origin = mean;
  out.e1 = eig.eigenvectors().col(2);  // largest
  out.e2 = eig.eigenvectors().col(1);
  out.uv.reserve(cloud.size());
  for (const Vec3& p : cloud.points)
    out.uv.emplace_back((p - mean).dot(out.e1), (p - mean).dot(out.e2));
  return out;
}

double median_nn_spacing(const std::vector<Eigen::Vector2d>& uv) {
  std::vector<double> nn(uv.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < uv.size(); ++i) {
    for (std::size_t j = 0; j < uv.size(); ++j) {
      if (i == j) continue;
      nn[i] = std::min(nn[i], (uv[i] - uv[j]).squaredNorm());
    }
  }
  for (double& d : nn) d = std::sqrt(d);
  std::nth_element(nn.begin(), nn.begin() + static_cast<long>(nn.size() / 2), nn.end());
  return nn[nn.size() / 2];
}

// A point is on the boundary when its in-radius neighbors leave an angular
// gap wider than ~100 degrees.
std::vector<std::size_t> boundary_points(const std::vector<Eigen::Vector2d>& uv, double radius) {
  std::vector<std::size_t> out;
  const double r2 = radius * radius;
  for (std::size_t i = 0; i < uv.size(); ++i) {
    std::vector<double> angles;
    for (std::size_t j = 0; j < uv.size(); ++j) {
      if (i == j) continue;
      const Eigen::Vector2d d = uv[j] - uv[i];
      if (d.squaredNorm() > r2) continue;
      angles.push_back(std::atan2(d.y(), d.x()));
    }
    if (angles.size() < 2) {
      out.push_back(i);
      continue;
    }
    std::sort(angles.begin(), angles.end());
    double max_gap = 2.0 * M_PI - (angles.back() - angles.front());
    for (std::size_t k = 1; k < angles.size(); ++k)
      max_gap = std::max(max_gap, angles[k] - angles[k - 1]);
    if (max_gap > geom::deg_to_rad(100.0)) out.push_back(i);
  }
  return out;
}

// Greedy nearest-neighbor walk over the boundary points.
std::vector<std::size_t> order_loop(const std::vector<Eigen::Vector2d>& uv,
                                    std::vector<std::size_t> boundary) {
  std::vector<std::size_t> loop;
  if (boundary.empty()) return loop;
  std::size_t current = 0;
  for (std::size_t k = 1; k < boundary.size(); ++k)
    if (uv[boundary[k]].x() < uv[boundary[current]].x()) current = k;
  loop.push_back(boundary[current]);
  boundary.erase(boundary.begin() + static_cast<long>(current));
  while (!boundary.empty()) {
    const Eigen::Vector2d& here = uv[loop.back()];
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < boundary.size(); ++k) {
      const double d = (uv[boundary[k]] - here).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    loop.push_back(boundary[best]);
    boundary.erase(boundary.begin() + static_cast<long>(best));
  }
  return loop;
}

struct EdgeSegment {
  Eigen::Vector2d start, end;
  double length = 0.0;
};

std::vector<EdgeSegment> split_edges(const std::vector<Eigen::Vector2d>& uv,
                                     const std::vector<std::size_t>& loop, double angle_tol_rad,
                                     double min_length) {
  std::vector<EdgeSegment> edges;
  if (loop.size() < 3) return edges;
  std::size_t start = 0;
  Eigen::Vector2d dir = Eigen::Vector2d::Zero();
  for (std::size_t k = 1; k <= loop.size(); ++k) {
    const Eigen::Vector2d a = uv[loop[start]];
    const Eigen::Vector2d b = uv[loop[k % loop.size()]];
    const Eigen::Vector2d chord = b - a;
    if (chord.norm() < 1e-9) continue;
    const Eigen::Vector2d chord_dir = chord.normalized();
    if (dir.isZero()) {
      dir = chord_dir;
      continue;
    }
    const double dev = std::acos(std::clamp(dir.dot(chord_dir), -1.0, 1.0));
    const bool wrap = k == loop.size();
    if (dev > angle_tol_rad || wrap) {
      const Eigen::Vector2d seg_end = uv[loop[(k - 1) % loop.size()]];
      const double len = (seg_end - a).norm();
      if (len >= min_length) edges.push_back({a, seg_end, len});
      start = (k - 1) % loop.size();
      dir = Eigen::Vector2d::Zero();
      if (wrap) break;
    } else {
      dir = chord.normalized();
    }
  }
  return edges;
}

}  // namespace

DeformableDetection detect_deformable(const SegmentedCloud& seg,
                                      const skills::ObjectSpec& object,
                                      const DetectParams& params) {
  DeformableDetection out;
  if (object.rigidity != skills::Rigidity::deformable) return out;

  const geom::PointCloud* cloud = pick_instance(seg, object.name, params.region, out.instance);
  if (!cloud) {
    out.status = DetectStatus::not_found;
    return out;
  }
  if (cloud->size() < 12) {
    out.status = DetectStatus::no_edges;
    return out;
  }

  const Projected proj = project_to_principal_plane(*cloud);
  const double spacing = median_nn_spacing(proj.uv);
  const auto boundary = boundary_points(proj.uv, 2.0 * spacing);
  if (boundary.size() < 8) {
    out.status = DetectStatus::no_edges;
    return out;
  }
  const auto loop = order_loop(proj.uv, boundary);
  const auto edges = split_edges(proj.uv, loop, geom::deg_to_rad(params.edge_angle_tol_deg),
                                 params.min_edge_length);
  if (edges.empty()) {
    out.status = DetectStatus::no_edges;
    return out;
  }

  // Clearance pool: every point belonging to any other instance.
  std::vector<Vec3> others;
  for (const auto& [id, c] : seg.instances) {
    if (id == out.instance) continue;
    others.insert(others.end(), c.points.begin(), c.points.end());
  }

  const Vec3 cloud_center = geom::centroid(*cloud);
  for (const EdgeSegment& edge : edges) {
    EdgeCandidate cand;
    const Eigen::Vector2d mid2 = 0.5 * (edge.start + edge.end);
    cand.grasp_point = proj.lift(mid2);
    cand.edge_tangent = proj.lift_dir(edge.end - edge.start);

    Vec3 inward = cloud_center - cand.grasp_point;
    inward -= inward.dot(cand.edge_tangent) * cand.edge_tangent;
    if (inward.norm() < 1e-9) continue;
    cand.approach_direction = inward.normalized();

    double clearance = 0.30;  // open space cap
    for (const Vec3& q : others)
      clearance = std::min(clearance, (q - cand.grasp_point).norm());
    cand.score = edge.length * clearance;
    out.candidates.push_back(cand);
  }
  if (out.candidates.empty()) {
    out.status = DetectStatus::no_edges;
    return out;
  }
  std::sort(out.candidates.begin(), out.candidates.end(),
            [](const EdgeCandidate& a, const EdgeCandidate& b) { return a.score > b.score; });
  out.status = DetectStatus::ok;
  return out;
}

std::string to_string(PickReason r) {
  switch (r) {
    case PickReason::aligned: return "aligned";
    case PickReason::object_absent: return "object_absent";
    case PickReason::misaligned: return "misaligned";
  }
  return "?";
}

PickVerdict detect_pick(const geom::Pose& gripper, const SegmentedCloud& seg,
                        const skills::ObjectSpec& object, const DetectParams& params) {
  PickVerdict out;
  const Vec3 grasp_center = gripper.translation;

  // The instance nearest the gripper is the one whose pick we are verifying.
  const geom::PointCloud* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& [id, cloud] : seg.instances) {
    if (!id_matches(id, object.name)) continue;
    const double d = (geom::centroid(cloud) - grasp_center).norm();
    if (d < best_d) {
      best_d = d;
      best = &cloud;
    }
  }
  if (!best) {
    out.reason = PickReason::object_absent;
    return out;
  }
  out.gripper_object_offset = best_d;
  if (best_d <= params.pick_radius) {
    out.success = true;
    out.reason = PickReason::aligned;
  } else {
    out.reason = PickReason::misaligned;
  }
  return out;
}

}  // namespace packbot::percept
