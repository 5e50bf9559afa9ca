#pragma once

#include "packbot/perception/icp.hpp"
#include "packbot/perception/segmentation.hpp"
#include "packbot/skills/types.hpp"

#include <optional>
#include <vector>

namespace packbot::percept {

struct PoseEstimate {
  geom::Pose pose;
  double residual = 0.0;  // RMS point-to-model distance, meters
  std::optional<bool> upright;  // present iff the category declares the flag
  bool converged = false;
};

enum class DetectStatus { ok, not_found, degenerate, no_edges };

struct DetectParams {
  IcpParams icp;
  int initial_guesses = 24;
  std::optional<geom::Aabb> region;  // restrict candidate instances (e.g. one bin)
  double pick_radius = 0.04;         // detect_pick alignment gate
  double edge_angle_tol_deg = 20.0;  // boundary polyline split tolerance
  double min_edge_length = 0.05;     // meters
};

struct RigidDetection {
  DetectStatus status = DetectStatus::not_found;
  PoseEstimate estimate;
  std::string instance;  // which instance cloud was used
};

/// Pose of a rigid object from its segmented cloud: ICP for shapes with a
/// model, least-squares center fit with identity rotation for spheres
/// (position-only representation). not_found when no instance matches.
RigidDetection detect_rigid(const SegmentedCloud& seg, const skills::ObjectSpec& object,
                            const DetectParams& params = {});

/// Edge-grasp candidate on a deformable item's boundary.
struct EdgeCandidate {
  geom::Vec3 grasp_point = geom::Vec3::Zero();
  geom::Vec3 approach_direction = geom::Vec3::UnitX();  // unit, horizontal-ish, inward
  geom::Vec3 edge_tangent = geom::Vec3::UnitY();        // unit, orthogonal to approach
  double score = 0.0;                                   // length x clearance
};

struct DeformableDetection {
  DetectStatus status = DetectStatus::not_found;
  std::vector<EdgeCandidate> candidates;  // sorted, best first
  std::string instance;
};

/// Boundary extraction on the projected cloud, split into straight-ish edges,
/// each scored by length times clearance to the nearest other-instance point.
DeformableDetection detect_deformable(const SegmentedCloud& seg, const skills::ObjectSpec& object,
                                      const DetectParams& params = {});

enum class PickReason { aligned, object_absent, misaligned };

std::string to_string(PickReason r);

struct PickVerdict {
  bool success = false;
  double gripper_object_offset = std::numeric_limits<double>::infinity();
  PickReason reason = PickReason::object_absent;
};

/// Pick verification by spatial alignment: the perceived centroid of the
/// object must lie within pick_radius of the gripper's grasp center.
PickVerdict detect_pick(const geom::Pose& gripper, const SegmentedCloud& seg,
                        const skills::ObjectSpec& object, const DetectParams& params = {});

/// Least-squares sphere center (algebraic fit refined with fixed radius);
/// exposed for tests that need an independent oracle path.
geom::Vec3 fit_sphere_center(const geom::PointCloud& cloud, double radius);

}  // namespace packbot::percept
