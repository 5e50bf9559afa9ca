#pragma once

#include "packbot/motion/collision.hpp"
#include "packbot/motion/waypoints.hpp"

#include <cstdint>

namespace packbot::motion {

struct RrtParams {
  double step = 0.1;        // extension step, infinity norm, radians
  double check_res = 0.02;  // edge validation resolution, radians
  int max_iters = 5000;
  int shortcut_iters = 80;
  // Extra distance demanded at sampled configs so the continuous path stays
  // clear of the margin between samples.
  double validation_slack = 0.005;
};

enum class PlanStatus { ok, no_path };

struct PlanResult {
  PlanStatus status = PlanStatus::no_path;
  JointPath path;
  int iterations = 0;
};

/// Bidirectional RRT-Connect in the composite (left + right) joint space.
/// Deterministic for a fixed seed; the returned path is shortcut-smoothed,
/// re-discretized to the step bound, and edge-validated at check_res.
/// Throws std::invalid_argument when start or goal is in collision or out of
/// limits.
PlanResult rrt_connect(const CollisionWorld& world, const DualArmModel& models,
                       const DualConfig& start, const DualConfig& goal, const RrtParams& params,
                       std::uint64_t seed);

/// Straight-line edge validity at the given resolution (with slack applied at
/// interior samples).
bool edge_valid(const CollisionWorld& world, const DualArmModel& models, const DualConfig& a,
                const DualConfig& b, const RrtParams& params);

}  // namespace packbot::motion
