#pragma once

#include "packbot/geometry/point_cloud.hpp"
#include "packbot/geometry/shapes.hpp"

#include <stdexcept>
#include <vector>

namespace packbot::percept {

class DegenerateCloud : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IcpParams {
  int max_iterations = 50;
  double convergence_tol = 1e-6;   // meters of RMS change
  double accept_residual = 0.008;  // meters
  double upright_threshold_deg = 15.0;
  int model_points = 2000;
  std::uint64_t model_seed = 0xC10DD5EEDULL;
};

struct IcpResult {
  geom::Pose pose;        // model frame -> observation frame
  double residual = 0.0;  // RMS point-to-model distance, meters
  bool converged = false;
  int best_start = -1;
  std::vector<double> residual_history;  // winning start, per iteration
};

/// Point-to-point ICP with nearest-neighbor correspondences against a sampled
/// model cloud, run from `initial_guesses` rotations (the chiral octahedral
/// set, then deterministic extras) with the translation initialized at the
/// observed centroid; the lowest-residual estimate wins. Throws
/// DegenerateCloud when the observed points are coincident or colinear.
IcpResult icp_register(const geom::PointCloud& observed, const geom::ShapePrimitive& model,
                       int initial_guesses, const IcpParams& params = {});

/// The 24 rotation matrices of the chiral octahedral group, identity first.
/// Used for multi-start seeding and for symmetry-aware error metrics.
std::vector<geom::Mat3> octahedral_rotations();

}  // namespace packbot::percept
