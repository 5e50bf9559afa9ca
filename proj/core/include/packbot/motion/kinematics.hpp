#pragma once

#include "packbot/motion/arm_model.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace packbot::motion {

class JointLimitError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct FkResult {
  geom::Pose tcp;
  std::vector<geom::Pose> joint_frames;  // frame after each joint's rotation
};

/// Deterministic end-effector pose; joint frames are exposed for collision
/// checks and Jacobians. Throws JointLimitError when q is out of range
/// (limits inclusive).
FkResult forward_kinematics_full(const ArmModel& arm, const JointVector& q);

geom::Pose forward_kinematics(const ArmModel& arm, const JointVector& q);

struct IkParams {
  double pos_tol = 1e-3;         // meters
  double rot_tol_rad = 0.5 * M_PI / 180.0;
  int max_iters = 120;
  double damping = 0.05;
  double max_step = 0.35;        // per-iteration joint step bound, radians
  int restarts = 12;
  std::uint64_t seed = 0x1C0FFEEULL;
};

/// Damped-least-squares IK from seed_config plus seeded random restarts.
/// Returns the first solution within tolerance and joint limits, preferring
/// basins near the seed (the seed attempt always runs first); nullopt when
/// every attempt fails (unreachable target).
std::optional<JointVector> solve_ik(const ArmModel& arm, const geom::Pose& target,
                                    const JointVector& seed_config, const IkParams& params = {});

/// Pose error used by the IK loop: translation delta and rotation-vector
/// magnitude of target relative to actual.
std::pair<double, double> pose_error(const geom::Pose& target, const geom::Pose& actual);

}  // namespace packbot::motion
