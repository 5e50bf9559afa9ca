#pragma once

#include "packbot/geometry/pose.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace packbot::motion {

using JointVector = Eigen::VectorXd;

/// One revolute joint: a fixed translation from the parent frame followed by a
/// rotation about `axis`.
struct JointSpec {
  std::string name;
  geom::Vec3 offset = geom::Vec3::Zero();
  geom::Vec3 axis = geom::Vec3::UnitZ();
  double min_rad = -M_PI;
  double max_rad = M_PI;
};

/// Capsule expressed in the frame that follows a joint's rotation.
struct LinkCapsule {
  std::string name;
  int joint_index = 0;
  geom::Vec3 p0 = geom::Vec3::Zero();
  geom::Vec3 p1 = geom::Vec3::Zero();
  double radius = 0.03;
};

/// Serial-chain arm: kinematic parameters are data, not code, so swapping
/// hardware means swapping a file.
struct ArmModel {
  std::string name;
  geom::Pose base_pose;
  std::vector<JointSpec> joints;
  std::vector<LinkCapsule> links;
  geom::Pose tool_offset;  // TCP in the last joint frame; +X is the approach axis

  int dof() const { return static_cast<int>(joints.size()); }
  JointVector home() const { return JointVector::Zero(dof()); }

  bool within_limits(const JointVector& q, double eps = 1e-9) const;
  JointVector clamp_to_limits(const JointVector& q) const;
};

/// Left/right joint vectors of a dual-arm rig.
struct DualConfig {
  JointVector left;
  JointVector right;

  bool approx_equal(const DualConfig& o, double eps = 1e-12) const {
    return (left - o.left).lpNorm<Eigen::Infinity>() <= eps &&
           (right - o.right).lpNorm<Eigen::Infinity>() <= eps;
  }
};

struct DualArmModel {
  ArmModel left;
  ArmModel right;

  DualConfig home() const { return {left.home(), right.home()}; }
};

/// The stock 6-DOF arm shipped with the repo: 0.75 m reach, shoulder
/// yaw/pitch, elbow pitch, spherical-ish wrist. Mirrors data/arms/dual_6dof.json.
ArmModel default_arm(const std::string& name, const geom::Pose& base_pose);

/// Two default arms mounted 0.4 m apart on the y-axis, facing +X.
DualArmModel default_dual_rig();

/// Parse an arm-model description file (JSON). Throws std::runtime_error with
/// a description of the first problem found.
DualArmModel load_dual_rig(const std::string& path);

}  // namespace packbot::motion
