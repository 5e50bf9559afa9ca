#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <cmath>

namespace packbot::geom {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

/// Rigid transform acting on points as x' = R x + t.
///
/// Rotation is stored as a unit quaternion (Hamilton product, scalar-first
/// constructor order, active rotation). Every constructor and composition
/// renormalizes, so |q| stays within 1e-9 of 1.
struct Pose {
  Quat rotation{1.0, 0.0, 0.0, 0.0};
  Vec3 translation{0.0, 0.0, 0.0};

  Pose() = default;
  Pose(const Quat& q, const Vec3& t) : rotation(q.normalized()), translation(t) {}

  static Pose identity() { return {}; }

  static Pose from_translation(const Vec3& t) { return {Quat::Identity(), t}; }

  static Pose from_axis_angle(const Vec3& axis, double angle, const Vec3& t = Vec3::Zero()) {
    return {Quat(Eigen::AngleAxisd(angle, axis.normalized())), t};
  }

  static Pose from_matrix(const Mat3& rot, const Vec3& t) { return {Quat(rot), t}; }

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }

  Mat3 matrix() const { return rotation.toRotationMatrix(); }
};

/// a composed after b: (a*b)(x) = a(b(x)).
inline Pose compose(const Pose& a, const Pose& b) {
  return {(a.rotation * b.rotation).normalized(), a.rotation * b.translation + a.translation};
}

inline Pose inverse(const Pose& p) {
  const Quat qi = p.rotation.conjugate();
  return {qi, qi * (-p.translation)};
}

/// Angle of the relative rotation between two poses, in [0, pi].
inline double rotation_angle_between(const Pose& a, const Pose& b) {
  const Quat d = a.rotation.conjugate() * b.rotation;
  const double w = std::min(1.0, std::abs(d.w()));
  return 2.0 * std::acos(w);
}

/// Angle in [0, pi] between the rotated body axis and world +Z.
///
/// Invariant under rotation of the pose about the body axis itself.
inline double axis_tilt(const Pose& p, const Vec3& body_axis) {
  const Vec3 world_axis = p.rotation * body_axis;
  const double c = std::clamp(world_axis.normalized().dot(Vec3::UnitZ()), -1.0, 1.0);
  return std::acos(c);
}

inline double deg_to_rad(double deg) { return deg * M_PI / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / M_PI; }

}  // namespace packbot::geom
