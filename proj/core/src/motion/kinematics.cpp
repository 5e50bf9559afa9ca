#include "packbot/motion/kinematics.hpp"

#include "packbot/rng.hpp"

#include <cmath>

namespace packbot::motion {

FkResult forward_kinematics_full(const ArmModel& arm, const JointVector& q) {
  if (q.size() != arm.dof())
    throw JointLimitError("configuration dimension does not match the arm model");
  if (!arm.within_limits(q))
    throw JointLimitError("configuration outside joint limits for arm '" + arm.name + "'");

  FkResult out;
  out.joint_frames.reserve(arm.joints.size());
  geom::Pose t = arm.base_pose;
  for (std::size_t i = 0; i < arm.joints.size(); ++i) {
    const JointSpec& j = arm.joints[i];
    t = compose(t, geom::Pose::from_translation(j.offset));
    t = compose(t, geom::Pose::from_axis_angle(j.axis, q[static_cast<int>(i)]));
    out.joint_frames.push_back(t);
  }
  out.tcp = compose(t, arm.tool_offset);
  return out;
}

geom::Pose forward_kinematics(const ArmModel& arm, const JointVector& q) {
  return forward_kinematics_full(arm, q).tcp;
}

std::pair<double, double> pose_error(const geom::Pose& target, const geom::Pose& actual) {
  const double pos = (target.translation - actual.translation).norm();
  const double rot = rotation_angle_between(target, actual);
  return {pos, rot};
}

namespace {

// Geometric Jacobian at q; column i is [w x (p_tcp - p_i); w].
Eigen::Matrix<double, 6, Eigen::Dynamic> jacobian(const ArmModel& arm, const JointVector& q,
                                                  const FkResult& fk) {
  const int n = arm.dof();
  Eigen::Matrix<double, 6, Eigen::Dynamic> J(6, n);
  geom::Pose t = arm.base_pose;
  for (int i = 0; i < n; ++i) {
    const JointSpec& j = arm.joints[static_cast<std::size_t>(i)];
    t = compose(t, geom::Pose::from_translation(j.offset));
    const geom::Vec3 axis_world = t.rotation * j.axis;
    const geom::Vec3 origin = t.translation;
    J.col(i).head<3>() = axis_world.cross(fk.tcp.translation - origin);
    J.col(i).tail<3>() = axis_world;
    t = compose(t, geom::Pose::from_axis_angle(j.axis, q[i]));
  }
  return J;
}

geom::Vec3 rotation_vector(const geom::Quat& from, const geom::Quat& to) {
  Eigen::AngleAxisd aa(to * from.conjugate());
  double angle = aa.angle();
  // Keep the shortest representation.
  if (angle > M_PI) angle -= 2.0 * M_PI;
  return angle * aa.axis();
}

bool dls_descend(const ArmModel& arm, const geom::Pose& target, JointVector& q,
                 const IkParams& params) {
  double last_err = std::numeric_limits<double>::infinity();
  int stall = 0;
  for (int iter = 0; iter < params.max_iters; ++iter) {
    const FkResult fk = forward_kinematics_full(arm, q);
    const auto [pos_err, rot_err] = pose_error(target, fk.tcp);
    if (pos_err < params.pos_tol && rot_err < params.rot_tol_rad) return true;

    Eigen::Matrix<double, 6, 1> e;
    e.head<3>() = target.translation - fk.tcp.translation;
    e.tail<3>() = rotation_vector(fk.tcp.rotation, target.rotation);

    const auto J = jacobian(arm, q, fk);
    const Eigen::Matrix<double, 6, 6> JJt =
        J * J.transpose() + params.damping * params.damping * Eigen::Matrix<double, 6, 6>::Identity();
    JointVector dq = J.transpose() * JJt.ldlt().solve(e);

    const double step = dq.lpNorm<Eigen::Infinity>();
    if (step > params.max_step) dq *= params.max_step / step;
    q = arm.clamp_to_limits(q + dq);

    const double err = pos_err + rot_err;
    stall = (err > last_err - 1e-10) ? stall + 1 : 0;
    if (stall > 20) return false;  // flat region; let a restart take over
    last_err = std::min(last_err, err);
  }
  return false;
}

}  // namespace

std::optional<JointVector> solve_ik(const ArmModel& arm, const geom::Pose& target,
                                    const JointVector& seed_config, const IkParams& params) {
  if (!target.translation.allFinite()) return std::nullopt;

  JointVector q = arm.clamp_to_limits(seed_config);
  if (dls_descend(arm, target, q, params)) return q;

  Rng rng(params.seed);
  for (int r = 0; r < params.restarts; ++r) {
    JointVector qr(arm.dof());
    for (int i = 0; i < arm.dof(); ++i)
      qr[i] = rng.uniform(arm.joints[static_cast<std::size_t>(i)].min_rad,
                          arm.joints[static_cast<std::size_t>(i)].max_rad);
    if (dls_descend(arm, target, qr, params)) return qr;
  }
  return std::nullopt;
}

}  // namespace packbot::motion
