#include "packbot/motion/arm_model.hpp"

#include <json.hpp>

#include <fstream>
#include <stdexcept>

namespace packbot::motion {

bool ArmModel::within_limits(const JointVector& q, double eps) const {
  if (q.size() != dof()) return false;
  for (int i = 0; i < dof(); ++i) {
    if (q[i] < joints[i].min_rad - eps || q[i] > joints[i].max_rad + eps) return false;
  }
  return true;
}

JointVector ArmModel::clamp_to_limits(const JointVector& q) const {
  JointVector out = q;
  for (int i = 0; i < dof(); ++i)
    out[i] = std::clamp(out[i], joints[i].min_rad, joints[i].max_rad);
  return out;
}

ArmModel default_arm(const std::string& name, const geom::Pose& base_pose) {
  using geom::Vec3;
  const double deg = M_PI / 180.0;
  ArmModel arm;
  arm.name = name;
  arm.base_pose = base_pose;
  arm.joints = {
      {"shoulder_yaw", Vec3(0, 0, 0.30), Vec3::UnitZ(), -170 * deg, 170 * deg},
      {"shoulder_pitch", Vec3(0, 0, 0), Vec3::UnitY(), -100 * deg, 100 * deg},
      {"elbow_pitch", Vec3(0.28, 0, 0), Vec3::UnitY(), -140 * deg, 140 * deg},
      {"wrist_roll", Vec3(0.28, 0, 0), Vec3::UnitX(), -170 * deg, 170 * deg},
      {"wrist_pitch", Vec3(0.08, 0, 0), Vec3::UnitY(), -110 * deg, 110 * deg},
      {"wrist_twist", Vec3(0.04, 0, 0), Vec3::UnitX(), -170 * deg, 170 * deg},
  };
  // Collision capsules live in the frame after their joint's rotation. The
  // static base column is deliberately not a collision body.
  arm.links = {
      {"upper_arm", 1, Vec3(0, 0, 0), Vec3(0.28, 0, 0), 0.045},
      {"forearm", 2, Vec3(0, 0, 0), Vec3(0.28, 0, 0), 0.040},
      {"wrist", 3, Vec3(0, 0, 0), Vec3(0.08, 0, 0), 0.035},
      {"wrist2", 4, Vec3(0, 0, 0), Vec3(0.04, 0, 0), 0.030},
      {"palm", 5, Vec3(0, 0, 0), Vec3(0.045, 0, 0), 0.022},
      {"fingers", 5, Vec3(0.07, -0.045, 0), Vec3(0.07, 0.045, 0), 0.010},
  };
  arm.tool_offset = geom::Pose::from_translation(Vec3(0.07, 0, 0));
  return arm;
}

DualArmModel default_dual_rig() {
  return {default_arm("left", geom::Pose::from_translation({0.0, 0.20, 0.0})),
          default_arm("right", geom::Pose::from_translation({0.0, -0.20, 0.0}))};
}

namespace {

using nlohmann::json;

geom::Vec3 vec3_from(const json& j, const std::string& key) {
  const auto& a = j.at(key);
  if (!a.is_array() || a.size() != 3)
    throw std::runtime_error("field '" + key + "' must be a 3-element array");
  return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

geom::Pose pose_from(const json& j) {
  geom::Pose p;
  if (j.contains("translation")) p.translation = vec3_from(j, "translation");
  if (j.contains("rotation_quat_wxyz")) {
    const auto& q = j.at("rotation_quat_wxyz");
    if (!q.is_array() || q.size() != 4)
      throw std::runtime_error("rotation_quat_wxyz must be a 4-element array [w,x,y,z]");
    p.rotation =
        geom::Quat(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(), q[3].get<double>())
            .normalized();
  }
  return p;
}

ArmModel arm_from(const json& j, const std::string& fallback_name) {
  ArmModel arm;
  arm.name = j.value("name", fallback_name);
  if (j.contains("base_pose")) arm.base_pose = pose_from(j.at("base_pose"));
  for (const auto& jj : j.at("joints")) {
    JointSpec spec;
    spec.name = jj.value("name", "joint");
    spec.offset = vec3_from(jj, "offset");
    spec.axis = vec3_from(jj, "axis").normalized();
    spec.min_rad = jj.at("min_rad").get<double>();
    spec.max_rad = jj.at("max_rad").get<double>();
    if (!(spec.min_rad < spec.max_rad))
      throw std::runtime_error("joint '" + spec.name + "': min_rad must be < max_rad");
    arm.joints.push_back(spec);
  }
  for (const auto& jl : j.at("links")) {
    LinkCapsule link;
    link.name = jl.value("name", "link");
    link.joint_index = jl.at("joint_index").get<int>();
    link.p0 = vec3_from(jl, "p0");
    link.p1 = vec3_from(jl, "p1");
    link.radius = jl.at("radius").get<double>();
    if (!(link.radius > 0.0))
      throw std::runtime_error("link '" + link.name + "': radius must be positive");
    if (link.joint_index < 0 || link.joint_index >= static_cast<int>(arm.joints.size()))
      throw std::runtime_error("link '" + link.name + "': joint_index out of range");
    arm.links.push_back(link);
  }
  if (j.contains("tool_offset")) arm.tool_offset = pose_from(j.at("tool_offset"));
  if (arm.joints.empty()) throw std::runtime_error("arm has no joints");
  return arm;
}

}  // namespace

DualArmModel load_dual_rig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open arm model file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("arm model parse error in " + path + ": " + e.what());
  }
  return {arm_from(j.at("left"), "left"), arm_from(j.at("right"), "right")};
}

}  // namespace packbot::motion
