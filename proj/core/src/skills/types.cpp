#include "packbot/skills/types.hpp"

namespace packbot::skills {

std::string to_string(SkillId s) {
  switch (s) {
    case SkillId::DetectObject: return "DetectObject";
    case SkillId::DetectPick: return "DetectPick";
    case SkillId::Pick: return "Pick";
    case SkillId::Place: return "Place";
    case SkillId::Stir: return "Stir";
    case SkillId::Pack: return "Pack";
    case SkillId::Hold: return "Hold";
    case SkillId::Transit: return "Transit";
  }
  return "?";
}

std::optional<SkillId> skill_from_string(const std::string& s) {
  if (s == "DetectObject") return SkillId::DetectObject;
  if (s == "DetectPick") return SkillId::DetectPick;
  if (s == "Pick") return SkillId::Pick;
  if (s == "Place") return SkillId::Place;
  if (s == "Stir") return SkillId::Stir;
  if (s == "Pack") return SkillId::Pack;
  if (s == "Hold") return SkillId::Hold;
  if (s == "Transit") return SkillId::Transit;
  return std::nullopt;
}

std::string to_string(ObjectCategory c) {
  switch (c) {
    case ObjectCategory::small_rigid: return "small_rigid";
    case ObjectCategory::cylinder: return "cylinder";
    case ObjectCategory::sphere: return "sphere";
    case ObjectCategory::cube: return "cube";
    case ObjectCategory::cone: return "cone";
    case ObjectCategory::cuboid_large: return "cuboid_large";
    case ObjectCategory::flat_large: return "flat_large";
    case ObjectCategory::stacked: return "stacked";
    case ObjectCategory::deformable: return "deformable";
    case ObjectCategory::small_precise: return "small_precise";
  }
  return "?";
}

std::optional<ObjectCategory> category_from_string(const std::string& s) {
  for (ObjectCategory c : all_categories())
    if (to_string(c) == s) return c;
  return std::nullopt;
}

std::vector<ObjectCategory> all_categories() {
  return {ObjectCategory::small_rigid, ObjectCategory::cylinder,     ObjectCategory::sphere,
          ObjectCategory::cube,        ObjectCategory::cone,         ObjectCategory::cuboid_large,
          ObjectCategory::flat_large,  ObjectCategory::stacked,      ObjectCategory::deformable,
          ObjectCategory::small_precise};
}

std::string to_string(PerceptiveFeature f) {
  switch (f) {
    case PerceptiveFeature::position_only: return "position_only";
    case PerceptiveFeature::full_pose: return "full_pose";
    case PerceptiveFeature::upright_flag: return "upright_flag";
    case PerceptiveFeature::edge_set: return "edge_set";
  }
  return "?";
}

std::optional<PerceptiveFeature> feature_from_string(const std::string& s) {
  if (s == "position_only") return PerceptiveFeature::position_only;
  if (s == "full_pose") return PerceptiveFeature::full_pose;
  if (s == "upright_flag") return PerceptiveFeature::upright_flag;
  if (s == "edge_set") return PerceptiveFeature::edge_set;
  return std::nullopt;
}

namespace {

bool shape_equal(const geom::ShapePrimitive& a, const geom::ShapePrimitive& b) {
  return a.kind == b.kind && a.extents == b.extents && a.radius == b.radius &&
         a.height == b.height;
}

bool pose_equal(const geom::Pose& a, const geom::Pose& b) {
  return a.translation == b.translation && a.rotation.coeffs() == b.rotation.coeffs();
}

}  // namespace

bool ObjectSpec::operator==(const ObjectSpec& o) const {
  return name == o.name && category == o.category && shape_equal(shape, o.shape) &&
         mass == o.mass && rigidity == o.rigidity && slippery == o.slippery &&
         perceptive_features == o.perceptive_features;
}

std::string to_string(EmbodimentMode m) {
  switch (m) {
    case EmbodimentMode::single_arm_left: return "single_arm_left";
    case EmbodimentMode::single_arm_right: return "single_arm_right";
    case EmbodimentMode::dual_arm: return "dual_arm";
  }
  return "?";
}

std::optional<EmbodimentMode> embodiment_from_string(const std::string& s) {
  if (s == "single_arm_left") return EmbodimentMode::single_arm_left;
  if (s == "single_arm_right") return EmbodimentMode::single_arm_right;
  if (s == "dual_arm") return EmbodimentMode::dual_arm;
  return std::nullopt;
}

std::string to_string(ToolKind k) {
  switch (k) {
    case ToolKind::two_finger_gripper: return "two_finger_gripper";
    case ToolKind::one_finger_gripper: return "one_finger_gripper";
  }
  return "?";
}

std::optional<ToolKind> tool_kind_from_string(const std::string& s) {
  if (s == "two_finger_gripper") return ToolKind::two_finger_gripper;
  if (s == "one_finger_gripper") return ToolKind::one_finger_gripper;
  return std::nullopt;
}

std::string to_string(SensorKind k) {
  switch (k) {
    case SensorKind::head_camera: return "head_camera";
    case SensorKind::wrist_camera_left: return "wrist_camera_left";
    case SensorKind::wrist_camera_right: return "wrist_camera_right";
  }
  return "?";
}

std::optional<SensorKind> sensor_kind_from_string(const std::string& s) {
  if (s == "head_camera") return SensorKind::head_camera;
  if (s == "wrist_camera_left") return SensorKind::wrist_camera_left;
  if (s == "wrist_camera_right") return SensorKind::wrist_camera_right;
  return std::nullopt;
}

bool SensorSpec::operator==(const SensorSpec& o) const {
  return id == o.id && kind == o.kind && pose_equal(mount_pose, o.mount_pose);
}

}  // namespace packbot::skills
