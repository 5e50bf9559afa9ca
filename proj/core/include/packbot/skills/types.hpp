#pragma once

#include "packbot/geometry/pose.hpp"
#include "packbot/geometry/shapes.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace packbot::skills {

enum class SkillId {
  DetectObject,
  DetectPick,
  Pick,
  Place,
  Stir,
  Pack,
  Hold,
  Transit,
};

std::string to_string(SkillId s);
std::optional<SkillId> skill_from_string(const std::string& s);

enum class ObjectCategory {
  small_rigid,
  cylinder,
  sphere,
  cube,
  cone,
  cuboid_large,
  flat_large,
  stacked,
  deformable,
  small_precise,
};

std::string to_string(ObjectCategory c);
std::optional<ObjectCategory> category_from_string(const std::string& s);
std::vector<ObjectCategory> all_categories();

enum class Rigidity { rigid, deformable };

enum class PerceptiveFeature { position_only, full_pose, upright_flag, edge_set };

std::string to_string(PerceptiveFeature f);
std::optional<PerceptiveFeature> feature_from_string(const std::string& s);

/// Item description: physical properties plus the perceptive features that
/// drive strategy selection.
struct ObjectSpec {
  std::string name;
  ObjectCategory category = ObjectCategory::small_rigid;
  geom::ShapePrimitive shape;
  double mass = 0.1;  // kg
  Rigidity rigidity = Rigidity::rigid;
  bool slippery = false;
  std::set<PerceptiveFeature> perceptive_features;

  bool operator==(const ObjectSpec& o) const;
};

enum class EmbodimentMode { single_arm_left, single_arm_right, dual_arm };

std::string to_string(EmbodimentMode m);
std::optional<EmbodimentMode> embodiment_from_string(const std::string& s);

struct EmbodimentSpec {
  EmbodimentMode mode = EmbodimentMode::dual_arm;
  bool operator==(const EmbodimentSpec&) const = default;
};

enum class ToolKind { two_finger_gripper, one_finger_gripper };

std::string to_string(ToolKind k);
std::optional<ToolKind> tool_kind_from_string(const std::string& s);

struct ToolSpec {
  std::string name;
  ToolKind kind = ToolKind::two_finger_gripper;
  double max_opening = 0.08;    // meters
  double finger_length = 0.06;  // meters

  bool operator==(const ToolSpec&) const = default;
};

enum class SensorKind { head_camera, wrist_camera_left, wrist_camera_right };

std::string to_string(SensorKind k);
std::optional<SensorKind> sensor_kind_from_string(const std::string& s);

struct SensorSpec {
  std::string id;
  SensorKind kind = SensorKind::head_camera;
  geom::Pose mount_pose;  // robot base frame; +Z is the optical axis

  bool operator==(const SensorSpec& o) const;
};

/// A registered executable function plus the payload keys it requires.
struct ExecutorDecl {
  std::string name;
  std::vector<std::string> required_params;

  bool operator==(const ExecutorDecl&) const = default;
};

/// Links a (skill, object-category) pair to an executor with its embodiment,
/// tool, and feedback sensors. A missing category acts as a wildcard.
struct ExecutorBinding {
  SkillId skill = SkillId::Pick;
  std::optional<ObjectCategory> object_category;  // nullopt = wildcard
  EmbodimentSpec embodiment;
  std::string tool;
  std::vector<std::string> sensors;
  std::string executor_name;

  bool operator==(const ExecutorBinding&) const = default;
};

using ParamValue = std::variant<double, std::string>;
using ParamMap = std::map<std::string, ParamValue>;

}  // namespace packbot::skills
