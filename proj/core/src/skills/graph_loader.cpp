#include "packbot/skills/graph_loader.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace packbot::skills {

namespace {

using nlohmann::json;

geom::Vec3 vec3_from(const json& a) {
  if (!a.is_array() || a.size() != 3) throw std::runtime_error("expected a 3-element array");
  return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

geom::Pose pose_from(const json& j) {
  geom::Pose p;
  if (j.contains("translation")) p.translation = vec3_from(j.at("translation"));
  if (j.contains("rotation_quat_wxyz")) {
    const auto& q = j.at("rotation_quat_wxyz");
    if (!q.is_array() || q.size() != 4)
      throw std::runtime_error("rotation_quat_wxyz must be [w,x,y,z]");
    p.rotation =
        geom::Quat(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(), q[3].get<double>())
            .normalized();
  }
  return p;
}

geom::ShapePrimitive shape_from(const json& j) {
  const std::string kind_str = j.at("kind").get<std::string>();
  const auto kind = geom::shape_kind_from_string(kind_str);
  if (!kind) throw std::runtime_error("unknown shape kind '" + kind_str + "'");
  switch (*kind) {
    case geom::ShapeKind::box:
      return geom::ShapePrimitive::make_box(vec3_from(j.at("extents")));
    case geom::ShapeKind::flat_slab:
      return geom::ShapePrimitive::make_flat_slab(vec3_from(j.at("extents")));
    case geom::ShapeKind::deformable_sheet:
      return geom::ShapePrimitive::make_deformable_sheet(vec3_from(j.at("extents")));
    case geom::ShapeKind::sphere:
      return geom::ShapePrimitive::make_sphere(j.at("radius").get<double>());
    case geom::ShapeKind::cylinder:
      return geom::ShapePrimitive::make_cylinder(j.at("radius").get<double>(),
                                                 j.at("height").get<double>());
    case geom::ShapeKind::cone:
      return geom::ShapePrimitive::make_cone(j.at("radius").get<double>(),
                                             j.at("height").get<double>());
  }
  throw std::runtime_error("unhandled shape kind");
}

template <typename T>
T parse_enum(const std::string& s, std::optional<T> (*from)(const std::string&),
             const char* what) {
  const auto v = from(s);
  if (!v) throw std::runtime_error(std::string("unknown ") + what + " '" + s + "'");
  return *v;
}

}  // namespace

SkillGraph parse_skill_graph(const std::string& json_text, const std::string& origin) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("skill graph parse error in " + origin + ": " + e.what());
  }

  SkillGraph g;
  for (const auto& s : j.value("skills", json::array()))
    g = register_skill(g, parse_enum<SkillId>(s.get<std::string>(), skill_from_string, "skill"));
  for (const auto& e : j.value("embodiments", json::array())) {
    EmbodimentSpec spec;
    spec.mode = parse_enum<EmbodimentMode>(e.at("mode").get<std::string>(),
                                           embodiment_from_string, "embodiment");
    g = register_embodiment(g, spec);
  }
  for (const auto& t : j.value("tools", json::array())) {
    ToolSpec tool;
    tool.name = t.at("name").get<std::string>();
    tool.kind =
        parse_enum<ToolKind>(t.at("kind").get<std::string>(), tool_kind_from_string, "tool kind");
    tool.max_opening = t.at("max_opening").get<double>();
    tool.finger_length = t.at("finger_length").get<double>();
    if (!(tool.max_opening > 0.0))
      throw std::runtime_error("tool '" + tool.name + "': max_opening must be positive");
    g = register_tool(g, tool);
  }
  for (const auto& s : j.value("sensors", json::array())) {
    SensorSpec sensor;
    sensor.id = s.at("id").get<std::string>();
    sensor.kind = parse_enum<SensorKind>(s.at("kind").get<std::string>(), sensor_kind_from_string,
                                         "sensor kind");
    if (s.contains("mount_pose")) sensor.mount_pose = pose_from(s.at("mount_pose"));
    g = register_sensor(g, sensor);
  }
  for (const auto& o : j.value("objects", json::array())) {
    ObjectSpec obj;
    obj.name = o.at("name").get<std::string>();
    obj.category = parse_enum<ObjectCategory>(o.at("category").get<std::string>(),
                                              category_from_string, "category");
    obj.shape = shape_from(o.at("shape"));
    obj.mass = o.value("mass", 0.1);
    obj.rigidity = o.value("rigidity", std::string("rigid")) == "deformable"
                       ? Rigidity::deformable
                       : Rigidity::rigid;
    obj.slippery = o.value("slippery", false);
    for (const auto& f : o.value("perceptive_features", json::array()))
      obj.perceptive_features.insert(parse_enum<PerceptiveFeature>(
          f.get<std::string>(), feature_from_string, "perceptive feature"));
    g = register_object(g, obj);
  }
  for (const auto& e : j.value("executors", json::array())) {
    ExecutorDecl decl;
    decl.name = e.at("name").get<std::string>();
    for (const auto& p : e.value("required_params", json::array()))
      decl.required_params.push_back(p.get<std::string>());
    g = register_executor(g, decl);
  }
  for (const auto& b : j.value("bindings", json::array())) {
    ExecutorBinding binding;
    binding.skill =
        parse_enum<SkillId>(b.at("skill").get<std::string>(), skill_from_string, "skill");
    if (b.contains("object_category")) {
      const std::string cat = b.at("object_category").get<std::string>();
      if (cat != "*")
        binding.object_category =
            parse_enum<ObjectCategory>(cat, category_from_string, "category");
    }
    binding.embodiment.mode = parse_enum<EmbodimentMode>(b.at("embodiment").get<std::string>(),
                                                         embodiment_from_string, "embodiment");
    binding.tool = b.at("tool").get<std::string>();
    for (const auto& s : b.value("sensors", json::array()))
      binding.sensors.push_back(s.get<std::string>());
    binding.executor_name = b.at("executor_name").get<std::string>();
    g = register_binding(g, binding);
  }

  const auto diags = validate(g);
  if (!validation_clean(diags)) {
    std::ostringstream msg;
    msg << "skill graph " << origin << " failed validation:";
    for (const auto& d : diags)
      if (d.severity == DiagnosticSeverity::error) msg << "\n  - " << d.message;
    throw std::runtime_error(msg.str());
  }
  return g;
}

SkillGraph load_skill_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open skill graph file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_skill_graph(buf.str(), path);
}

namespace {

ObjectSpec make_object(const std::string& name, ObjectCategory cat, geom::ShapePrimitive shape,
                       double mass, Rigidity rigidity, bool slippery,
                       std::set<PerceptiveFeature> features) {
  ObjectSpec o;
  o.name = name;
  o.category = cat;
  o.shape = shape;
  o.mass = mass;
  o.rigidity = rigidity;
  o.slippery = slippery;
  o.perceptive_features = std::move(features);
  return o;
}

}  // namespace

SkillGraph default_skill_graph() {
  using geom::ShapePrimitive;
  using geom::Vec3;
  SkillGraph g;

  for (SkillId s : {SkillId::DetectObject, SkillId::DetectPick, SkillId::Pick, SkillId::Place,
                    SkillId::Stir, SkillId::Pack, SkillId::Hold, SkillId::Transit})
    g = register_skill(g, s);

  for (EmbodimentMode m :
       {EmbodimentMode::single_arm_left, EmbodimentMode::single_arm_right, EmbodimentMode::dual_arm})
    g = register_embodiment(g, {m});

  g = register_tool(g, {"two_finger", ToolKind::two_finger_gripper, 0.08, 0.06});
  g = register_tool(g, {"one_finger", ToolKind::one_finger_gripper, 0.09, 0.05});

  {
    SensorSpec head;
    head.id = "head_cam";
    head.kind = SensorKind::head_camera;
    head.mount_pose.translation = Vec3(-0.20, 0.0, 1.05);
    head.mount_pose.rotation =
        geom::Quat::FromTwoVectors(Vec3::UnitZ(), Vec3(0.62, 0.0, -0.95)).normalized();
    g = register_sensor(g, head);
    SensorSpec wl;
    wl.id = "wrist_left";
    wl.kind = SensorKind::wrist_camera_left;
    wl.mount_pose.translation = Vec3(0.15, 0.55, 0.75);
    wl.mount_pose.rotation =
        geom::Quat::FromTwoVectors(Vec3::UnitZ(), Vec3(0.30, -0.50, -0.80)).normalized();
    g = register_sensor(g, wl);
    SensorSpec wr;
    wr.id = "wrist_right";
    wr.kind = SensorKind::wrist_camera_right;
    wr.mount_pose.translation = Vec3(0.15, -0.55, 0.75);
    wr.mount_pose.rotation =
        geom::Quat::FromTwoVectors(Vec3::UnitZ(), Vec3(0.30, 0.50, -0.80)).normalized();
    g = register_sensor(g, wr);
  }

  const std::set<PerceptiveFeature> pose_only{PerceptiveFeature::full_pose};
  g = register_object(g, make_object("mini_block", ObjectCategory::small_rigid,
                                     ShapePrimitive::make_box(Vec3(0.045, 0.03, 0.025)), 0.05,
                                     Rigidity::rigid, false, pose_only));
  g = register_object(g, make_object("can", ObjectCategory::cylinder,
                                     ShapePrimitive::make_cylinder(0.033, 0.115), 0.35,
                                     Rigidity::rigid, false,
                                     {PerceptiveFeature::full_pose, PerceptiveFeature::upright_flag}));
  g = register_object(g, make_object("tennis_ball", ObjectCategory::sphere,
                                     ShapePrimitive::make_sphere(0.0335), 0.058, Rigidity::rigid,
                                     true, {PerceptiveFeature::position_only}));
  g = register_object(g, make_object("block", ObjectCategory::cube,
                                     ShapePrimitive::make_box(Vec3(0.055, 0.055, 0.055)), 0.12,
                                     Rigidity::rigid, false, pose_only));
  g = register_object(g, make_object("cone_block", ObjectCategory::cone,
                                     ShapePrimitive::make_cone(0.05, 0.12), 0.20, Rigidity::rigid,
                                     false, pose_only));
  g = register_object(g, make_object("carton", ObjectCategory::cuboid_large,
                                     ShapePrimitive::make_box(Vec3(0.10, 0.14, 0.09)), 0.60,
                                     Rigidity::rigid, false, pose_only));
  g = register_object(g, make_object("bowl", ObjectCategory::cuboid_large,
                                     ShapePrimitive::make_cylinder(0.085, 0.05), 0.30,
                                     Rigidity::rigid, false, pose_only));
  g = register_object(g, make_object("baguette", ObjectCategory::flat_large,
                                     ShapePrimitive::make_flat_slab(Vec3(0.24, 0.07, 0.05)), 0.25,
                                     Rigidity::rigid, false, pose_only));
  g = register_object(g, make_object("stacked_blocks", ObjectCategory::stacked,
                                     ShapePrimitive::make_box(Vec3(0.09, 0.09, 0.12)), 0.30,
                                     Rigidity::rigid, false, pose_only));
  g = register_object(g, make_object("tshirt", ObjectCategory::deformable,
                                     ShapePrimitive::make_deformable_sheet(Vec3(0.22, 0.16, 0.008)),
                                     0.15, Rigidity::deformable, false,
                                     {PerceptiveFeature::edge_set}));
  g = register_object(g, make_object("lollipop", ObjectCategory::small_precise,
                                     ShapePrimitive::make_box(Vec3(0.022, 0.022, 0.018)), 0.02,
                                     Rigidity::rigid, false, pose_only));

  for (const char* name : {"detect_rigid", "detect_deformable", "detect_pick", "pick_center",
                           "pick_cylinder", "pick_dual_corner", "pick_edge", "place_first_fit",
                           "place_dual", "stir_bin", "pack_seal", "transit_carry"})
    g = register_executor(g, {name, {}});
  g = register_executor(g, {"hold", {"duration"}});

  const std::vector<std::string> all_cams{"head_cam", "wrist_left", "wrist_right"};
  auto bind = [&](SkillId skill, std::optional<ObjectCategory> cat, EmbodimentMode mode,
                  const std::string& tool, const std::vector<std::string>& sensors,
                  const std::string& executor) {
    ExecutorBinding b;
    b.skill = skill;
    b.object_category = cat;
    b.embodiment = {mode};
    b.tool = tool;
    b.sensors = sensors;
    b.executor_name = executor;
    g = register_binding(g, b);
  };

  bind(SkillId::DetectObject, std::nullopt, EmbodimentMode::single_arm_right, "two_finger",
       all_cams, "detect_rigid");
  bind(SkillId::DetectObject, ObjectCategory::deformable, EmbodimentMode::single_arm_right,
       "two_finger", all_cams, "detect_deformable");
  bind(SkillId::DetectPick, std::nullopt, EmbodimentMode::single_arm_right, "two_finger",
       all_cams, "detect_pick");

  for (ObjectCategory cat : {ObjectCategory::small_rigid, ObjectCategory::cube,
                             ObjectCategory::sphere, ObjectCategory::small_precise})
    bind(SkillId::Pick, cat, EmbodimentMode::single_arm_right, "two_finger", {"head_cam"},
         "pick_center");
  bind(SkillId::Pick, ObjectCategory::cylinder, EmbodimentMode::single_arm_right, "two_finger",
       {"head_cam"}, "pick_cylinder");
  for (ObjectCategory cat : {ObjectCategory::cuboid_large, ObjectCategory::cone,
                             ObjectCategory::flat_large, ObjectCategory::stacked})
    bind(SkillId::Pick, cat, EmbodimentMode::dual_arm, "one_finger", all_cams,
         "pick_dual_corner");
  bind(SkillId::Pick, ObjectCategory::deformable, EmbodimentMode::single_arm_right, "two_finger",
       all_cams, "pick_edge");

  bind(SkillId::Place, std::nullopt, EmbodimentMode::single_arm_right, "two_finger", {"head_cam"},
       "place_first_fit");
  for (ObjectCategory cat : {ObjectCategory::cuboid_large, ObjectCategory::cone,
                             ObjectCategory::flat_large, ObjectCategory::stacked})
    bind(SkillId::Place, cat, EmbodimentMode::dual_arm, "one_finger", {"head_cam"}, "place_dual");

  bind(SkillId::Transit, std::nullopt, EmbodimentMode::dual_arm, "two_finger", {"head_cam"},
       "transit_carry");
  bind(SkillId::Stir, std::nullopt, EmbodimentMode::single_arm_right, "two_finger", {"head_cam"},
       "stir_bin");
  bind(SkillId::Pack, std::nullopt, EmbodimentMode::dual_arm, "two_finger", {"head_cam"},
       "pack_seal");
  bind(SkillId::Hold, std::nullopt, EmbodimentMode::dual_arm, "two_finger", {}, "hold");

  return g;
}

}  // namespace packbot::skills
