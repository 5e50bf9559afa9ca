#include "packbot/harness/scenario.hpp"

#include "packbot/motion/arm_model.hpp"
#include "packbot/skills/graph_loader.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace packbot::harness {

using nlohmann::json;

sim::NoiseProfile noise_preset(const std::string& name) {
  sim::NoiseProfile n;
  if (name == "zero") return n;
  if (name == "lab") {
    // Development-setup magnitudes: high but imperfect per-category success.
    n.depth_sigma = 0.0012;
    n.dropout = 0.15;
    n.miss_rate = 0.02;
    n.slip_probability = 0.05;
    n.pose_jitter_rad = geom::deg_to_rad(0.8);
    n.pose_jitter_m = 0.002;
    return n;
  }
  if (name == "field") {
    // Deployment-style noise: narrower views, more misses, harder grasps.
    n.depth_sigma = 0.002;
    n.dropout = 0.25;
    n.miss_rate = 0.06;
    n.slip_probability = 0.10;
    n.pose_jitter_rad = geom::deg_to_rad(1.5);
    n.pose_jitter_m = 0.004;
    return n;
  }
  throw std::runtime_error("unknown noise preset '" + name + "' (expected zero|lab|field)");
}

namespace {

geom::Vec3 vec3_from(const json& a) {
  if (!a.is_array() || a.size() != 3) throw std::runtime_error("expected a 3-element array");
  return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

sim::BinGeometry bin_from(const json& j, const std::string& fallback_name) {
  sim::BinGeometry bin;
  bin.name = j.value("name", fallback_name);
  bin.floor_center = vec3_from(j.at("floor_center"));
  bin.interior = vec3_from(j.at("interior"));
  bin.wall_thickness = j.value("wall_thickness", 0.012);
  return bin;
}

sim::NoiseProfile noise_from(const json& j) {
  if (j.is_string()) return noise_preset(j.get<std::string>());
  sim::NoiseProfile n;
  n.depth_sigma = j.value("depth_sigma", 0.0);
  n.dropout = j.value("dropout", 0.0);
  n.miss_rate = j.value("miss_rate", 0.0);
  n.slip_probability = j.value("slip_probability", 0.0);
  n.pose_jitter_rad = j.value("pose_jitter_rad", 0.0);
  n.pose_jitter_m = j.value("pose_jitter_m", 0.0);
  if (!n.valid()) throw std::runtime_error("noise profile out of range");
  return n;
}

void apply_param_overrides(PipelineParams& p, const json& j) {
  if (j.contains("icp")) {
    const auto& o = j.at("icp");
    auto& icp = p.detect.icp;
    icp.max_iterations = o.value("max_iterations", icp.max_iterations);
    icp.convergence_tol = o.value("convergence_tol", icp.convergence_tol);
    icp.accept_residual = o.value("accept_residual", icp.accept_residual);
    icp.upright_threshold_deg = o.value("upright_threshold_deg", icp.upright_threshold_deg);
    icp.model_points = o.value("model_points", icp.model_points);
    p.detect.initial_guesses = o.value("initial_guesses", p.detect.initial_guesses);
  }
  if (j.contains("segmentation")) {
    const auto& o = j.at("segmentation");
    p.segmentation.points_per_object = o.value("points_per_object", p.segmentation.points_per_object);
    p.segmentation.points_per_bin = o.value("points_per_bin", p.segmentation.points_per_bin);
    p.segmentation.fov_deg = o.value("fov_deg", p.segmentation.fov_deg);
    p.segmentation.cleanup_radius = o.value("cleanup_radius", p.segmentation.cleanup_radius);
  }
  if (j.contains("rrt")) {
    const auto& o = j.at("rrt");
    auto& rrt = p.mapping.rrt;
    rrt.step = o.value("step", rrt.step);
    rrt.check_res = o.value("check_res", rrt.check_res);
    rrt.max_iters = o.value("max_iters", rrt.max_iters);
    rrt.shortcut_iters = o.value("shortcut_iters", rrt.shortcut_iters);
    rrt.validation_slack = o.value("validation_slack", rrt.validation_slack);
  }
  if (j.contains("ik")) {
    const auto& o = j.at("ik");
    auto& ik = p.mapping.ik;
    ik.pos_tol = o.value("pos_tol", ik.pos_tol);
    ik.rot_tol_rad = o.value("rot_tol_rad", ik.rot_tol_rad);
    ik.restarts = o.value("restarts", ik.restarts);
  }
  if (j.contains("pick")) {
    const auto& o = j.at("pick");
    p.pick.wrist_orientations = o.value("wrist_orientations", p.pick.wrist_orientations);
    p.pick.pregrasp_offset = o.value("pregrasp_offset", p.pick.pregrasp_offset);
    p.pick.lift_height = o.value("lift_height", p.pick.lift_height);
  }
  if (j.contains("place")) {
    const auto& o = j.at("place");
    p.place.grid_pitch = o.value("grid_pitch", p.place.grid_pitch);
    p.place.footprint_inflation = o.value("footprint_inflation", p.place.footprint_inflation);
    p.place.release_height = o.value("release_height", p.place.release_height);
  }
  if (j.contains("edges")) {
    const auto& o = j.at("edges");
    p.detect.edge_angle_tol_deg = o.value("angle_tol_deg", p.detect.edge_angle_tol_deg);
    p.detect.min_edge_length = o.value("min_edge_length", p.detect.min_edge_length);
  }
  p.pick_radius = j.value("pick_radius", p.pick_radius);
  p.detect.pick_radius = p.pick_radius;
}

}  // namespace

Scenario scenario_from_json(const std::string& json_text, const std::string& base_dir,
                            const std::string& origin) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("scenario parse error in " + origin + ": " + e.what());
  }

  Scenario s;
  s.source_path = origin;
  s.name = j.value("name", std::filesystem::path(origin).stem().string());

  const auto resolve_path = [&](const std::string& rel) {
    const std::filesystem::path p(rel);
    return p.is_absolute() ? p.string() : (std::filesystem::path(base_dir) / p).string();
  };

  if (!j.contains("skill_graph"))
    throw std::runtime_error("scenario " + origin + ": missing skill_graph reference");
  s.graph = skills::load_skill_graph(resolve_path(j.at("skill_graph").get<std::string>()));

  if (!j.contains("arm_model"))
    throw std::runtime_error("scenario " + origin + ": missing arm_model reference");
  s.models = motion::load_dual_rig(resolve_path(j.at("arm_model").get<std::string>()));

  const auto& task = j.at("task");
  for (const auto& item : task.at("items")) {
    const std::string name = item.at(0).get<std::string>();
    const int quantity = item.at(1).get<int>();
    s.task.items.emplace_back(name, quantity);
  }
  s.task.seal = task.value("seal", false);

  int bin_idx = 0;
  for (const auto& b : j.at("bins"))
    s.scene.bins.push_back(bin_from(b, "bin" + std::to_string(bin_idx++)));
  s.scene.box_body = bin_from(j.at("box"), "pbox");

  for (const auto& o : j.at("objects")) {
    sim::SceneObject so;
    const std::string name = o.at("name").get<std::string>();
    auto it = s.graph.objects.find(name);
    if (it == s.graph.objects.end())
      throw std::runtime_error("scenario " + origin + ": object '" + name +
                               "' is not in the skill graph");
    so.spec = it->second;
    so.count = o.value("count", 1);
    so.bin = o.value("bin", 0);
    const std::string orient = o.value("orientation", "upright");
    so.orientation =
        orient == "lying" ? sim::InitialOrientation::lying : sim::InitialOrientation::upright;
    so.stack_on = o.value("stack_on", "");
    if (so.bin < 0 || so.bin >= static_cast<int>(s.scene.bins.size()))
      throw std::runtime_error("scenario " + origin + ": object '" + name +
                               "' assigned to missing bin " + std::to_string(so.bin));
    s.scene.objects.push_back(so);
    s.object_bin[name] = so.bin;
  }

  s.scene.noise = j.contains("noise") ? noise_from(j.at("noise")) : sim::NoiseProfile{};
  s.scene.table_z = j.value("table_z", 0.0);

  // Gripper opening comes from the widest registered tool.
  double max_opening = 0.08;
  for (const auto& [name, tool] : s.graph.tools) max_opening = std::max(max_opening, tool.max_opening);
  s.scene.gripper_max_opening = max_opening;

  if (j.contains("params")) apply_param_overrides(s.params, j.at("params"));
  s.trials = j.value("trials", 10);
  s.base_seed = j.value("seed", 1ULL);
  s.max_retries = j.value("max_retries", 2);
  s.recovery_enabled = j.value("recovery", true);

  if (s.trials < 1) throw std::runtime_error("scenario " + origin + ": trials must be >= 1");
  for (const auto& [name, qty] : s.task.items) {
    if (qty < 1) throw std::runtime_error("scenario " + origin + ": non-positive quantity");
    if (!s.object_bin.count(name))
      throw std::runtime_error("scenario " + origin + ": task item '" + name +
                               "' has no scene object entry");
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return scenario_from_json(buf.str(), std::filesystem::path(path).parent_path().string(), path);
}

std::vector<std::string> validate_scenario(const Scenario& s) {
  std::vector<std::string> problems;
  for (const auto& d : skills::validate(s.graph)) {
    if (d.severity == skills::DiagnosticSeverity::error)
      problems.push_back("graph: " + d.message);
    else
      problems.push_back("graph (info): " + d.message);
  }
  // A dry reset catches infeasible scatter before a batch starts.
  try {
    sim::reset(s.scene, s.models, s.base_seed);
  } catch (const sim::SimError& e) {
    problems.push_back(std::string("scene: ") + e.what());
  }
  for (const auto& [name, qty] : s.task.items) {
    bool found = false;
    for (const auto& so : s.scene.objects)
      if (so.spec.name == name && so.count >= qty) found = true;
    if (!found)
      problems.push_back("task: item '" + name + "' count exceeds scene objects");
  }
  return problems;
}

}  // namespace packbot::harness
