#pragma once

#include "packbot/executive/task_types.hpp"
#include "packbot/manip/grasp_templates.hpp"
#include "packbot/motion/cartesian_mapping.hpp"
#include "packbot/perception/detectors.hpp"
#include "packbot/sim/world.hpp"
#include "packbot/skills/skill_graph.hpp"

#include <map>
#include <string>

namespace packbot::harness {

/// Every tunable the pipeline reads, overridable from the scenario file.
struct PipelineParams {
  percept::SegmentationParams segmentation;
  percept::DetectParams detect;
  motion::MappingParams mapping;
  manip::PickParams pick;
  manip::PlaceParams place;
  double pick_radius = 0.04;
};

/// A fully loaded experiment description: the task, the scene, the skill
/// graph and arm models it references, and all parameter overrides.
struct Scenario {
  std::string name;
  exec::TaskSpec task;
  sim::SceneSetup scene;
  skills::SkillGraph graph;
  motion::DualArmModel models;
  PipelineParams params;
  int trials = 10;
  std::uint64_t base_seed = 1;
  int max_retries = 2;
  bool recovery_enabled = true;
  std::map<std::string, int> object_bin;  // object name -> bin index
  std::string source_path;
};

/// Shipped noise presets: "zero" (fully deterministic), "lab" (development
/// setup magnitudes), "field" (harsher deployment-style noise).
sim::NoiseProfile noise_preset(const std::string& name);

/// Load and validate a scenario file (JSON). Referenced skill-graph and
/// arm-model files resolve relative to the scenario's directory. Throws
/// std::runtime_error with a description of the first problem.
Scenario load_scenario(const std::string& path);

Scenario scenario_from_json(const std::string& json_text, const std::string& base_dir,
                            const std::string& origin);

/// Scenario + graph diagnostics for `pack validate`.
std::vector<std::string> validate_scenario(const Scenario& s);

}  // namespace packbot::harness
