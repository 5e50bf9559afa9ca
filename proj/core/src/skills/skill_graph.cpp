#include "packbot/skills/skill_graph.hpp"

#include <algorithm>
#include <sstream>

namespace packbot::skills {

namespace {

[[noreturn]] void throw_duplicate(const std::string& kind, const std::string& id) {
  throw GraphError(GraphError::Code::DuplicateId,
                   kind + " '" + id + "' already registered with different content");
}

void check_binding_refs(const SkillGraph& g, const ExecutorBinding& b) {
  if (!g.skills.count(b.skill))
    throw GraphError(GraphError::Code::DanglingRef,
                     "binding references unregistered skill " + to_string(b.skill));
  if (!g.tools.count(b.tool))
    throw GraphError(GraphError::Code::DanglingRef, "binding references unknown tool '" + b.tool + "'");
  for (const auto& s : b.sensors)
    if (!g.sensors.count(s))
      throw GraphError(GraphError::Code::DanglingRef,
                       "binding references unknown sensor '" + s + "'");
  if (!g.executors.count(b.executor_name))
    throw GraphError(GraphError::Code::DanglingRef,
                     "binding references unknown executor '" + b.executor_name + "'");
  if (std::find(g.embodiments.begin(), g.embodiments.end(), b.embodiment) == g.embodiments.end())
    throw GraphError(GraphError::Code::DanglingRef,
                     "binding references unregistered embodiment " + to_string(b.embodiment.mode));
}

}  // namespace

SkillGraph register_skill(const SkillGraph& g, SkillId skill) {
  SkillGraph out = g;
  out.skills.insert(skill);
  return out;
}

SkillGraph register_object(const SkillGraph& g, const ObjectSpec& obj) {
  auto it = g.objects.find(obj.name);
  if (it != g.objects.end()) {
    if (it->second == obj) return g;  // idempotent
    throw_duplicate("object", obj.name);
  }
  SkillGraph out = g;
  out.objects.emplace(obj.name, obj);
  return out;
}

SkillGraph register_embodiment(const SkillGraph& g, const EmbodimentSpec& e) {
  if (std::find(g.embodiments.begin(), g.embodiments.end(), e) != g.embodiments.end()) return g;
  SkillGraph out = g;
  out.embodiments.push_back(e);
  return out;
}

SkillGraph register_tool(const SkillGraph& g, const ToolSpec& tool) {
  auto it = g.tools.find(tool.name);
  if (it != g.tools.end()) {
    if (it->second == tool) return g;
    throw_duplicate("tool", tool.name);
  }
  SkillGraph out = g;
  out.tools.emplace(tool.name, tool);
  return out;
}

SkillGraph register_sensor(const SkillGraph& g, const SensorSpec& sensor) {
  auto it = g.sensors.find(sensor.id);
  if (it != g.sensors.end()) {
    if (it->second == sensor) return g;
    throw_duplicate("sensor", sensor.id);
  }
  SkillGraph out = g;
  out.sensors.emplace(sensor.id, sensor);
  return out;
}

SkillGraph register_executor(const SkillGraph& g, const ExecutorDecl& ex) {
  auto it = g.executors.find(ex.name);
  if (it != g.executors.end()) {
    if (it->second == ex) return g;
    throw_duplicate("executor", ex.name);
  }
  SkillGraph out = g;
  out.executors.emplace(ex.name, ex);
  return out;
}

SkillGraph register_binding(const SkillGraph& g, const ExecutorBinding& b) {
  check_binding_refs(g, b);
  if (std::find(g.bindings.begin(), g.bindings.end(), b) != g.bindings.end()) return g;
  SkillGraph out = g;
  out.bindings.push_back(b);
  return out;
}

namespace {

void check_object_spec(const ObjectSpec& o, std::vector<Diagnostic>& out) {
  auto bad = [&](const std::string& msg) {
    out.push_back({DiagnosticSeverity::error, DiagnosticCode::BadObjectSpec,
                   "object '" + o.name + "': " + msg});
  };
  const auto& f = o.perceptive_features;
  if (o.category == ObjectCategory::sphere) {
    if (!(f.size() == 1 && f.count(PerceptiveFeature::position_only)))
      bad("sphere category requires perceptive_features == {position_only}");
  }
  if (o.category == ObjectCategory::cylinder && !f.count(PerceptiveFeature::upright_flag))
    bad("cylinder category requires the upright_flag feature");
  if (o.rigidity == Rigidity::deformable) {
    if (!f.count(PerceptiveFeature::edge_set)) bad("deformable objects require the edge_set feature");
    if (f.count(PerceptiveFeature::full_pose)) bad("deformable objects must not declare full_pose");
  }
}

bool binding_matches(const ExecutorBinding& b, SkillId skill,
                     const std::optional<ObjectCategory>& cat) {
  if (b.skill != skill) return false;
  if (!b.object_category) return true;  // wildcard
  return cat && *b.object_category == *cat;
}

// Skills every packable category needs a (possibly wildcard) binding for,
// derived from the nominal pack_item expansion.
constexpr SkillId kPerCategorySkills[] = {SkillId::DetectObject, SkillId::Pick,
                                          SkillId::DetectPick, SkillId::Transit, SkillId::Place};

// Object-free skills that must have at least one wildcard-capable binding.
constexpr SkillId kObjectFreeSkills[] = {SkillId::Stir, SkillId::Pack, SkillId::Hold,
                                         SkillId::Transit};

}  // namespace

std::vector<Diagnostic> validate(const SkillGraph& g) {
  std::vector<Diagnostic> diags;

  for (const auto& [name, obj] : g.objects) check_object_spec(obj, diags);

  for (const auto& b : g.bindings) {
    auto dangling = [&](const std::string& what) {
      diags.push_back({DiagnosticSeverity::error, DiagnosticCode::DanglingRef,
                       "binding " + to_string(b.skill) + "/" + b.executor_name +
                           " references missing " + what});
    };
    if (!g.skills.count(b.skill)) dangling("skill " + to_string(b.skill));
    if (!g.tools.count(b.tool)) dangling("tool '" + b.tool + "'");
    if (!g.executors.count(b.executor_name)) dangling("executor '" + b.executor_name + "'");
    for (const auto& s : b.sensors)
      if (!g.sensors.count(s)) dangling("sensor '" + s + "'");
    if (std::find(g.embodiments.begin(), g.embodiments.end(), b.embodiment) ==
        g.embodiments.end())
      dangling("embodiment " + to_string(b.embodiment.mode));
  }

  // Every category present in the object registry must be coverable.
  std::set<ObjectCategory> categories;
  for (const auto& [name, obj] : g.objects) categories.insert(obj.category);
  for (ObjectCategory cat : categories) {
    for (SkillId skill : kPerCategorySkills) {
      const bool covered = std::any_of(g.bindings.begin(), g.bindings.end(), [&](const auto& b) {
        return binding_matches(b, skill, cat);
      });
      if (!covered)
        diags.push_back({DiagnosticSeverity::error, DiagnosticCode::MissingBinding,
                         "no binding for skill " + to_string(skill) + " and category " +
                             to_string(cat)});
    }
    // Surface embodiment ambiguity as information only.
    std::set<EmbodimentMode> pick_modes;
    for (const auto& b : g.bindings)
      if (binding_matches(b, SkillId::Pick, cat)) pick_modes.insert(b.embodiment.mode);
    const bool has_single = pick_modes.count(EmbodimentMode::single_arm_left) ||
                            pick_modes.count(EmbodimentMode::single_arm_right);
    if (has_single && pick_modes.count(EmbodimentMode::dual_arm))
      diags.push_back({DiagnosticSeverity::info, DiagnosticCode::AmbiguousEmbodiment,
                       "category " + to_string(cat) +
                           " has both single-arm and dual-arm Pick bindings; data-file order "
                           "decides"});
  }

  for (SkillId skill : kObjectFreeSkills) {
    if (!g.skills.count(skill)) continue;
    const bool covered = std::any_of(g.bindings.begin(), g.bindings.end(),
                                     [&](const auto& b) { return b.skill == skill; });
    if (!covered)
      diags.push_back({DiagnosticSeverity::error, DiagnosticCode::MissingBinding,
                       "no binding for object-free skill " + to_string(skill)});
  }

  return diags;
}

GroundedExecution resolve(const SkillGraph& g, const exec::AtomicTask& task) {
  std::optional<ObjectCategory> cat;
  if (task.object) {
    auto it = g.objects.find(*task.object);
    if (it == g.objects.end())
      throw GraphError(GraphError::Code::NoBinding,
                       "task references unknown object '" + *task.object + "'");
    cat = it->second.category;
  }

  const ExecutorBinding* best = nullptr;
  bool best_specific = false;
  for (const auto& b : g.bindings) {
    if (!binding_matches(b, task.skill, cat)) continue;
    const bool specific = b.object_category.has_value();
    if (!best || (specific && !best_specific) ||
        (specific == best_specific && b.executor_name < best->executor_name)) {
      best = &b;
      best_specific = specific;
    }
  }
  if (!best) {
    std::ostringstream msg;
    msg << "no binding for skill " << to_string(task.skill);
    if (cat) msg << " and category " << to_string(*cat);
    throw GraphError(GraphError::Code::NoBinding, msg.str());
  }

  const ExecutorDecl& decl = g.executors.at(best->executor_name);
  for (const auto& key : decl.required_params) {
    if (!task.payload.count(key))
      throw GraphError(GraphError::Code::MissingParameter,
                       "executor '" + decl.name + "' requires payload key '" + key + "'");
  }

  GroundedExecution exec;
  exec.binding = *best;
  exec.parameters = task.payload;
  if (task.object) exec.parameters.emplace("object", *task.object);
  return exec;
}

}  // namespace packbot::skills
