#pragma once

#include "packbot/executive/task_types.hpp"
#include "packbot/skills/types.hpp"

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace packbot::skills {

/// Registry of the six interdependent element kinds. Immutable after
/// construction: registration returns a new graph, so resolution is safe to
/// run concurrently.
struct SkillGraph {
  std::set<SkillId> skills;
  std::map<std::string, ObjectSpec> objects;
  std::vector<EmbodimentSpec> embodiments;
  std::map<std::string, ToolSpec> tools;
  std::map<std::string, SensorSpec> sensors;
  std::map<std::string, ExecutorDecl> executors;
  std::vector<ExecutorBinding> bindings;
};

class GraphError : public std::runtime_error {
 public:
  enum class Code { DuplicateId, DanglingRef, NoBinding, MissingParameter };

  GraphError(Code code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

// Registration. Re-registering identical content is idempotent; registering a
// different element under an existing id throws DuplicateId. Bindings with
// unresolved references throw DanglingRef.
SkillGraph register_skill(const SkillGraph& g, SkillId skill);
SkillGraph register_object(const SkillGraph& g, const ObjectSpec& obj);
SkillGraph register_embodiment(const SkillGraph& g, const EmbodimentSpec& e);
SkillGraph register_tool(const SkillGraph& g, const ToolSpec& tool);
SkillGraph register_sensor(const SkillGraph& g, const SensorSpec& sensor);
SkillGraph register_executor(const SkillGraph& g, const ExecutorDecl& ex);
SkillGraph register_binding(const SkillGraph& g, const ExecutorBinding& b);

enum class DiagnosticCode {
  DanglingRef,
  MissingBinding,
  BadObjectSpec,
  AmbiguousEmbodiment,
};

enum class DiagnosticSeverity { info, error };

struct Diagnostic {
  DiagnosticSeverity severity = DiagnosticSeverity::error;
  DiagnosticCode code = DiagnosticCode::DanglingRef;
  std::string message;
};

/// Empty iff every graph invariant holds. Never throws; violations come back
/// as data. Info-level entries do not fail validation.
std::vector<Diagnostic> validate(const SkillGraph& g);

inline bool validation_clean(const std::vector<Diagnostic>& diags) {
  for (const auto& d : diags)
    if (d.severity == DiagnosticSeverity::error) return false;
  return true;
}

/// A resolved skill-object-embodiment-tool-executor-sensor binding plus the
/// parameters the executor needs.
struct GroundedExecution {
  ExecutorBinding binding;
  ParamMap parameters;
};

/// Deterministic grounding of an atomic task. Specific-category bindings beat
/// wildcards; ties break on executor_name. Throws NoBinding or
/// MissingParameter.
GroundedExecution resolve(const SkillGraph& g, const exec::AtomicTask& task);

}  // namespace packbot::skills
