#pragma once

#include "packbot/executive/task_types.hpp"
#include "packbot/skills/skill_graph.hpp"

#include <stdexcept>

namespace packbot::exec {

class TaskError : public std::runtime_error {
 public:
  enum class Code { UnknownObject, InvalidState };
  TaskError(Code code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

/// One subtask per unit quantity, in item order, plus a trailing seal_box when
/// requested. Throws UnknownObject for names absent from the skill graph.
std::vector<Subtask> decompose_task(const TaskSpec& t, const skills::SkillGraph& graph);

/// Nominal atomic template for a pending subtask. pack_item expands to
/// [DetectObject, Pick, DetectPick, Transit, Place]; seal_box to
/// [Transit, Pack]. Recovery steps are never part of the nominal plan.
std::vector<AtomicTask> expand_subtask(const Subtask& s, int subtask_index,
                                       const skills::SkillGraph& graph);

/// Decompose + expand the whole task into an executable plan.
Plan make_plan(const TaskSpec& t, const skills::SkillGraph& graph, int max_retries = 2,
               bool recovery_enabled = true);

/// Advance the plan by one observed outcome for the task at the cursor.
///
/// Success moves the cursor. Failures insert the matching recovery template
/// (perception -> [Stir, DetectObject]; failed pick verification or motion ->
/// [DetectObject, Pick, DetectPick]; seal motion -> [Transit, Pack]) until the
/// subtask's retry budget is exhausted, after which the subtask is marked
/// failed and the cursor skips to the next subtask.
Plan monitor_step(const Plan& plan, Outcome outcome);

ProgressReport plan_progress(const Plan& plan);

}  // namespace packbot::exec
