#include "packbot/executive/task_plan.hpp"

#include <algorithm>

namespace packbot::exec {

using skills::SkillId;

std::string to_string(TaskOrigin o) {
  return o == TaskOrigin::nominal ? "nominal" : "recovery";
}

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::success: return "success";
    case Outcome::perception_failure: return "perception_failure";
    case Outcome::pick_failure: return "pick_failure";
    case Outcome::motion_failure: return "motion_failure";
  }
  return "?";
}

std::vector<Subtask> decompose_task(const TaskSpec& t, const skills::SkillGraph& graph) {
  std::vector<Subtask> out;
  for (const auto& [name, quantity] : t.items) {
    if (quantity < 1)
      throw TaskError(TaskError::Code::UnknownObject,
                      "item '" + name + "' has non-positive quantity");
    if (!graph.objects.count(name))
      throw TaskError(TaskError::Code::UnknownObject,
                      "item '" + name + "' is not registered in the skill graph");
    for (int j = 1; j <= quantity; ++j) out.push_back({SubtaskKind::pack_item, name, j});
  }
  if (t.seal) out.push_back({SubtaskKind::seal_box, "", 1});
  return out;
}

std::vector<AtomicTask> expand_subtask(const Subtask& s, int subtask_index,
                                       const skills::SkillGraph& graph) {
  if (s.status != SubtaskStatus::pending && s.status != SubtaskStatus::active)
    throw TaskError(TaskError::Code::InvalidState,
                    "cannot expand a subtask that is already done or failed");
  std::vector<AtomicTask> out;
  auto add = [&](SkillId skill, std::optional<std::string> object) {
    AtomicTask t;
    t.skill = skill;
    t.object = std::move(object);
    t.origin = TaskOrigin::nominal;
    t.subtask_index = subtask_index;
    out.push_back(std::move(t));
  };
  if (s.kind == SubtaskKind::pack_item) {
    if (!graph.objects.count(s.object))
      throw TaskError(TaskError::Code::UnknownObject, "unknown object '" + s.object + "'");
    add(SkillId::DetectObject, s.object);
    add(SkillId::Pick, s.object);
    add(SkillId::DetectPick, s.object);
    add(SkillId::Transit, s.object);
    add(SkillId::Place, s.object);
  } else {
    add(SkillId::Transit, std::nullopt);
    add(SkillId::Pack, std::nullopt);
  }
  return out;
}

Plan make_plan(const TaskSpec& t, const skills::SkillGraph& graph, int max_retries,
               bool recovery_enabled) {
  Plan plan;
  plan.subtasks = decompose_task(t, graph);
  plan.max_retries = max_retries;
  plan.recovery_enabled = recovery_enabled;
  plan.retry_counts.assign(plan.subtasks.size(), 0);
  for (std::size_t i = 0; i < plan.subtasks.size(); ++i) {
    auto tasks = expand_subtask(plan.subtasks[i], static_cast<int>(i), graph);
    plan.queue.insert(plan.queue.end(), tasks.begin(), tasks.end());
  }
  if (!plan.subtasks.empty()) plan.subtasks[0].status = SubtaskStatus::active;
  return plan;
}

namespace {

// Recovery templates, origin set to recovery by the caller.
std::vector<AtomicTask> recovery_template(const AtomicTask& failed, Outcome outcome) {
  std::vector<AtomicTask> out;
  auto add = [&](SkillId skill, std::optional<std::string> object) {
    AtomicTask t;
    t.skill = skill;
    t.object = std::move(object);
    t.origin = TaskOrigin::recovery;
    t.subtask_index = failed.subtask_index;
    out.push_back(std::move(t));
  };
  if (outcome == Outcome::perception_failure) {
    add(SkillId::Stir, failed.object);
    add(SkillId::DetectObject, failed.object);
  } else if (failed.object) {
    // Failed pick verification and motion failures both re-detect and re-pick.
    add(SkillId::DetectObject, failed.object);
    add(SkillId::Pick, failed.object);
    add(SkillId::DetectPick, failed.object);
  } else {
    // Seal-branch motion failure: retry the scripted sequence.
    add(SkillId::Transit, std::nullopt);
    add(SkillId::Pack, std::nullopt);
  }
  return out;
}

void advance_statuses(Plan& plan) {
  // Mark a subtask done once the cursor has passed its last queued task.
  for (std::size_t i = 0; i < plan.subtasks.size(); ++i) {
    auto& st = plan.subtasks[i];
    if (st.status == SubtaskStatus::done || st.status == SubtaskStatus::failed) continue;
    bool has_remaining = false;
    for (std::size_t k = plan.cursor; k < plan.queue.size(); ++k) {
      if (plan.queue[k].subtask_index == static_cast<int>(i)) {
        has_remaining = true;
        break;
      }
    }
    st.status = has_remaining ? st.status : SubtaskStatus::done;
  }
  // Activate the subtask at the cursor.
  if (!plan.finished()) {
    auto& st = plan.subtasks[plan.queue[plan.cursor].subtask_index];
    if (st.status == SubtaskStatus::pending) st.status = SubtaskStatus::active;
  }
}

void skip_subtask(Plan& plan, int subtask_index) {
  plan.subtasks[subtask_index].status = SubtaskStatus::failed;
  while (!plan.finished() && plan.queue[plan.cursor].subtask_index == subtask_index)
    ++plan.cursor;
}

}  // namespace

Plan monitor_step(const Plan& input, Outcome outcome) {
  Plan plan = input;
  if (plan.finished())
    throw TaskError(TaskError::Code::InvalidState, "monitor_step on a finished plan");

  const AtomicTask failed = plan.current();
  const int sub = failed.subtask_index;

  if (outcome == Outcome::success) {
    ++plan.cursor;
    advance_statuses(plan);
    return plan;
  }

  if (!plan.recovery_enabled || plan.retry_counts[sub] >= plan.max_retries) {
    ++plan.cursor;
    skip_subtask(plan, sub);
    advance_statuses(plan);
    return plan;
  }

  ++plan.retry_counts[sub];
  auto recovery = recovery_template(failed, outcome);
  // The recovery tasks run next, in place of re-running the failed instance.
  plan.queue.insert(plan.queue.begin() + static_cast<long>(plan.cursor) + 1, recovery.begin(),
                    recovery.end());
  ++plan.cursor;
  advance_statuses(plan);
  return plan;
}

ProgressReport plan_progress(const Plan& plan) {
  ProgressReport r;
  r.total_subtasks = static_cast<int>(plan.subtasks.size());
  for (const auto& st : plan.subtasks) {
    switch (st.status) {
      case SubtaskStatus::done: ++r.done; break;
      case SubtaskStatus::failed: ++r.failed; break;
      case SubtaskStatus::pending:
      case SubtaskStatus::active: ++r.pending; break;
    }
  }
  for (std::size_t k = 0; k < std::min(plan.cursor, plan.queue.size()); ++k) {
    if (plan.queue[k].origin == TaskOrigin::nominal)
      ++r.nominal_executed;
    else
      ++r.recovery_executed;
  }
  return r;
}

}  // namespace packbot::exec
