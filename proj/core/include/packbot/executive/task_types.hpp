#pragma once

#include "packbot/skills/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace packbot::exec {

/// A packing order: item names with quantities, optionally followed by a
/// box-sealing step.
struct TaskSpec {
  std::vector<std::pair<std::string, int>> items;
  bool seal = false;
};

enum class SubtaskKind { pack_item, seal_box };

enum class SubtaskStatus { pending, active, done, failed };

struct Subtask {
  SubtaskKind kind = SubtaskKind::pack_item;
  std::string object;  // empty for seal_box
  int index = 1;       // 1-based repetition index within the item
  SubtaskStatus status = SubtaskStatus::pending;
};

enum class TaskOrigin { nominal, recovery };

std::string to_string(TaskOrigin o);

/// One single-skill step within a subtask's plan.
struct AtomicTask {
  skills::SkillId skill = skills::SkillId::DetectObject;
  std::optional<std::string> object;
  skills::ParamMap payload;
  TaskOrigin origin = TaskOrigin::nominal;
  int subtask_index = 0;
};

enum class Outcome { success, perception_failure, pick_failure, motion_failure };

std::string to_string(Outcome o);

/// Step-by-step execution state: the atomic queue, a cursor, and per-subtask
/// retry bookkeeping.
struct Plan {
  std::vector<Subtask> subtasks;
  std::vector<AtomicTask> queue;
  std::size_t cursor = 0;
  std::vector<int> retry_counts;  // one per subtask
  int max_retries = 2;
  bool recovery_enabled = true;

  bool finished() const { return cursor >= queue.size(); }
  const AtomicTask& current() const { return queue.at(cursor); }
};

struct ProgressReport {
  int done = 0;
  int failed = 0;
  int pending = 0;   // includes the active subtask
  int nominal_executed = 0;
  int recovery_executed = 0;
  int total_subtasks = 0;
};

}  // namespace packbot::exec
