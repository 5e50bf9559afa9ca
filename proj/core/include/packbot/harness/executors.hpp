#pragma once

#include "packbot/executive/task_types.hpp"
#include "packbot/harness/scenario.hpp"
#include "packbot/rng.hpp"

#include <functional>
#include <map>
#include <optional>

namespace packbot::harness {

/// Per-trial mutable state shared by the executors: the world, the perception
/// blackboard, and grasp/placement bookkeeping.
struct TrialContext {
  const Scenario* scenario = nullptr;
  sim::WorldState world;
  Rng rng{0};

  std::map<std::string, percept::PoseEstimate> estimates;
  std::map<std::string, std::vector<percept::EdgeCandidate>> edges;
  std::map<std::string, std::string> target_instance;
  std::optional<manip::GraspSpec> last_grasp;
  std::string last_grasp_object;
  std::vector<manip::PlacedFootprint> placed;
  int waypoints_skipped = 0;  // running count, for traces
};

using ExecutorFn = std::function<exec::Outcome(TrialContext&, const skills::GroundedExecution&,
                                               const exec::AtomicTask&)>;

/// Name -> implementation for every executor the default graph declares.
/// Registering a new name here plus a graph binding is the whole extension
/// story; existing entries never change behavior.
const std::map<std::string, ExecutorFn>& executor_registry();

/// Run one grounded atomic task against the context's world.
exec::Outcome execute_grounded(TrialContext& ctx, const skills::GroundedExecution& grounded,
                               const exec::AtomicTask& task);

}  // namespace packbot::harness
