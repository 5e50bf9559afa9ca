#include "packbot/harness/trial.hpp"

#include "packbot/executive/task_plan.hpp"
#include "packbot/harness/executors.hpp"

#include <json.hpp>

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

namespace packbot::harness {

using exec::Outcome;
using nlohmann::json;

std::string category_display_name(skills::ObjectCategory c) {
  using skills::ObjectCategory;
  switch (c) {
    case ObjectCategory::small_rigid: return "Small Rigid";
    case ObjectCategory::cylinder: return "Can";
    case ObjectCategory::sphere: return "Sphere";
    case ObjectCategory::cube: return "Cube";
    case ObjectCategory::cone: return "Cone";
    case ObjectCategory::cuboid_large: return "Cuboid";
    case ObjectCategory::flat_large: return "Large";
    case ObjectCategory::stacked: return "Stacked";
    case ObjectCategory::deformable: return "Soft";
    case ObjectCategory::small_precise: return "Small";
  }
  return "?";
}

TrialResult run_trial(const Scenario& scenario, std::uint64_t seed) {
  TrialResult result;
  result.seed = seed;

  TrialContext ctx;
  ctx.scenario = &scenario;
  ctx.world = sim::reset(scenario.scene, scenario.models, seed);
  ctx.rng = Rng(seed ^ 0x9E3779B97F4A7C15ULL);

  exec::Plan plan = exec::make_plan(scenario.task, scenario.graph, scenario.max_retries,
                                    scenario.recovery_enabled);

  // Hard bound from the termination invariant: nominal length plus the
  // largest possible recovery insertion per retry.
  const std::size_t step_budget =
      plan.queue.size() + 3 * static_cast<std::size_t>(scenario.max_retries + 1) *
                              std::max<std::size_t>(1, plan.subtasks.size());

  int step = 0;
  while (!plan.finished() && static_cast<std::size_t>(step) < step_budget) {
    const exec::AtomicTask task = plan.current();
    const skills::GroundedExecution grounded = skills::resolve(scenario.graph, task);
    const Outcome outcome = execute_grounded(ctx, grounded, task);

    TraceRecord rec;
    rec.trial = result.trial;
    rec.sim_time = ctx.world.clock;
    rec.subtask = task.subtask_index;
    rec.step = step++;
    rec.skill = skills::to_string(task.skill);
    rec.object = task.object.value_or("");
    rec.outcome = exec::to_string(outcome);
    rec.origin = exec::to_string(task.origin);
    result.records.push_back(rec);
    if (task.origin == exec::TaskOrigin::recovery) ++result.recovery_steps;

    plan = exec::monitor_step(plan, outcome);
  }

  // Ground-truth accounting: attempts per category from the task, successes
  // from instances that actually ended up in the box.
  for (const auto& st : plan.subtasks) {
    if (st.kind == exec::SubtaskKind::seal_box) {
      result.seal_attempted = true;
      continue;
    }
    const auto& spec = scenario.graph.objects.at(st.object);
    result.categories[category_display_name(spec.category)].attempts += 1;
    if (st.status == exec::SubtaskStatus::done) ++result.subtasks_done;
    if (st.status == exec::SubtaskStatus::failed) ++result.subtasks_failed;
  }
  std::map<std::string, int> in_box;
  for (const auto& obj : ctx.world.objects) {
    if (obj.status == sim::ObjectStatus::in_box)
      in_box[category_display_name(obj.spec.category)] += 1;
  }
  for (auto& [cat, tally] : result.categories)
    tally.success = std::min(tally.attempts, in_box.count(cat) ? in_box[cat] : 0);

  result.sealed = ctx.world.box.sealed();
  if (result.seal_attempted) {
    auto& seal = result.categories["Seal"];
    seal.attempts += 1;
    seal.success += result.sealed ? 1 : 0;
    for (const auto& st : plan.subtasks) {
      if (st.kind != exec::SubtaskKind::seal_box) continue;
      if (st.status == exec::SubtaskStatus::done) ++result.subtasks_done;
      if (st.status == exec::SubtaskStatus::failed) ++result.subtasks_failed;
    }
  }

  result.sim_time = ctx.world.clock;
  result.final_hash = sim::state_hash(ctx.world);
  return result;
}

TrialReport run_batch(const Scenario& scenario, int jobs) {
  TrialReport report;
  report.scenario_name = scenario.name;
  report.base_seed = scenario.base_seed;
  report.trials.resize(static_cast<std::size_t>(scenario.trials));

  const int workers = std::max(1, std::min(jobs, scenario.trials));
  std::atomic<int> next{0};
  auto worker = [&]() {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= scenario.trials) break;
      TrialResult r = run_trial(scenario, scenario.base_seed + static_cast<std::uint64_t>(i));
      r.trial = i;
      for (auto& rec : r.records) rec.trial = i;
      report.trials[static_cast<std::size_t>(i)] = std::move(r);
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (const auto& trial : report.trials) {
    for (const auto& [cat, tally] : trial.categories) {
      report.categories[cat].success += tally.success;
      report.categories[cat].attempts += tally.attempts;
    }
  }
  return report;
}

namespace {

json record_to_json(const TraceRecord& rec) {
  return json{{"trial", rec.trial},     {"sim_time", rec.sim_time}, {"subtask", rec.subtask},
              {"step", rec.step},       {"skill", rec.skill},       {"object", rec.object},
              {"outcome", rec.outcome}, {"origin", rec.origin}};
}

TraceRecord record_from_json(const json& j) {
  TraceRecord rec;
  rec.trial = j.at("trial").get<int>();
  rec.sim_time = j.at("sim_time").get<double>();
  rec.subtask = j.at("subtask").get<int>();
  rec.step = j.at("step").get<int>();
  rec.skill = j.at("skill").get<std::string>();
  rec.object = j.at("object").get<std::string>();
  rec.outcome = j.at("outcome").get<std::string>();
  rec.origin = j.at("origin").get<std::string>();
  return rec;
}

std::string hash_hex(std::uint64_t h) {
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

}  // namespace

void write_trace(std::ostream& out, const Scenario& scenario, const TrialResult& result) {
  out << json{{"header", true},
              {"scenario", scenario.source_path},
              {"trial", result.trial},
              {"seed", result.seed}}
             .dump()
      << "\n";
  for (const auto& rec : result.records) out << record_to_json(rec).dump() << "\n";
  out << json{{"footer", true}, {"trial", result.trial}, {"final_hash", hash_hex(result.final_hash)}}
             .dump()
      << "\n";
}

void write_trace_file(const std::string& path, const Scenario& scenario,
                      const std::vector<TrialResult>& results) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace file: " + path);
  for (const auto& r : results) write_trace(out, scenario, r);
}

ReplayResult replay_trace(const std::string& trace_path) {
  std::ifstream in(trace_path);
  if (!in) return {false, "cannot open trace file: " + trace_path};

  std::string scenario_path;
  std::uint64_t seed = 0;
  std::vector<TraceRecord> records;
  std::string final_hash;
  int trials_checked = 0;

  std::optional<Scenario> scenario;

  auto check_trial = [&]() -> ReplayResult {
    if (!scenario) {
      scenario = load_scenario(scenario_path);
    }
    TrialResult fresh = run_trial(*scenario, seed);
    if (fresh.records.size() != records.size())
      return {false, "record count mismatch at seed " + std::to_string(seed)};
    for (std::size_t i = 0; i < records.size(); ++i) {
      const auto& a = records[i];
      const auto& b = fresh.records[i];
      if (a.skill != b.skill || a.object != b.object || a.outcome != b.outcome ||
          a.origin != b.origin || a.subtask != b.subtask)
        return {false, "record " + std::to_string(i) + " mismatch at seed " + std::to_string(seed)};
    }
    if (hash_hex(fresh.final_hash) != final_hash)
      return {false, "final world hash mismatch at seed " + std::to_string(seed)};
    ++trials_checked;
    return {true, ""};
  };

  std::string line;
  bool in_trial = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      return {false, std::string("trace parse error: ") + e.what()};
    }
    if (j.value("header", false)) {
      scenario_path = j.at("scenario").get<std::string>();
      seed = j.at("seed").get<std::uint64_t>();
      records.clear();
      in_trial = true;
    } else if (j.value("footer", false)) {
      final_hash = j.at("final_hash").get<std::string>();
      if (!in_trial) return {false, "footer without header"};
      const ReplayResult r = check_trial();
      if (!r.ok) return r;
      in_trial = false;
    } else {
      records.push_back(record_from_json(j));
    }
  }
  if (trials_checked == 0) return {false, "trace contains no complete trials"};
  return {true, std::to_string(trials_checked) + " trial(s) replayed, all hashes match"};
}

}  // namespace packbot::harness
