#pragma once

#include <string>

#include "appsim/episode.hpp"
#include "appsim/manual.hpp"
#include "appsim/metrics.hpp"
#include "appsim/planner.hpp"
#include "appsim/spec.hpp"
#include "appsim/state_graph.hpp"
#include "json.hpp"

namespace appsim {

struct TaskContext {
  const ApplianceSpec* spec = nullptr;
  const ManualDocument* manual = nullptr;
  const Episode* episode = nullptr;
  Planner* planner = nullptr;
  EnumerationLimits limits;
};

struct TaskReport {
  int task = 0;
  std::string episode_id;
  std::string appliance;
  std::string category;

  RetrievalMetrics retrieval;        // task 1
  OpenLoopMetrics open_loop;         // task 2
  GroundingMetrics grounding;        // task 3
  ClosedLoopMetrics closed_loop;     // task 4
  FullProcessMetrics full_process;   // task 5

  // Timeouts, malformed payloads and transport errors; kept apart from
  // planning mistakes, which only lower the scores.
  int planner_failures = 0;
  int transport_failures = 0;
  nlohmann::ordered_json exchanges = nlohmann::ordered_json::array();
};

// One manual page category per query; metrics averaged over the episode's
// queries.
TaskReport run_page_retrieval(const TaskContext& ctx);

// One full plan from instruction, manual and the initial observation.
TaskReport run_open_loop(const TaskContext& ctx);

// One bounding box per grounding query, scored against the spec's panel
// rects.
TaskReport run_grounding(const TaskContext& ctx);

// Replays gt_plan on a live session. Each perturbation claims one loop turn:
// the planner's next action is scored against the oracle first-action set,
// then the oracle's canonical recovery runs so the rollout continues and the
// pending plan step is retried.
TaskReport run_closed_loop(const TaskContext& ctx);

// Retrieval, planning on the retrieved pages only, grounding of every part
// the plan touches (IoU under 0.5 fails the episode), then stepwise
// execution with closed-loop adjustment at perturbed steps.
TaskReport run_full_process(const TaskContext& ctx);

TaskReport run_task(int task, const TaskContext& ctx);

const char* task_name(int task);

nlohmann::ordered_json task_report_to_json(const TaskReport& r);

}  // namespace appsim
