#include "appsim/runner.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "appsim/errors.hpp"
#include "appsim/oracle.hpp"
#include "appsim/schematic.hpp"
#include "appsim/session.hpp"

namespace appsim {

namespace {

std::string observe_text(const ApplianceSpec& spec, const SessionState& state) {
  Session probe = Session::restore(spec, state);
  return observation_to_text(probe.observe());
}

struct Exchange {
  PlannerRequest request;
  PlannerResponse response;
};

class Run {
 public:
  Run(const TaskContext& ctx, int task) : ctx_(ctx) {
    report_.task = task;
    report_.episode_id = ctx.episode->id;
    report_.appliance = ctx.spec->id;
    report_.category = ctx.spec->category;
  }

  PlannerRequest base_request(const std::string& kind) const {
    PlannerRequest r;
    r.kind = kind;
    r.instruction = ctx_.episode->instruction;
    for (const auto& page : ctx_.manual->pages) r.manual_pages.push_back(page);
    r.oracle.spec = ctx_.spec;
    r.oracle.episode = ctx_.episode;
    r.oracle.manual = ctx_.manual;
    r.oracle.limits = ctx_.limits;
    return r;
  }

  PlannerResponse ask(const PlannerRequest& request) {
    PlannerResponse response = ctx_.planner->respond(request);
    if (response.status != PlannerResponse::Status::Ok) {
      ++report_.planner_failures;
      if (response.status == PlannerResponse::Status::Transport) ++report_.transport_failures;
    }
    report_.exchanges.push_back(
        {{"request", planner_request_to_json(request)},
         {"response", planner_response_to_json(response, request.kind)}});
    return response;
  }

  void note_malformed() { ++report_.planner_failures; }

  const TaskContext& ctx() const { return ctx_; }
  TaskReport& report() { return report_; }

 private:
  TaskContext ctx_;
  TaskReport report_;
};

// Parts a plan touches, in first-mention order. Object-only actions carry no
// part; Pour grounds its target.
std::vector<std::string> referenced_parts(const Plan& plan) {
  std::vector<std::string> out;
  for (const auto& step : plan.steps) {
    if (step.part.empty()) continue;
    if (std::find(out.begin(), out.end(), step.part) == out.end()) out.push_back(step.part);
  }
  return out;
}

double grounded_iou(Run& run, const std::string& part_name,
                    const std::vector<ManualPage>& context_pages) {
  const TaskContext& ctx = run.ctx();
  PlannerRequest req = run.base_request("ground");
  req.manual_pages = context_pages;
  req.query = part_name;
  req.schematic = render_panel_schematic(*ctx.spec);
  req.panel_width = ctx.spec->panel.width;
  req.panel_height = ctx.spec->panel.height;
  PlannerResponse resp = run.ask(req);
  if (resp.status != PlannerResponse::Status::Ok) return 0.0;
  const PartSpec* part = ctx.spec->part(part_name);
  if (!part) return 0.0;
  return iou(resp.bbox, part->panel_rect);
}

}  // namespace

const char* task_name(int task) {
  switch (task) {
    case 1: return "page_retrieval";
    case 2: return "open_loop";
    case 3: return "grounding";
    case 4: return "closed_loop";
    case 5: return "full_process";
  }
  return "unknown";
}

TaskReport run_page_retrieval(const TaskContext& ctx) {
  Run run(ctx, 1);
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  int queries = 0;
  for (const auto& [category, truth] : ctx.episode->relevant_pages) {
    PlannerRequest req = run.base_request("retrieve_pages");
    req.query = category;
    PlannerResponse resp = run.ask(req);
    RetrievalMetrics m;
    if (resp.status == PlannerResponse::Status::Ok) {
      try {
        m = eval_page_retrieval(resp.pages, truth, static_cast<int>(ctx.manual->pages.size()));
      } catch (const PageOutOfRange&) {
        run.note_malformed();
      }
    }
    precision += m.precision;
    recall += m.recall;
    f1 += m.f1;
    ++queries;
  }
  if (queries > 0) {
    run.report().retrieval = {precision / queries, recall / queries, f1 / queries};
  }
  return run.report();
}

TaskReport run_open_loop(const TaskContext& ctx) {
  Run run(ctx, 2);
  PlannerRequest req = run.base_request("plan");
  req.observation = observe_text(*ctx.spec, ctx.episode->initial_state);
  PlannerResponse resp = run.ask(req);
  Plan predicted;
  if (resp.status == PlannerResponse::Status::Ok) {
    try {
      predicted = parse_plan(resp.plan_text);
    } catch (const PlanParseError&) {
      run.note_malformed();
      predicted.steps.clear();
    }
  }
  run.report().open_loop = eval_open_loop(predicted, ctx.episode->gt_plan);
  return run.report();
}

TaskReport run_grounding(const TaskContext& ctx) {
  Run run(ctx, 3);
  std::vector<double> ious;
  std::vector<ManualPage> all_pages = run.base_request("ground").manual_pages;
  for (const auto& query : ctx.episode->grounding_queries) {
    ious.push_back(grounded_iou(run, query, all_pages));
  }
  run.report().grounding = eval_grounding(ious);
  return run.report();
}

TaskReport run_closed_loop(const TaskContext& ctx) {
  Run run(ctx, 4);
  Session sess = Session::restore(*ctx.spec, ctx.episode->initial_state);
  sess.set_settle_budget(ctx.limits.max_ticks_per_edge);

  std::deque<Perturbation> pending(ctx.episode->perturbations.begin(),
                                   ctx.episode->perturbations.end());
  std::stable_sort(pending.begin(), pending.end(),
                   [](const Perturbation& a, const Perturbation& b) {
                     return a.at_step < b.at_step;
                   });

  const auto& gt = ctx.episode->gt_plan.steps;
  std::vector<std::string> history;
  int queries = 0;
  int successes = 0;

  size_t step = 0;
  while (step < gt.size()) {
    if (!pending.empty() && pending.front().at_step == static_cast<int64_t>(step)) {
      const Perturbation p = pending.front();
      pending.pop_front();
      sess.apply_perturbation(p);
      const SessionState here = sess.snapshot();

      PlannerRequest req = run.base_request("next_action");
      req.observation = observe_text(*ctx.spec, here);
      req.history = history;
      req.initial_plan = format_plan(ctx.episode->gt_plan);
      req.oracle.state = &here;
      PlannerResponse resp = run.ask(req);
      ++queries;

      const auto valid = oracle_first_actions(*ctx.spec, here, ctx.episode->goal, ctx.limits);
      if (resp.status == PlannerResponse::Status::Ok) {
        try {
          const AtomicAction predicted = parse_action(resp.action_text);
          for (const auto& candidate : valid) {
            if (action_equal(predicted, candidate)) {
              ++successes;
              break;
            }
          }
        } catch (const ActionParseError&) {
          run.note_malformed();
        }
      }

      Plan recovery = oracle_plan(*ctx.spec, here, ctx.episode->goal, ctx.limits);
      if (!recovery.steps.empty()) {
        sess.execute_action(recovery.steps[0]);
        history.push_back(format_action(recovery.steps[0]));
      }
      continue;  // the pending plan step runs on the recovered state
    }

    ActionOutcome out = sess.execute_action(gt[step]);
    if (!out.ok) break;  // episode authoring error; integrity checks catch this
    history.push_back(format_action(gt[step]));
    ++step;
  }

  run.report().closed_loop.queries = queries;
  run.report().closed_loop.successes = successes;
  run.report().closed_loop.stepwise_success_rate =
      queries > 0 ? static_cast<double>(successes) / queries : 1.0;
  return run.report();
}

TaskReport run_full_process(const TaskContext& ctx) {
  Run run(ctx, 5);
  FullProcessMetrics& m = run.report().full_process;
  auto fail_stage = [&m](const std::string& stage) {
    if (std::find(m.failure_stages.begin(), m.failure_stages.end(), stage) ==
        m.failure_stages.end()) {
      m.failure_stages.push_back(stage);
    }
  };

  // Stage 1: retrieval. Only the retrieved pages travel downstream.
  PlannerRequest retrieve = run.base_request("retrieve_pages");
  PlannerResponse retrieved_resp = run.ask(retrieve);
  std::vector<ManualPage> retrieved;
  if (retrieved_resp.status == PlannerResponse::Status::Ok) {
    std::set<int> seen;
    for (int idx : retrieved_resp.pages) {
      if (idx < 1 || idx > static_cast<int>(ctx.manual->pages.size())) {
        run.note_malformed();
        continue;
      }
      if (seen.insert(idx).second) {
        retrieved.push_back(ctx.manual->pages[static_cast<size_t>(idx) - 1]);
      }
    }
  }

  // Stage 2: planning against the retrieved context.
  PlannerRequest plan_req = run.base_request("plan");
  plan_req.manual_pages = retrieved;
  plan_req.observation = observe_text(*ctx.spec, ctx.episode->initial_state);
  PlannerResponse plan_resp = run.ask(plan_req);
  Plan predicted;
  if (plan_resp.status == PlannerResponse::Status::Ok) {
    try {
      predicted = parse_plan(plan_resp.plan_text);
    } catch (const PlanParseError&) {
      run.note_malformed();
    }
  }
  if (predicted.steps.empty()) fail_stage("planning");

  // Stage 3: grounding every part the plan references.
  for (const auto& part : referenced_parts(predicted)) {
    if (grounded_iou(run, part, retrieved) < 0.5) fail_stage("grounding");
  }

  // Stage 4: stepwise execution with closed-loop adjustment.
  Session sess = Session::restore(*ctx.spec, ctx.episode->initial_state);
  sess.set_settle_budget(ctx.limits.max_ticks_per_edge);
  std::deque<Perturbation> pending(ctx.episode->perturbations.begin(),
                                   ctx.episode->perturbations.end());
  std::stable_sort(pending.begin(), pending.end(),
                   [](const Perturbation& a, const Perturbation& b) {
                     return a.at_step < b.at_step;
                   });
  const auto& gt = ctx.episode->gt_plan.steps;
  std::vector<std::string> history;
  int correct = 0;
  size_t step = 0;
  size_t cursor = 0;  // position in the predicted plan
  while (step < gt.size()) {
    if (!pending.empty() && pending.front().at_step == static_cast<int64_t>(step)) {
      const Perturbation p = pending.front();
      pending.pop_front();
      sess.apply_perturbation(p);
      const SessionState here = sess.snapshot();

      PlannerRequest req = run.base_request("next_action");
      req.manual_pages = retrieved;
      req.observation = observe_text(*ctx.spec, here);
      req.history = history;
      req.initial_plan = format_plan(predicted);
      req.oracle.state = &here;
      PlannerResponse resp = run.ask(req);

      const auto valid = oracle_first_actions(*ctx.spec, here, ctx.episode->goal, ctx.limits);
      bool adjusted = false;
      if (resp.status == PlannerResponse::Status::Ok) {
        try {
          const AtomicAction act = parse_action(resp.action_text);
          for (const auto& candidate : valid) {
            if (action_equal(act, candidate)) {
              adjusted = true;
              break;
            }
          }
        } catch (const ActionParseError&) {
          run.note_malformed();
        }
      }
      if (!adjusted) {
        fail_stage("execution");
        break;
      }
      Plan recovery = oracle_plan(*ctx.spec, here, ctx.episode->goal, ctx.limits);
      if (!recovery.steps.empty()) {
        sess.execute_action(recovery.steps[0]);
        history.push_back(format_action(recovery.steps[0]));
      }
      continue;
    }

    if (cursor >= predicted.steps.size()) {
      fail_stage("execution");  // plan ran out before the task did
      break;
    }
    if (!action_equal(predicted.steps[cursor], gt[step])) {
      fail_stage("execution");
      break;
    }
    ActionOutcome out = sess.execute_action(predicted.steps[cursor]);
    if (!out.ok) {
      fail_stage("execution");
      break;
    }
    history.push_back(format_action(predicted.steps[cursor]));
    ++correct;
    ++cursor;
    ++step;
  }
  if (step == gt.size() && cursor < predicted.steps.size()) {
    fail_stage("execution");  // plan keeps going after the task is done
  }

  m.completion_rate = gt.empty() ? 0.0 : static_cast<double>(correct) / gt.size();
  const bool goal_ok = goal_satisfied(*ctx.spec, sess.snapshot(), ctx.episode->goal);
  m.success = goal_ok && m.failure_stages.empty();
  return run.report();
}

TaskReport run_task(int task, const TaskContext& ctx) {
  switch (task) {
    case 1: return run_page_retrieval(ctx);
    case 2: return run_open_loop(ctx);
    case 3: return run_grounding(ctx);
    case 4: return run_closed_loop(ctx);
    case 5: return run_full_process(ctx);
  }
  throw MixedTask("task must be 1..5, got " + std::to_string(task));
}

nlohmann::ordered_json task_report_to_json(const TaskReport& r) {
  nlohmann::ordered_json metrics;
  switch (r.task) {
    case 1:
      metrics = {{"precision", r.retrieval.precision},
                 {"recall", r.retrieval.recall},
                 {"f1", r.retrieval.f1}};
      break;
    case 2:
      metrics = {{"completion_rate", r.open_loop.completion_rate},
                 {"success", r.open_loop.success}};
      break;
    case 3:
      metrics = {{"per_query_iou", r.grounding.per_query},
                 {"mean_iou", r.grounding.mean_iou},
                 {"map50", r.grounding.map50}};
      break;
    case 4:
      metrics = {{"queries", r.closed_loop.queries},
                 {"successes", r.closed_loop.successes},
                 {"stepwise_success_rate", r.closed_loop.stepwise_success_rate}};
      break;
    case 5:
      metrics = {{"completion_rate", r.full_process.completion_rate},
                 {"success", r.full_process.success},
                 {"failure_stages", r.full_process.failure_stages}};
      break;
    default: break;
  }
  return nlohmann::ordered_json{{"task", r.task},
                                {"task_name", task_name(r.task)},
                                {"episode", r.episode_id},
                                {"appliance", r.appliance},
                                {"category", r.category},
                                {"metrics", metrics},
                                {"planner_failures", r.planner_failures},
                                {"transport_failures", r.transport_failures},
                                {"exchanges", r.exchanges}};
}

}  // namespace appsim
