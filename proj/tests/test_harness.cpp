#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <thread>

#include "appsim/episode.hpp"
#include "appsim/errors.hpp"
#include "appsim/manual.hpp"
#include "appsim/oracle.hpp"
#include "appsim/planner.hpp"
#include "appsim/report.hpp"
#include "appsim/runner.hpp"
#include "appsim/session.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "httplib.h"

using namespace appsim;
namespace fs = std::filesystem;

namespace {

Comparison param_is(const std::string& name, const std::string& value) {
  Comparison c;
  c.subject = Comparison::Subject::Parameter;
  c.name = name;
  c.op = CompareOp::Eq;
  c.value = value;
  return c;
}

Comparison part_is(const std::string& name, const std::string& label) {
  Comparison c;
  c.subject = Comparison::Subject::PartState;
  c.name = name;
  c.op = CompareOp::Eq;
  c.value = label;
  return c;
}

// One scripted cook on the microwave fixture, perturbed by the door popping
// open right before the start press. Every runner test works from this.
struct Bench {
  ApplianceSpec spec = fixtures::micro_spec();
  ManualDocument manual;
  Episode episode;

  Bench() {
    Session fresh(spec, 0);
    episode.id = "micro_cook_001";
    episode.appliance = spec.id;
    episode.instruction = "Cook for one minute.";
    episode.initial_state = fresh.snapshot();
    episode.goal = {param_is("run_state", "cooking")};
    episode.gt_plan = oracle_plan(spec, episode.initial_state, episode.goal);

    Perturbation p;
    p.at_step = 1;
    p.changes.push_back({EffectTarget::PartState, "door", std::string("open")});
    episode.perturbations.push_back(p);
    episode.grounding_queries = {"door", "timer_knob", "start_button"};

    ManualRecipe recipe;
    recipe.title = "Cook for one minute";
    recipe.steps = episode.gt_plan.steps;
    manual = render_manual(spec, 7, {recipe});
    episode.relevant_pages["operating_procedure"] = manual.pages_of("operating_procedure");
    episode.relevant_pages["safety_precaution"] = manual.pages_of("safety_precaution");
  }

  TaskContext ctx(Planner* planner) const {
    TaskContext c;
    c.spec = &spec;
    c.manual = &manual;
    c.episode = &episode;
    c.planner = planner;
    return c;
  }
};

std::unique_ptr<Planner> builtin(const std::string& address, uint64_t seed = 0) {
  return make_planner(endpoint_from_address(address), seed);
}

// Planner that answers every kind with a canned payload.
struct CannedPlanner final : Planner {
  PlannerResponse canned;
  std::string name() const override { return "canned"; }
  PlannerResponse respond(const PlannerRequest&) override { return canned; }
};

std::string write_script(const fs::path& dir, const std::string& name, const std::string& body) {
  fs::create_directories(dir);
  const fs::path path = dir / name;
  std::ofstream out(path);
  out << body;
  out.close();
  return path.string();
}

}  // namespace

TEST_CASE("oracle plans the canonical shortest cook sequence") {
  Bench b;
  REQUIRE(b.episode.gt_plan.steps.size() == 2);
  CHECK(format_plan(b.episode.gt_plan) ==
        "Rotate(timer_knob, \"1\", 36.0)\nPress(start_button, \"pressed\", 1)\n");

  // replaying it reaches the goal
  Session sess = Session::restore(b.spec, b.episode.initial_state);
  for (const auto& step : b.episode.gt_plan.steps) {
    REQUIRE(sess.execute_action(step).ok);
  }
  CHECK(goal_satisfied(b.spec, sess.snapshot(), b.episode.goal));
}

TEST_CASE("oracle returns an empty plan when the goal already holds") {
  Bench b;
  const Predicate already = {param_is("run_state", "idle")};
  CHECK(oracle_plan(b.spec, b.episode.initial_state, already).steps.empty());
  CHECK(oracle_first_actions(b.spec, b.episode.initial_state, already).empty());
}

TEST_CASE("oracle routes around an open door") {
  Bench b;
  Session sess(b.spec, 0);
  REQUIRE(sess.execute_action(parse_action("Open(door)")).ok);
  const SessionState opened = sess.snapshot();

  const Plan plan = oracle_plan(b.spec, opened, b.episode.goal);
  CHECK(format_plan(plan) ==
        "Rotate(timer_knob, \"1\", 36.0)\nClose(door)\nPress(start_button, \"pressed\", 1)\n");

  // ties at the first hop: any timer winding or closing the door shortens
  auto firsts = oracle_first_actions(b.spec, opened, b.episode.goal);
  REQUIRE(firsts.size() == 4);
  CHECK(format_action(firsts[0]) == "Rotate(timer_knob, \"1\", 36.0)");
  CHECK(format_action(firsts[1]) == "Rotate(timer_knob, \"2\", 72.0)");
  CHECK(format_action(firsts[2]) == "Rotate(timer_knob, \"3\", 108.0)");
  CHECK(format_action(firsts[3]) == "Close(door)");
}

TEST_CASE("oracle reports unreachable goals") {
  Bench b;
  Comparison latched = param_is("lever_latch", "");
  latched.value = int64_t{1};
  const Predicate goal = {latched};
  CHECK_THROWS_AS(oracle_plan(b.spec, b.episode.initial_state, goal), UnreachableGoal);
  CHECK_THROWS_AS(oracle_first_actions(b.spec, b.episode.initial_state, goal), UnreachableGoal);
}

TEST_CASE("episode json round-trips and survives integrity checks") {
  Bench b;
  CHECK(episode_filename(b.episode) == "micro_cook_001.episode.json");
  const auto j = episode_to_json(b.episode);
  const Episode back = episode_from_json(j, "rt");
  CHECK(back.id == b.episode.id);
  CHECK(back.appliance == b.episode.appliance);
  CHECK(back.instruction == b.episode.instruction);
  CHECK(back.initial_state == b.episode.initial_state);
  CHECK(back.goal == b.episode.goal);
  CHECK(format_plan(back.gt_plan) == format_plan(b.episode.gt_plan));
  CHECK(back.perturbations == b.episode.perturbations);
  CHECK(back.relevant_pages == b.episode.relevant_pages);
  CHECK(back.grounding_queries == b.episode.grounding_queries);

  CHECK(check_episode(b.episode, b.spec, static_cast<int>(b.manual.pages.size())).empty());
}

TEST_CASE("episode integrity checks flag authoring mistakes") {
  Bench b;
  const int pages = static_cast<int>(b.manual.pages.size());

  Episode e = b.episode;
  e.appliance = "other_machine";
  CHECK_FALSE(check_episode(e, b.spec, pages).empty());

  e = b.episode;
  e.goal = {param_is("no_such_param", "x")};
  CHECK_FALSE(check_episode(e, b.spec, pages).empty());

  e = b.episode;
  e.gt_plan.steps.clear();
  CHECK_FALSE(check_episode(e, b.spec, pages).empty());

  e = b.episode;
  e.perturbations[0].at_step = 99;
  CHECK_FALSE(check_episode(e, b.spec, pages).empty());

  e = b.episode;
  e.relevant_pages["operating_procedure"].push_back(pages + 1);
  CHECK_FALSE(check_episode(e, b.spec, pages).empty());

  e = b.episode;
  e.grounding_queries.push_back("no_such_part");
  CHECK_FALSE(check_episode(e, b.spec, pages).empty());
}

TEST_CASE("oracle planner is perfect on every task") {
  Bench b;
  auto oracle = builtin("builtin:oracle");

  TaskReport t1 = run_page_retrieval(b.ctx(oracle.get()));
  CHECK(t1.retrieval.precision == 1.0);
  CHECK(t1.retrieval.recall == 1.0);
  CHECK(t1.retrieval.f1 == 1.0);
  CHECK(t1.planner_failures == 0);
  CHECK(t1.exchanges.size() == b.episode.relevant_pages.size());

  TaskReport t2 = run_open_loop(b.ctx(oracle.get()));
  CHECK(t2.open_loop.completion_rate == 1.0);
  CHECK(t2.open_loop.success);

  TaskReport t3 = run_grounding(b.ctx(oracle.get()));
  REQUIRE(t3.grounding.per_query.size() == 3);
  CHECK(t3.grounding.mean_iou == 1.0);
  CHECK(t3.grounding.map50 == 1.0);

  TaskReport t4 = run_closed_loop(b.ctx(oracle.get()));
  CHECK(t4.closed_loop.queries == 1);
  CHECK(t4.closed_loop.successes == 1);
  CHECK(t4.closed_loop.stepwise_success_rate == 1.0);

  TaskReport t5 = run_full_process(b.ctx(oracle.get()));
  CHECK(t5.full_process.completion_rate == 1.0);
  CHECK(t5.full_process.success);
  CHECK(t5.full_process.failure_stages.empty());
  CHECK(t5.planner_failures == 0);
  CHECK(t5.transport_failures == 0);
}

TEST_CASE("a corrupted plan step k caps completion at (k-1)/L") {
  Bench b;
  const size_t len = b.episode.gt_plan.steps.size();
  for (size_t k = 1; k <= len; ++k) {
    auto planner = builtin("builtin:corrupt:" + std::to_string(k));
    TaskReport t2 = run_open_loop(b.ctx(planner.get()));
    CHECK(t2.open_loop.completion_rate ==
          static_cast<double>(k - 1) / static_cast<double>(len));
    CHECK_FALSE(t2.open_loop.success);
    CHECK(t2.planner_failures == 0);  // the plan is well-formed, merely wrong
  }
}

TEST_CASE("a corrupted step fails grounding and halts execution in the pipeline") {
  Bench b;
  auto planner = builtin("builtin:corrupt:2");
  TaskReport t5 = run_full_process(b.ctx(planner.get()));
  CHECK(t5.full_process.completion_rate == 0.5);
  CHECK_FALSE(t5.full_process.success);
  CHECK(t5.full_process.failure_stages ==
        std::vector<std::string>{"grounding", "execution"});

  auto first = builtin("builtin:corrupt:1");
  TaskReport early = run_full_process(b.ctx(first.get()));
  CHECK(early.full_process.completion_rate == 0.0);
  CHECK_FALSE(early.full_process.success);
}

TEST_CASE("closed loop scores the adjustment and recovers via the oracle") {
  Bench b;

  // a plausible but wrong adjustment scores zero without counting as malformed
  CannedPlanner wrong;
  wrong.canned.action_text = "Press(door_button, \"pressed\", 1)";
  TaskReport t4 = run_closed_loop(b.ctx(&wrong));
  CHECK(t4.closed_loop.queries == 1);
  CHECK(t4.closed_loop.successes == 0);
  CHECK(t4.closed_loop.stepwise_success_rate == 0.0);
  CHECK(t4.planner_failures == 0);

  // an unparseable adjustment also scores zero and is tallied as malformed
  CannedPlanner garbage;
  garbage.canned.action_text = "do the thing";
  t4 = run_closed_loop(b.ctx(&garbage));
  CHECK(t4.closed_loop.stepwise_success_rate == 0.0);
  CHECK(t4.planner_failures == 1);

  // no perturbations, no queries: vacuous success
  Episode calm = b.episode;
  calm.perturbations.clear();
  TaskContext ctx = b.ctx(&wrong);
  ctx.episode = &calm;
  t4 = run_closed_loop(ctx);
  CHECK(t4.closed_loop.queries == 0);
  CHECK(t4.closed_loop.stepwise_success_rate == 1.0);
}

TEST_CASE("unusable plans are tallied and scored zero") {
  Bench b;

  CannedPlanner garbled;
  garbled.canned.plan_text = "open sesame ???";
  TaskReport t2 = run_open_loop(b.ctx(&garbled));
  CHECK(t2.open_loop.completion_rate == 0.0);
  CHECK_FALSE(t2.open_loop.success);
  CHECK(t2.planner_failures == 1);

  CannedPlanner empty;
  empty.canned.plan_text = "";
  TaskReport t5 = run_full_process(b.ctx(&empty));
  CHECK(t5.full_process.completion_rate == 0.0);
  CHECK_FALSE(t5.full_process.success);
  CHECK(t5.full_process.failure_stages ==
        std::vector<std::string>{"planning", "execution"});
}

TEST_CASE("random planner is deterministic for a fixed seed") {
  Bench b;
  auto a = builtin("builtin:random", 11);
  auto c = builtin("builtin:random", 11);
  for (int task = 1; task <= 5; ++task) {
    TaskReport ra = run_task(task, b.ctx(a.get()));
    TaskReport rc = run_task(task, b.ctx(c.get()));
    CHECK(task_report_to_json(ra).dump() == task_report_to_json(rc).dump());
  }

  // with this seed the random plan is not the ground truth
  auto d = builtin("builtin:random", 11);
  TaskReport t2 = run_open_loop(b.ctx(d.get()));
  CHECK_FALSE(t2.open_loop.success);
}

TEST_CASE("run_task dispatches and rejects unknown task numbers") {
  Bench b;
  auto oracle = builtin("builtin:oracle");
  TaskReport r = run_task(3, b.ctx(oracle.get()));
  CHECK(r.task == 3);
  CHECK(r.grounding.mean_iou == 1.0);
  CHECK(std::string(task_name(3)) == "grounding");
  CHECK_THROWS_AS(run_task(9, b.ctx(oracle.get())), MixedTask);
}

TEST_CASE("task report json carries identity, metrics and exchange log") {
  Bench b;
  auto oracle = builtin("builtin:oracle");
  const auto j = task_report_to_json(run_open_loop(b.ctx(oracle.get())));
  CHECK(j["task"] == 2);
  CHECK(j["task_name"] == "open_loop");
  CHECK(j["episode"] == "micro_cook_001");
  CHECK(j["appliance"] == "microwave_test");
  CHECK(j["category"] == "microwave_oven");
  CHECK(j["metrics"]["completion_rate"] == 1.0);
  CHECK(j["metrics"]["success"] == true);
  REQUIRE(j["exchanges"].size() == 1);
  CHECK(j["exchanges"][0]["request"]["protocol_version"] == 1);
  CHECK(j["exchanges"][0]["request"]["kind"] == "plan");
}

TEST_CASE("wire requests never leak the oracle side channel") {
  Bench b;
  auto oracle = builtin("builtin:oracle");
  TaskReport t5 = run_full_process(b.ctx(oracle.get()));
  for (const auto& exchange : t5.exchanges) {
    const auto& req = exchange["request"];
    CHECK_FALSE(req.contains("oracle"));
    CHECK_FALSE(req.contains("goal"));
    CHECK_FALSE(req.contains("gt_plan"));
  }
}

TEST_CASE("oracle grounding answers zeros for unknown parts") {
  Bench b;
  auto oracle = builtin("builtin:oracle");
  PlannerRequest req;
  req.kind = "ground";
  req.query = "__nowhere__";
  req.oracle.spec = &b.spec;
  req.oracle.episode = &b.episode;
  req.oracle.manual = &b.manual;
  const PlannerResponse resp = oracle->respond(req);
  CHECK(resp.status == PlannerResponse::Status::Ok);
  CHECK(resp.bbox == BoundingBox{0.0, 0.0, 0.0, 0.0});
}

TEST_CASE("subprocess planner speaks line-delimited json over stdio") {
  const fs::path dir = fs::temp_directory_path() / "appsim_echo_planner";
  const std::string script = write_script(dir, "echo_planner.py", R"PY(
import json, sys
for line in sys.stdin:
    req = json.loads(line)
    kind = req["kind"]
    out = {}
    if kind == "retrieve_pages":
        out["pages"] = [1, 2]
    elif kind == "plan":
        out["plan_text"] = "Open(door)\nClose(door)\n"
    elif kind == "ground":
        out["bbox"] = [40, 60, 430, 540]
    elif kind == "next_action":
        out["action_text"] = "Close(door)"
    sys.stdout.write(json.dumps(out) + "\n")
    sys.stdout.flush()
)PY");

  auto planner = make_planner(endpoint_from_address("cmd:python3 " + script, 20.0), 0);
  PlannerRequest req;

  req.kind = "retrieve_pages";
  PlannerResponse resp = planner->respond(req);
  REQUIRE(resp.status == PlannerResponse::Status::Ok);
  CHECK(resp.pages == std::vector<int>{1, 2});

  req.kind = "plan";
  resp = planner->respond(req);
  REQUIRE(resp.status == PlannerResponse::Status::Ok);
  CHECK(parse_plan(resp.plan_text).steps.size() == 2);

  req.kind = "ground";
  resp = planner->respond(req);
  REQUIRE(resp.status == PlannerResponse::Status::Ok);
  CHECK(resp.bbox == BoundingBox{40.0, 60.0, 430.0, 540.0});

  req.kind = "next_action";
  resp = planner->respond(req);
  REQUIRE(resp.status == PlannerResponse::Status::Ok);
  CHECK(resp.action_text == "Close(door)");
}

TEST_CASE("subprocess planner times out and recovers on the next request") {
  auto planner = make_planner(endpoint_from_address("cmd:sleep 30", 0.25), 0);
  PlannerRequest req;
  req.kind = "plan";
  PlannerResponse resp = planner->respond(req);
  CHECK(resp.status == PlannerResponse::Status::Timeout);
  // the dead child is respawned, not reused
  resp = planner->respond(req);
  CHECK(resp.status == PlannerResponse::Status::Timeout);
}

TEST_CASE("subprocess planner reports a dead child as a transport failure") {
  auto planner = make_planner(endpoint_from_address("cmd:true", 5.0), 0);
  PlannerRequest req;
  req.kind = "plan";
  const PlannerResponse resp = planner->respond(req);
  CHECK(resp.status == PlannerResponse::Status::Transport);
}

TEST_CASE("subprocess planner flags non-json replies as malformed") {
  const fs::path dir = fs::temp_directory_path() / "appsim_garbage_planner";
  const std::string script = write_script(dir, "garbage.py", R"PY(
import sys
sys.stdin.readline()
print("not json")
sys.stdout.flush()
sys.stdin.readline()
)PY");
  auto planner = make_planner(endpoint_from_address("cmd:python3 " + script, 20.0), 0);
  PlannerRequest req;
  req.kind = "plan";
  const PlannerResponse resp = planner->respond(req);
  CHECK(resp.status == PlannerResponse::Status::Malformed);
}

TEST_CASE("http planner round-trips against a live endpoint") {
  httplib::Server server;
  server.Post("/v1/respond", [](const httplib::Request& q, httplib::Response& s) {
    const auto j = nlohmann::json::parse(q.body);
    const std::string instruction = j.value("instruction", "");
    if (instruction == "boom") {
      s.status = 500;
      s.set_content("no", "text/plain");
      return;
    }
    if (instruction == "garble") {
      s.set_content("not json", "application/json");
      return;
    }
    nlohmann::json out;
    const std::string kind = j["kind"];
    if (kind == "plan") out["plan_text"] = "Open(door)\n";
    if (kind == "retrieve_pages") out["pages"] = {3};
    if (kind == "ground") out["bbox"] = {1, 2, 3, 4};
    if (kind == "next_action") out["action_text"] = "Open(door)";
    s.set_content(out.dump(), "application/json");
  });

  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread serve([&server] { server.listen_after_bind(); });
  server.wait_until_ready();

  const std::string address = "http://127.0.0.1:" + std::to_string(port);
  auto planner = make_planner(endpoint_from_address(address, 10.0), 0);

  PlannerRequest req;
  req.kind = "plan";
  PlannerResponse resp = planner->respond(req);
  REQUIRE(resp.status == PlannerResponse::Status::Ok);
  CHECK(resp.plan_text == "Open(door)\n");

  req.kind = "ground";
  resp = planner->respond(req);
  REQUIRE(resp.status == PlannerResponse::Status::Ok);
  CHECK(resp.bbox == BoundingBox{1.0, 2.0, 3.0, 4.0});

  req.kind = "plan";
  req.instruction = "boom";
  resp = planner->respond(req);
  CHECK(resp.status == PlannerResponse::Status::Transport);

  req.instruction = "garble";
  resp = planner->respond(req);
  CHECK(resp.status == PlannerResponse::Status::Malformed);

  server.stop();
  serve.join();

  // endpoint gone: connection refused is a transport failure
  req.instruction = "";
  resp = planner->respond(req);
  CHECK(resp.status == PlannerResponse::Status::Transport);
}

TEST_CASE("prediction planner replays recorded responses in request order") {
  Bench b;
  const fs::path dir = fs::temp_directory_path() / "appsim_predictions";
  fs::remove_all(dir);
  fs::create_directories(dir);

  std::ofstream out(dir / "micro_cook_001.jsonl");
  nlohmann::json line;
  line["key"] = {{"episode", "micro_cook_001"}, {"kind", "plan"}, {"index", 0}};
  line["response"] = {{"plan_text", format_plan(b.episode.gt_plan)}};
  out << line.dump() << "\n";
  out.close();

  auto planner = builtin("predictions:" + dir.string());
  TaskReport t2 = run_open_loop(b.ctx(planner.get()));
  CHECK(t2.open_loop.completion_rate == 1.0);
  CHECK(t2.open_loop.success);
  CHECK(t2.planner_failures == 0);

  // the second plan request for the same episode has no recording
  t2 = run_open_loop(b.ctx(planner.get()));
  CHECK(t2.open_loop.completion_rate == 0.0);
  CHECK(t2.planner_failures == 1);
  CHECK(t2.transport_failures == 0);
}

TEST_CASE("prediction planner construction validates the directory") {
  CHECK_THROWS_AS(builtin("predictions:/no/such/dir"), PlannerError);

  const fs::path dir = fs::temp_directory_path() / "appsim_bad_predictions";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "bad.jsonl") << "{ not json\n";
  CHECK_THROWS_AS(builtin("predictions:" + dir.string()), PlannerError);
}

TEST_CASE("planner addresses parse into the right transports") {
  CHECK(endpoint_from_address("builtin:oracle").transport ==
        PlannerEndpoint::Transport::Builtin);
  CHECK(endpoint_from_address("predictions:/tmp/x").transport ==
        PlannerEndpoint::Transport::Builtin);
  CHECK(endpoint_from_address("cmd:python3 x.py").transport ==
        PlannerEndpoint::Transport::Subprocess);
  CHECK(endpoint_from_address("http://h:1").transport == PlannerEndpoint::Transport::Http);
  CHECK(endpoint_from_address("https://h:1").transport == PlannerEndpoint::Transport::Http);
  CHECK_THROWS_AS(endpoint_from_address("carrier:pigeon"), PlannerError);
  CHECK_THROWS_AS(builtin("builtin:corrupt:0"), PlannerError);
  CHECK_THROWS_AS(builtin("builtin:nonsense"), PlannerError);
  CHECK_THROWS_AS(make_planner(endpoint_from_address("builtin:oracle", -1.0), 0), PlannerError);
}

TEST_CASE("aggregation averages per category and overall") {
  Bench b;
  auto oracle = builtin("builtin:oracle");
  auto corrupt = builtin("builtin:corrupt:1");

  // a second appliance in another category, solved perfectly
  ApplianceSpec toggle = fixtures::toggle_spec();
  Session fresh(toggle, 0);
  Episode flip;
  flip.id = "toggle_on_001";
  flip.appliance = toggle.id;
  flip.instruction = "Turn the switch on.";
  flip.initial_state = fresh.snapshot();
  flip.goal = {part_is("switch", "on")};
  flip.gt_plan = oracle_plan(toggle, flip.initial_state, flip.goal);
  REQUIRE(flip.gt_plan.steps.size() == 1);
  ManualDocument toggle_manual = render_manual(toggle, 3);
  flip.relevant_pages["operating_procedure"] = toggle_manual.pages_of("operating_procedure");
  flip.grounding_queries = {"switch", "lamp"};

  TaskContext toggle_ctx;
  toggle_ctx.spec = &toggle;
  toggle_ctx.manual = &toggle_manual;
  toggle_ctx.episode = &flip;
  toggle_ctx.planner = oracle.get();

  std::vector<TaskReport> reports;
  reports.push_back(run_open_loop(b.ctx(oracle.get())));
  reports.push_back(run_open_loop(b.ctx(corrupt.get())));
  reports.push_back(run_open_loop(toggle_ctx));

  const Summary s = aggregate_reports(reports);
  CHECK(s.task == 2);
  REQUIRE(s.per_category.size() == 2);
  CHECK(s.per_category[0].category == "kettle");
  CHECK(s.per_category[0].episodes == 1);
  CHECK(s.per_category[1].category == "microwave_oven");
  CHECK(s.per_category[1].episodes == 2);
  CHECK(s.overall.episodes == 3);

  auto metric = [](const SummaryRow& row, const std::string& name) {
    for (const auto& [key, value] : row.metrics) {
      if (key == name) return value;
    }
    return -1.0;
  };
  CHECK(metric(s.per_category[1], "completion_rate") == 0.5);
  CHECK(metric(s.per_category[1], "success_rate") == 0.5);
  CHECK(metric(s.per_category[0], "completion_rate") == 1.0);
  CHECK(metric(s.overall, "completion_rate") == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  const std::string table = summary_to_text(s);
  CHECK(table.find("open_loop") != std::string::npos);
  CHECK(table.find("kettle") != std::string::npos);
  CHECK(table.find("microwave_oven") != std::string::npos);
  CHECK(table.find("overall") != std::string::npos);
  CHECK(table.find("0.5000") != std::string::npos);

  const auto j = summary_to_json(s);
  CHECK(j["task"] == 2);
  CHECK(j["overall"]["episodes"] == 3);

  CHECK_THROWS_AS(aggregate_reports({}), MixedTask);
  std::vector<TaskReport> mixed = {run_open_loop(b.ctx(oracle.get())),
                                   run_grounding(b.ctx(oracle.get()))};
  CHECK_THROWS_AS(aggregate_reports(mixed), MixedTask);
}
