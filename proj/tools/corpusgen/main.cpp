// Generates the bundled corpus: appliance specs, manuals, schematics,
// episodes and the negative fixtures for validator tests. Every artifact is
// proven before it is written: specs must validate with zero findings, plans
// must replay to their goals, every perturbation must leave the goal
// recoverable, and the reference planner must score perfectly on all five
// tasks for every episode.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "appsim/actions.hpp"
#include "appsim/episode.hpp"
#include "appsim/errors.hpp"
#include "appsim/manual.hpp"
#include "appsim/oracle.hpp"
#include "appsim/planner.hpp"
#include "appsim/runner.hpp"
#include "appsim/schematic.hpp"
#include "appsim/session.hpp"
#include "appsim/spec_io.hpp"
#include "appsim/validate.hpp"

namespace fs = std::filesystem;
using namespace appsim;

namespace {

void check(bool ok, const std::string& what) {
  if (!ok) throw std::runtime_error(what);
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

Comparison param_is(const std::string& name, ParamValue v) {
  Comparison c;
  c.subject = Comparison::Subject::Parameter;
  c.name = name;
  c.op = CompareOp::Eq;
  c.value = std::move(v);
  return c;
}

Comparison part_is(const std::string& part, const std::string& label) {
  Comparison c;
  c.subject = Comparison::Subject::PartState;
  c.name = part;
  c.op = CompareOp::Eq;
  c.value = label;
  return c;
}

Effect part_fx(const std::string& part, const std::string& label) {
  return Effect{EffectTarget::PartState, part, label};
}

Effect param_fx(const std::string& name, ParamValue v) {
  return Effect{EffectTarget::Parameter, name, std::move(v)};
}

Perturbation pert(int64_t at_step, std::vector<Effect> changes) {
  Perturbation p;
  p.at_step = at_step;
  p.changes = std::move(changes);
  return p;
}

struct Draft {
  std::string id;
  std::string instruction;
  std::vector<std::string> setup;  // action lines executed from a fresh session
  Predicate goal;
  std::vector<Perturbation> perturbations;
  std::vector<std::string> queries;
};

struct Bundle {
  std::string json;
  std::vector<Draft> drafts;
};

// Turns a draft into a checked episode: the setup must execute, the goal must
// be open, the canonical plan must replay to the goal, and every perturbation
// must leave a recovery whose first step differs from the pending plan step.
Episode realize(const ApplianceSpec& spec, const Draft& d, uint64_t seed) {
  Episode e;
  e.id = d.id;
  e.appliance = spec.id;
  e.instruction = d.instruction;
  e.goal = d.goal;
  e.perturbations = d.perturbations;
  e.grounding_queries = d.queries;

  Session sess(spec, seed);
  for (const auto& line : d.setup) {
    const ActionOutcome out = sess.execute_action(parse_action(line));
    check(out.ok, d.id + ": setup step '" + line + "' rejected: " + out.message);
  }
  e.initial_state = sess.snapshot();
  check(!goal_satisfied(spec, e.initial_state, e.goal), d.id + ": goal holds initially");

  e.gt_plan = oracle_plan(spec, e.initial_state, e.goal);
  check(!e.gt_plan.steps.empty(), d.id + ": no plan reaches the goal");

  Session replay = Session::restore(spec, e.initial_state);
  for (const auto& step : e.gt_plan.steps) {
    const ActionOutcome out = replay.execute_action(step);
    check(out.ok, d.id + ": plan step '" + format_action(step) + "' rejected: " + out.message);
  }
  check(goal_satisfied(spec, replay.snapshot(), e.goal), d.id + ": plan misses the goal");

  for (const auto& p : e.perturbations) {
    check(p.at_step >= 0 && p.at_step < static_cast<int64_t>(e.gt_plan.steps.size()),
          d.id + ": perturbation step outside plan");
    Session probe = Session::restore(spec, e.initial_state);
    for (int64_t i = 0; i < p.at_step; ++i) {
      check(probe.execute_action(e.gt_plan.steps[i]).ok, d.id + ": prefix replay failed");
    }
    probe.apply_perturbation(p);
    const SessionState perturbed = probe.snapshot();
    check(!goal_satisfied(spec, perturbed, e.goal),
          d.id + ": perturbation at " + std::to_string(p.at_step) + " satisfies the goal");
    const Plan recovery = oracle_plan(spec, perturbed, e.goal);
    check(!recovery.steps.empty(),
          d.id + ": no recovery after perturbation at " + std::to_string(p.at_step));
    check(!action_equal(recovery.steps[0], e.gt_plan.steps[p.at_step]),
          d.id + ": perturbation at " + std::to_string(p.at_step) + " changes nothing");
  }
  return e;
}

// The reference planner must be flawless on the bundled corpus; anything less
// means the episode (not the planner) is defective.
void assert_reference_perfect(const ApplianceSpec& spec, const ManualDocument& manual,
                              const Episode& e, Planner& planner) {
  TaskContext ctx;
  ctx.spec = &spec;
  ctx.manual = &manual;
  ctx.episode = &e;
  ctx.planner = &planner;

  const TaskReport t1 = run_task(1, ctx);
  check(t1.retrieval.precision == 1.0 && t1.retrieval.recall == 1.0 && t1.retrieval.f1 == 1.0,
        e.id + ": reference retrieval imperfect");
  const TaskReport t2 = run_task(2, ctx);
  check(t2.open_loop.success && t2.open_loop.completion_rate == 1.0,
        e.id + ": reference open-loop imperfect");
  const TaskReport t3 = run_task(3, ctx);
  check(t3.grounding.mean_iou == 1.0 && t3.grounding.map50 == 1.0,
        e.id + ": reference grounding imperfect");
  const TaskReport t4 = run_task(4, ctx);
  check(t4.closed_loop.queries == static_cast<int>(e.perturbations.size()) &&
            t4.closed_loop.successes == t4.closed_loop.queries &&
            t4.closed_loop.stepwise_success_rate == 1.0,
        e.id + ": reference closed-loop imperfect");
  const TaskReport t5 = run_task(5, ctx);
  check(t5.full_process.success && t5.full_process.completion_rate == 1.0 &&
            t5.full_process.failure_stages.empty(),
        e.id + ": reference full-process imperfect");
  for (const TaskReport* r : {&t1, &t2, &t3, &t4, &t5}) {
    check(r->planner_failures == 0 && r->transport_failures == 0,
          e.id + ": reference planner reported failures");
  }
}

// ------------------------------------------------------------- appliances

Bundle microwave() {
  Bundle b;
  b.json = R"JSON({
  "id": "mx600",
  "category": "microwave_oven",
  "panel": {"width": 800, "height": 520},
  "parts": [
    {
      "name": "door",
      "joint": {"kind": "revolute", "limits": [0, 90], "rest": 0},
      "panel_rect": [30, 60, 400, 480],
      "state_labels": {"0": "closed", "90": "open"},
      "mechanisms": [
        {"kind": "magnetic_attraction",
         "hold": [{"param": "run_state", "op": "==", "value": "cooking"}]}
      ]
    },
    {
      "name": "door_button",
      "joint": {"kind": "prismatic", "limits": [0, 2], "rest": 0},
      "panel_rect": [420, 430, 490, 480],
      "state_labels": {"0": "released", "2": "pressed"},
      "mechanisms": [
        {"kind": "inner_spring", "return_ticks": 1},
        {"kind": "mechanical_trigger", "on": {"press": "door_button"}, "target": "door",
         "effect": {"set": "part_state", "name": "door", "value": "open"},
         "guard": [{"param": "run_state", "op": "==", "value": "idle"}]}
      ]
    },
    {
      "name": "start_button",
      "joint": {"kind": "prismatic", "limits": [0, 2], "rest": 0},
      "panel_rect": [420, 360, 490, 410],
      "state_labels": {"0": "released", "2": "pressed"},
      "mechanisms": [
        {"kind": "inner_spring", "return_ticks": 1},
        {"kind": "safety_lock",
         "unlocked_when": [{"part": "door", "op": "==", "value": "closed"}],
         "blocks": ["Press"]}
      ]
    },
    {
      "name": "timer_knob",
      "joint": {"kind": "revolute", "limits": [0, 108], "rest": 0, "detents": [0, 36, 72, 108]},
      "panel_rect": [540, 300, 640, 400],
      "state_labels": {"0": "0", "36": "1", "72": "2", "108": "3"},
      "mechanisms": [
        {"kind": "knob_countdown", "ticks_per_detent": 10, "on_zero": []}
      ]
    },
    {
      "name": "power_pad",
      "joint": {"kind": "fixed"},
      "panel_rect": [540, 220, 640, 270],
      "state_labels": {},
      "mechanisms": [
        {"kind": "touch_sensing",
         "effects": [{"set": "parameter", "name": "power_level", "value": "high"}]}
      ]
    },
    {
      "name": "screen",
      "joint": {"kind": "fixed"},
      "panel_rect": [540, 60, 760, 130],
      "state_labels": {},
      "mechanisms": [
        {"kind": "screen_display", "fields": ["time_left"], "format": "{value} {unit}"}
      ]
    },
    {
      "name": "cavity_lamp",
      "joint": {"kind": "fixed"},
      "panel_rect": [30, 20, 100, 50],
      "state_labels": {},
      "mechanisms": [
        {"kind": "illumination",
         "on_when": [{"param": "run_state", "op": "==", "value": "cooking"}]}
      ]
    },
    {
      "name": "badge",
      "joint": {"kind": "fixed"},
      "panel_rect": [700, 20, 780, 50],
      "state_labels": {},
      "mechanisms": [
        {"kind": "logo_indicator", "mode_when": [
          {"when": [{"param": "run_state", "op": "==", "value": "cooking"}], "mode": "on"},
          {"when": [{"part": "door", "op": "==", "value": "open"}], "mode": "flash"}
        ]}
      ]
    },
    {
      "name": "turntable",
      "joint": {"kind": "revolute", "limits": [0, 360], "rest": 0},
      "panel_rect": [120, 490, 360, 510],
      "state_labels": {},
      "mechanisms": [
        {"kind": "rotary_motor", "joint": "turntable", "rate": 2,
         "on_when": [{"param": "run_state", "op": "==", "value": "cooking"}]}
      ]
    }
  ],
  "parameters": [
    {"name": "run_state", "domain": {"labels": ["idle", "cooking"]}, "initial": "idle"},
    {"name": "time_left", "domain": {"min": 0, "max": 3, "step": 1}, "initial": 0,
     "unit": "min"},
    {"name": "power_level", "domain": {"labels": ["low", "high"]}, "initial": "low"}
  ],
  "rules": [
    {"id": "sync_time_0", "priority": 5,
     "when": [{"part": "timer_knob", "op": "==", "value": "0"}],
     "then": [{"set": "parameter", "name": "time_left", "value": 0}]},
    {"id": "sync_time_1", "priority": 5,
     "when": [{"part": "timer_knob", "op": "==", "value": "1"}],
     "then": [{"set": "parameter", "name": "time_left", "value": 1}]},
    {"id": "sync_time_2", "priority": 5,
     "when": [{"part": "timer_knob", "op": "==", "value": "2"}],
     "then": [{"set": "parameter", "name": "time_left", "value": 2}]},
    {"id": "sync_time_3", "priority": 5,
     "when": [{"part": "timer_knob", "op": "==", "value": "3"}],
     "then": [{"set": "parameter", "name": "time_left", "value": 3}]},
    {"id": "door_open_stops", "priority": 2,
     "when": [{"part": "door", "op": "==", "value": "open"}],
     "then": [{"set": "parameter", "name": "run_state", "value": "idle"}]},
    {"id": "timeout_stops", "priority": 2,
     "when": [{"param": "time_left", "op": "==", "value": 0}],
     "then": [{"set": "parameter", "name": "run_state", "value": "idle"}]},
    {"id": "start_cooking", "priority": 1,
     "when": [{"part": "start_button", "op": "==", "value": "pressed"},
              {"part": "door", "op": "==", "value": "closed"},
              {"param": "time_left", "op": ">", "value": 0}],
     "then": [{"set": "parameter", "name": "run_state", "value": "cooking"}]}
  ],
  "objects": ["glass_tray", "steam_bowl"]
})JSON";

  b.drafts.push_back({"mx600_cook_one",
                      "Heat a bowl of soup for one minute.",
                      {},
                      {param_is("run_state", std::string("cooking")),
                       param_is("time_left", int64_t{1})},
                      {pert(1, {part_fx("door", "open")})},
                      {"door", "timer_knob", "start_button"}});
  b.drafts.push_back({"mx600_high_two",
                      "Warm the leftovers on high power for two minutes.",
                      {},
                      {param_is("run_state", std::string("cooking")),
                       param_is("power_level", std::string("high")),
                       param_is("time_left", int64_t{2})},
                      {pert(1, {part_fx("door", "open")}),
                       pert(2, {param_fx("run_state", std::string("idle"))})},
                      {"power_pad", "start_button", "screen"}});
  b.drafts.push_back({"mx600_full_blast",
                      "Run three minutes at full power.",
                      {},
                      {param_is("run_state", std::string("cooking")),
                       param_is("power_level", std::string("high")),
                       param_is("time_left", int64_t{3})},
                      {pert(1, {part_fx("timer_knob", "0")})},
                      {"timer_knob", "power_pad", "turntable"}});
  b.drafts.push_back({"mx600_door_timer",
                      "Open the door and dial in two minutes for later.",
                      {},
                      {part_is("door", "open"), param_is("time_left", int64_t{2})},
                      {pert(1, {part_fx("door", "closed")})},
                      {"door_button", "door", "timer_knob"}});
  b.drafts.push_back({"mx600_reheat_open",
                      "Shut the door and start a one-minute reheat.",
                      {"Open(door)"},
                      {param_is("run_state", std::string("cooking")),
                       param_is("time_left", int64_t{1})},
                      {pert(1, {part_fx("timer_knob", "0")}),
                       pert(2, {part_fx("door", "open")})},
                      {"door", "screen", "cavity_lamp"}});
  return b;
}

Bundle kettle() {
  Bundle b;
  b.json = R"JSON({
  "id": "k15",
  "category": "kettle",
  "panel": {"width": 360, "height": 240},
  "parts": [
    {
      "name": "lid",
      "joint": {"kind": "revolute", "limits": [0, 70], "rest": 0},
      "panel_rect": [40, 30, 200, 80],
      "state_labels": {"0": "closed", "70": "open"},
      "mechanisms": [
        {"kind": "magnetic_attraction",
         "hold": [{"param": "run_state", "op": "==", "value": "heating"}]}
      ]
    },
    {
      "name": "power_switch",
      "joint": {"kind": "revolute", "limits": [0, 40], "rest": 0},
      "panel_rect": [250, 140, 310, 200],
      "state_labels": {"0": "off", "40": "on"},
      "mechanisms": []
    },
    {
      "name": "heat_lamp",
      "joint": {"kind": "fixed"},
      "panel_rect": [250, 90, 310, 120],
      "state_labels": {},
      "mechanisms": [
        {"kind": "illumination",
         "on_when": [{"param": "run_state", "op": "==", "value": "heating"}]}
      ]
    },
    {
      "name": "base_plate",
      "joint": {"kind": "fixed"},
      "panel_rect": [30, 200, 330, 230],
      "state_labels": {},
      "mechanisms": []
    }
  ],
  "parameters": [
    {"name": "run_state", "domain": {"labels": ["idle", "heating"]}, "initial": "idle"}
  ],
  "rules": [
    {"id": "lid_open_stops", "priority": 2,
     "when": [{"part": "lid", "op": "==", "value": "open"}],
     "then": [{"set": "parameter", "name": "run_state", "value": "idle"}]},
    {"id": "switch_off_stops", "priority": 2,
     "when": [{"part": "power_switch", "op": "==", "value": "off"}],
     "then": [{"set": "parameter", "name": "run_state", "value": "idle"}]},
    {"id": "heat", "priority": 1,
     "when": [{"part": "power_switch", "op": "==", "value": "on"},
              {"part": "lid", "op": "==", "value": "closed"}],
     "then": [{"set": "parameter", "name": "run_state", "value": "heating"}]}
  ],
  "objects": ["scale_filter"]
})JSON";

  const Predicate heating = {param_is("run_state", std::string("heating"))};
  b.drafts.push_back({"k15_boil",
                      "Boil a full kettle.",
                      {},
                      heating,
                      {pert(0, {part_fx("lid", "open")})},
                      {"power_switch", "lid", "heat_lamp"}});
  b.drafts.push_back({"k15_refill_boil",
                      "Close the lid after refilling and switch on.",
                      {"Open(lid)"},
                      heating,
                      {pert(1, {part_fx("lid", "open")})},
                      {"lid", "power_switch", "base_plate"}});
  b.drafts.push_back({"k15_pour",
                      "Stop heating and open the lid to pour.",
                      {"Flip(power_switch, \"on\")"},
                      {part_is("lid", "open")},
                      {pert(1, {part_fx("power_switch", "on")})},
                      {"power_switch", "lid", "heat_lamp"}});
  b.drafts.push_back({"k15_refill",
                      "Open the lid for a refill.",
                      {},
                      {part_is("lid", "open")},
                      {pert(0, {part_fx("power_switch", "on")})},
                      {"lid", "base_plate", "heat_lamp"}});
  b.drafts.push_back({"k15_double_pop",
                      "Keep the lid shut and boil.",
                      {"Open(lid)"},
                      heating,
                      {pert(1, {part_fx("lid", "open")}), pert(1, {part_fx("lid", "open")})},
                      {"lid", "power_switch", "heat_lamp"}});
  return b;
}

Bundle toaster() {
  Bundle b;
  b.json = R"JSON({
  "id": "t200",
  "category": "toaster",
  "panel": {"width": 420, "height": 300},
  "parts": [
    {
      "name": "lever",
      "joint": {"kind": "prismatic", "limits": [0, 8], "rest": 8},
      "panel_rect": [40, 60, 70, 220],
      "state_labels": {"0": "down", "8": "up"},
      "mechanisms": [
        {"kind": "safety_lock",
         "unlocked_when": [{"part": "crumb_tray", "op": "==", "value": "closed"}],
         "blocks": ["Slide"]}
      ]
    },
    {
      "name": "browning_knob",
      "joint": {"kind": "revolute", "limits": [0, 60], "rest": 0, "detents": [0, 20, 40, 60]},
      "panel_rect": [120, 180, 190, 250],
      "state_labels": {"0": "0", "20": "1", "40": "2", "60": "3"},
      "mechanisms": [
        {"kind": "knob_countdown", "ticks_per_detent": 8,
         "on_zero": [{"set": "part_state", "name": "lever", "value": "up"}]}
      ]
    },
    {
      "name": "cancel_button",
      "joint": {"kind": "prismatic", "limits": [0, 2], "rest": 0},
      "panel_rect": [220, 200, 270, 240],
      "state_labels": {"0": "released", "2": "pressed"},
      "mechanisms": [
        {"kind": "inner_spring", "return_ticks": 1},
        {"kind": "mechanical_trigger", "on": {"press": "cancel_button"}, "target": "lever",
         "effect": {"set": "part_state", "name": "lever", "value": "up"}, "guard": []}
      ]
    },
    {
      "name": "crumb_tray",
      "joint": {"kind": "revolute", "limits": [0, 45], "rest": 0},
      "panel_rect": [40, 260, 380, 290],
      "state_labels": {"0": "closed", "45": "open"},
      "mechanisms": []
    },
    {
      "name": "ready_lamp",
      "joint": {"kind": "fixed"},
      "panel_rect": [300, 200, 350, 240],
      "state_labels": {},
      "mechanisms": [
        {"kind": "illumination",
         "on_when": [{"param": "run_state", "op": "==", "value": "toasting"}]}
      ]
    }
  ],
  "parameters": [
    {"name": "run_state", "domain": {"labels": ["idle", "toasting"]}, "initial": "idle"},
    {"name": "shade", "domain": {"min": 0, "max": 3, "step": 1}, "initial": 0,
     "unit": "level"}
  ],
  "rules": [
    {"id": "sync_shade_0", "priority": 5,
     "when": [{"part": "browning_knob", "op": "==", "value": "0"}],
     "then": [{"set": "parameter", "name": "shade", "value": 0}]},
    {"id": "sync_shade_1", "priority": 5,
     "when": [{"part": "browning_knob", "op": "==", "value": "1"}],
     "then": [{"set": "parameter", "name": "shade", "value": 1}]},
    {"id": "sync_shade_2", "priority": 5,
     "when": [{"part": "browning_knob", "op": "==", "value": "2"}],
     "then": [{"set": "parameter", "name": "shade", "value": 2}]},
    {"id": "sync_shade_3", "priority": 5,
     "when": [{"part": "browning_knob", "op": "==", "value": "3"}],
     "then": [{"set": "parameter", "name": "shade", "value": 3}]},
    {"id": "lever_up_stops", "priority": 2,
     "when": [{"part": "lever", "op": "==", "value": "up"}],
     "then": [{"set": "parameter", "name": "run_state", "value": "idle"}]},
    {"id": "shade_zero_stops", "priority": 2,
     "when": [{"param": "shade", "op": "==", "value": 0}],
     "then": [{"set": "parameter", "name": "run_state", "value": "idle"}]},
    {"id": "start_toasting", "priority": 1,
     "when": [{"part": "lever", "op": "==", "value": "down"},
              {"param": "shade", "op": ">", "value": 0}],
     "then": [{"set": "parameter", "name": "run_state", "value": "toasting"}]}
  ],
  "objects": []
})JSON";

  const Predicate toasting = {param_is("run_state", std::string("toasting"))};
  b.drafts.push_back({"t200_shade_two",
                      "Toast on shade two.",
                      {},
                      {param_is("run_state", std::string("toasting")),
                       part_is("browning_knob", "2")},
                      {pert(1, {part_fx("crumb_tray", "open")})},
                      {"browning_knob", "lever", "crumb_tray"}});
  b.drafts.push_back({"t200_cancel_crumbs",
                      "Pop the toast early and open the crumb tray.",
                      {"Rotate(browning_knob, \"2\", 40.0)", "Slide(lever, \"down\")"},
                      {part_is("lever", "up"), part_is("crumb_tray", "open")},
                      {pert(1, {part_fx("lever", "down")})},
                      {"cancel_button", "crumb_tray", "lever"}});
  b.drafts.push_back({"t200_darkest",
                      "Brown the bagel on the darkest setting.",
                      {},
                      {param_is("run_state", std::string("toasting")),
                       part_is("browning_knob", "3")},
                      {pert(1, {part_fx("browning_knob", "1")})},
                      {"browning_knob", "lever", "ready_lamp"}});
  b.drafts.push_back({"t200_tray_shade",
                      "Slide the crumb tray out and park the dial on one.",
                      {},
                      {part_is("crumb_tray", "open"), part_is("browning_knob", "1")},
                      {pert(1, {part_fx("browning_knob", "0")})},
                      {"crumb_tray", "browning_knob", "cancel_button"}});
  b.drafts.push_back({"t200_reset",
                      "Cancel the cycle and wind the dial back to zero.",
                      {"Rotate(browning_knob, \"2\", 40.0)", "Slide(lever, \"down\")"},
                      {part_is("lever", "up"), part_is("browning_knob", "0")},
                      {pert(1, {part_fx("lever", "down")})},
                      {"lever", "browning_knob", "ready_lamp"}});
  (void)toasting;
  return b;
}

Bundle air_fryer() {
  Bundle b;
  b.json = R"JSON({
  "id": "af90",
  "category": "air_fryer",
  "panel": {"width": 520, "height": 420},
  "parts": [
    {
      "name": "basket",
      "joint": {"kind": "prismatic", "limits": [0, 10], "rest": 0},
      "panel_rect": [60, 220, 300, 380],
      "state_labels": {"0": "in", "10": "out"},
      "mechanisms": [
        {"kind": "magnetic_attraction",
         "hold": [{"param": "run_state", "op": "==", "value": "frying"}]}
      ]
    },
    {
      "name": "temp_knob",
      "joint": {"kind": "revolute", "limits": [0, 80], "rest": 0, "detents": [0, 40, 80]},
      "panel_rect": [340, 60, 440, 160],
      "state_labels": {"0": "off", "40": "160", "80": "200"},
      "mechanisms": []
    },
    {
      "name": "timer_knob",
      "joint": {"kind": "revolute", "limits": [0, 90], "rest": 0, "detents": [0, 30, 60, 90]},
      "panel_rect": [340, 180, 440, 280],
      "state_labels": {"0": "0", "30": "5", "60": "10", "90": "15"},
      "mechanisms": [
        {"kind": "knob_countdown", "ticks_per_detent": 5, "on_zero": []}
      ]
    },
    {
      "name": "start_button",
      "joint": {"kind": "prismatic", "limits": [0, 2], "rest": 0},
      "panel_rect": [350, 320, 430, 370],
      "state_labels": {"0": "released", "2": "pressed"},
      "mechanisms": [
        {"kind": "inner_spring", "return_ticks": 1},
        {"kind": "safety_lock",
         "unlocked_when": [{"part": "basket", "op": "==", "value": "in"}],
         "blocks": ["Press"]}
      ]
    },
    {
      "name": "screen",
      "joint": {"kind": "fixed"},
      "panel_rect": [60, 60, 280, 130],
      "state_labels": {},
      "mechanisms": [
        {"kind": "screen_display", "fields": ["minutes"], "format": "{value} {unit}"}
      ]
    },
    {
      "name": "heat_lamp",
      "joint": {"kind": "fixed"},
      "panel_rect": [60, 160, 140, 200],
      "state_labels": {},
      "mechanisms": [
        {"kind": "illumination",
         "on_when": [{"param": "run_state", "op": "==", "value": "frying"}]}
      ]
    },
    {
      "name": "fan_wheel",
      "joint": {"kind": "revolute", "limits": [0, 360], "rest": 0},
      "panel_rect": [180, 160, 300, 200],
      "state_labels": {},
      "mechanisms": [
        {"kind": "rotary_motor", "joint": "fan_wheel", "rate": 7,
         "on_when": [{"param": "run_state", "op": "==", "value": "frying"}]}
      ]
    }
  ],
  "parameters": [
    {"name": "run_state", "domain": {"labels": ["idle", "frying"]}, "initial": "idle"},
    {"name": "minutes", "domain": {"min": 0, "max": 15, "step": 5}, "initial": 0,
     "unit": "min"}
  ],
  "rules": [
    {"id": "sync_min_0", "priority": 5,
     "when": [{"part": "timer_knob", "op": "==", "value": "0"}],
     "then": [{"set": "parameter", "name": "minutes", "value": 0}]},
    {"id": "sync_min_5", "priority": 5,
     "when": [{"part": "timer_knob", "op": "==", "value": "5"}],
     "then": [{"set": "parameter", "name": "minutes", "value": 5}]},
    {"id": "sync_min_10", "priority": 5,
     "when": [{"part": "timer_knob", "op": "==", "value": "10"}],
     "then": [{"set": "parameter", "name": "minutes", "value": 10}]},
    {"id": "sync_min_15", "priority": 5,
     "when": [{"part": "timer_knob", "op": "==", "value": "15"}],
     "then": [{"set": "parameter", "name": "minutes", "value": 15}]},
    {"id": "basket_out_stops", "priority": 2,
     "when": [{"part": "basket", "op": "==", "value": "out"}],
     "then": [{"set": "parameter", "name": "run_state", "value": "idle"}]},
    {"id": "timer_zero_stops", "priority": 2,
     "when": [{"param": "minutes", "op": "==", "value": 0}],
     "then": [{"set": "parameter", "name": "run_state", "value": "idle"}]},
    {"id": "start_frying", "priority": 1,
     "when": [{"part": "start_button", "op": "==", "value": "pressed"},
              {"part": "basket", "op": "==", "value": "in"},
              {"part": "temp_knob", "op": "!=", "value": "off"},
              {"param": "minutes", "op": ">", "value": 0}],
     "then": [{"set": "parameter", "name": "run_state", "value": "frying"}]}
  ],
  "objects": ["grill_plate"]
})JSON";

  b.drafts.push_back({"af90_fries",
                      "Fry chips at two hundred for ten minutes.",
                      {},
                      {param_is("run_state", std::string("frying")),
                       part_is("temp_knob", "200"), param_is("minutes", int64_t{10})},
                      {pert(2, {part_fx("basket", "out")})},
                      {"basket", "temp_knob", "timer_knob"}});
  b.drafts.push_back({"af90_wings",
                      "Crisp the wings at one-sixty for five minutes.",
                      {},
                      {param_is("run_state", std::string("frying")),
                       part_is("temp_knob", "160"), param_is("minutes", int64_t{5})},
                      {pert(1, {part_fx("temp_knob", "off")})},
                      {"temp_knob", "start_button", "screen"}});
  b.drafts.push_back({"af90_preheat",
                      "Slot the basket home and preheat at two hundred.",
                      {"Slide(basket, \"out\")"},
                      {param_is("run_state", std::string("frying")),
                       part_is("temp_knob", "200")},
                      {pert(3, {part_fx("basket", "out")})},
                      {"basket", "heat_lamp", "fan_wheel"}});
  b.drafts.push_back({"af90_drain",
                      "Kill the timer and pull the basket.",
                      {"Rotate(temp_knob, \"200\", 80.0)", "Rotate(timer_knob, \"5\", 30.0)",
                       "Press(start_button, \"pressed\", 1)"},
                      {part_is("basket", "out"), param_is("run_state", std::string("idle"))},
                      {pert(1, {part_fx("timer_knob", "5"),
                                param_fx("run_state", std::string("frying"))})},
                      {"timer_knob", "basket", "screen"}});
  b.drafts.push_back({"af90_crisp_fifteen",
                      "Run the crisper at two hundred for the full fifteen.",
                      {},
                      {param_is("run_state", std::string("frying")),
                       part_is("temp_knob", "200"), param_is("minutes", int64_t{15})},
                      {pert(1, {part_fx("temp_knob", "off")}),
                       pert(2, {part_fx("basket", "out")})},
                      {"temp_knob", "timer_knob", "basket"}});
  return b;
}

Bundle stand_mixer() {
  Bundle b;
  b.json = R"JSON({
  "id": "sm450",
  "category": "stand_mixer",
  "panel": {"width": 560, "height": 400},
  "parts": [
    {
      "name": "head",
      "joint": {"kind": "revolute", "limits": [0, 35], "rest": 0},
      "panel_rect": [160, 40, 480, 140],
      "state_labels": {"0": "down", "35": "up"},
      "mechanisms": [
        {"kind": "magnetic_attraction",
         "hold": [{"param": "run_state", "op": "==", "value": "mixing"}]}
      ]
    },
    {
      "name": "bowl_clamp",
      "joint": {"kind": "prismatic", "limits": [0, 4], "rest": 0},
      "panel_rect": [200, 300, 360, 360],
      "state_labels": {"0": "open", "4": "locked"},
      "mechanisms": [
        {"kind": "safety_lock",
         "unlocked_when": [{"param": "run_state", "op": "==", "value": "idle"}],
         "blocks": ["Slide"]}
      ]
    },
    {
      "name": "speed_dial",
      "joint": {"kind": "revolute", "limits": [0, 90], "rest": 0, "detents": [0, 30, 60, 90]},
      "panel_rect": [40, 120, 130, 210],
      "state_labels": {"0": "off", "30": "1", "60": "2", "90": "3"},
      "mechanisms": [
        {"kind": "safety_lock",
         "unlocked_when": [{"part": "head", "op": "==", "value": "down"},
                           {"part": "bowl_clamp", "op": "==", "value": "locked"}],
         "blocks": ["Rotate"]}
      ]
    },
    {
      "name": "beater",
      "joint": {"kind": "revolute", "limits": [0, 360], "rest": 0},
      "panel_rect": [240, 160, 320, 280],
      "state_labels": {},
      "mechanisms": [
        {"kind": "rotary_motor", "joint": "beater", "rate": 12,
         "on_when": [{"param": "run_state", "op": "==", "value": "mixing"}]}
      ]
    },
    {
      "name": "power_lamp",
      "joint": {"kind": "fixed"},
      "panel_rect": [40, 40, 110, 80],
      "state_labels": {},
      "mechanisms": [
        {"kind": "illumination",
         "on_when": [{"param": "run_state", "op": "==", "value": "mixing"}]}
      ]
    }
  ],
  "parameters": [
    {"name": "run_state", "domain": {"labels": ["idle", "mixing"]}, "initial": "idle"}
  ],
  "rules": [
    {"id": "head_up_stops", "priority": 2,
     "when": [{"part": "head", "op": "==", "value": "up"}],
     "then": [{"set": "parameter", "name": "run_state", "value": "idle"}]},
    {"id": "clamp_open_stops", "priority": 2,
     "when": [{"part": "bowl_clamp", "op": "==", "value": "open"}],
     "then": [{"set": "parameter", "name": "run_state", "value": "idle"}]},
    {"id": "dial_off_stops", "priority": 2,
     "when": [{"part": "speed_dial", "op": "==", "value": "off"}],
     "then": [{"set": "parameter", "name": "run_state", "value": "idle"}]},
    {"id": "spin", "priority": 1,
     "when": [{"part": "speed_dial", "op": "!=", "value": "off"},
              {"part": "head", "op": "==", "value": "down"},
              {"part": "bowl_clamp", "op": "==", "value": "locked"}],
     "then": [{"set": "parameter", "name": "run_state", "value": "mixing"}]}
  ],
  "objects": ["mixing_bowl", "dough_hook"]
})JSON";

  b.drafts.push_back({"sm450_knead",
                      "Clamp the bowl and knead on speed two.",
                      {},
                      {param_is("run_state", std::string("mixing")),
                       part_is("speed_dial", "2")},
                      {pert(1, {part_fx("bowl_clamp", "open")})},
                      {"bowl_clamp", "speed_dial", "head"}});
  b.drafts.push_back({"sm450_whip",
                      "Whip the cream on speed three.",
                      {},
                      {param_is("run_state", std::string("mixing")),
                       part_is("speed_dial", "3")},
                      {pert(1, {part_fx("head", "up")})},
                      {"head", "speed_dial", "beater"}});
  b.drafts.push_back({"sm450_stop_lift",
                      "Switch off and raise the head.",
                      {"Slide(bowl_clamp, \"locked\")", "Rotate(speed_dial, \"1\", 30.0)"},
                      {part_is("speed_dial", "off"), part_is("head", "up")},
                      {pert(1, {part_fx("speed_dial", "1")})},
                      {"speed_dial", "head", "power_lamp"}});
  b.drafts.push_back({"sm450_release",
                      "Free the mixing bowl.",
                      {"Slide(bowl_clamp, \"locked\")", "Rotate(speed_dial, \"1\", 30.0)",
                       "Rotate(speed_dial, \"off\", -30.0)"},
                      {part_is("bowl_clamp", "open")},
                      {pert(0, {part_fx("speed_dial", "2")})},
                      {"bowl_clamp", "speed_dial", "head"}});
  b.drafts.push_back({"sm450_downshift",
                      "Ease the mixer down to speed one.",
                      {"Slide(bowl_clamp, \"locked\")", "Rotate(speed_dial, \"3\", 90.0)"},
                      {param_is("run_state", std::string("mixing")),
                       part_is("speed_dial", "1")},
                      {pert(0, {part_fx("head", "up")})},
                      {"speed_dial", "head", "beater"}});
  return b;
}

Bundle washing_machine() {
  Bundle b;
  b.json = R"JSON({
  "id": "wm55",
  "category": "washing_machine",
  "panel": {"width": 600, "height": 440},
  "parts": [
    {
      "name": "door",
      "joint": {"kind": "revolute", "limits": [0, 80], "rest": 0},
      "panel_rect": [140, 120, 460, 420],
      "state_labels": {"0": "closed", "80": "open"},
      "mechanisms": [
        {"kind": "magnetic_attraction",
         "hold": [{"param": "run_state", "op": "==", "value": "washing"}]}
      ]
    },
    {
      "name": "program_dial",
      "joint": {"kind": "revolute", "limits": [0, 60], "rest": 0, "detents": [0, 30, 60]},
      "panel_rect": [40, 30, 130, 110],
      "state_labels": {"0": "off", "30": "quick", "60": "heavy"},
      "mechanisms": [
        {"kind": "knob_countdown", "ticks_per_detent": 25, "on_zero": []}
      ]
    },
    {
      "name": "start_button",
      "joint": {"kind": "prismatic", "limits": [0, 2], "rest": 0},
      "panel_rect": [480, 40, 560, 90],
      "state_labels": {"0": "released", "2": "pressed"},
      "mechanisms": [
        {"kind": "inner_spring", "return_ticks": 1},
        {"kind": "safety_lock",
         "unlocked_when": [{"part": "door", "op": "==", "value": "closed"}],
         "blocks": ["Press"]}
      ]
    },
    {
      "name": "screen",
      "joint": {"kind": "fixed"},
      "panel_rect": [200, 30, 420, 100],
      "state_labels": {},
      "mechanisms": [
        {"kind": "screen_display", "fields": ["cycle_min"], "format": "{value} {unit}"}
      ]
    },
    {
      "name": "drum",
      "joint": {"kind": "revolute", "limits": [0, 360], "rest": 0},
      "panel_rect": [240, 200, 360, 320],
      "state_labels": {},
      "mechanisms": [
        {"kind": "rotary_motor", "joint": "drum", "rate": 5,
         "on_when": [{"param": "run_state", "op": "==", "value": "washing"}]}
      ]
    },
    {
      "name": "wash_lamp",
      "joint": {"kind": "fixed"},
      "panel_rect": [480, 110, 560, 150],
      "state_labels": {},
      "mechanisms": [
        {"kind": "illumination",
         "on_when": [{"param": "run_state", "op": "==", "value": "washing"}]}
      ]
    }
  ],
  "parameters": [
    {"name": "run_state", "domain": {"labels": ["idle", "washing"]}, "initial": "idle"},
    {"name": "cycle_min", "domain": {"min": 0, "max": 60, "step": 30}, "initial": 0,
     "unit": "min"}
  ],
  "rules": [
    {"id": "sync_cycle_off", "priority": 5,
     "when": [{"part": "program_dial", "op": "==", "value": "off"}],
     "then": [{"set": "parameter", "name": "cycle_min", "value": 0}]},
    {"id": "sync_cycle_quick", "priority": 5,
     "when": [{"part": "program_dial", "op": "==", "value": "quick"}],
     "then": [{"set": "parameter", "name": "cycle_min", "value": 30}]},
    {"id": "sync_cycle_heavy", "priority": 5,
     "when": [{"part": "program_dial", "op": "==", "value": "heavy"}],
     "then": [{"set": "parameter", "name": "cycle_min", "value": 60}]},
    {"id": "door_open_stops", "priority": 2,
     "when": [{"part": "door", "op": "==", "value": "open"}],
     "then": [{"set": "parameter", "name": "run_state", "value": "idle"}]},
    {"id": "cycle_zero_stops", "priority": 2,
     "when": [{"param": "cycle_min", "op": "==", "value": 0}],
     "then": [{"set": "parameter", "name": "run_state", "value": "idle"}]},
    {"id": "start_washing", "priority": 1,
     "when": [{"part": "start_button", "op": "==", "value": "pressed"},
              {"part": "door", "op": "==", "value": "closed"},
              {"param": "cycle_min", "op": ">", "value": 0}],
     "then": [{"set": "parameter", "name": "run_state", "value": "washing"}]}
  ],
  "objects": ["mesh_bag"]
})JSON";

  b.drafts.push_back({"wm55_quick",
                      "Run a quick wash.",
                      {},
                      {param_is("run_state", std::string("washing")),
                       part_is("program_dial", "quick")},
                      {pert(1, {part_fx("door", "open")})},
                      {"program_dial", "start_button", "door"}});
  b.drafts.push_back({"wm55_heavy",
                      "Start the heavy cycle.",
                      {},
                      {param_is("run_state", std::string("washing")),
                       part_is("program_dial", "heavy")},
                      {pert(1, {part_fx("program_dial", "off")})},
                      {"program_dial", "screen", "drum"}});
  b.drafts.push_back({"wm55_load_quick",
                      "Load the drum, shut the door and run a quick wash.",
                      {"Open(door)"},
                      {param_is("run_state", std::string("washing")),
                       part_is("program_dial", "quick")},
                      {pert(1, {part_fx("program_dial", "off")}),
                       pert(2, {part_fx("door", "open")})},
                      {"door", "program_dial", "start_button"}});
  b.drafts.push_back({"wm55_abort",
                      "Stop the cycle and open up.",
                      {"Rotate(program_dial, \"heavy\", 60.0)",
                       "Press(start_button, \"pressed\", 1)"},
                      {param_is("run_state", std::string("idle")), part_is("door", "open")},
                      {pert(1, {part_fx("program_dial", "heavy"),
                                param_fx("run_state", std::string("washing"))})},
                      {"door", "program_dial", "wash_lamp"}});
  b.drafts.push_back({"wm55_double_door",
                      "Wash the bedding on heavy from loading.",
                      {"Open(door)"},
                      {param_is("run_state", std::string("washing")),
                       part_is("program_dial", "heavy")},
                      {pert(2, {part_fx("door", "open")}), pert(2, {part_fx("door", "open")})},
                      {"door", "drum", "program_dial"}});
  return b;
}

Bundle oven() {
  Bundle b;
  b.json = R"JSON({
  "id": "ov350",
  "category": "oven",
  "panel": {"width": 640, "height": 480},
  "parts": [
    {
      "name": "door",
      "joint": {"kind": "revolute", "limits": [0, 85], "rest": 0},
      "panel_rect": [60, 160, 580, 460],
      "state_labels": {"0": "closed", "85": "open"},
      "mechanisms": []
    },
    {
      "name": "mode_knob",
      "joint": {"kind": "revolute", "limits": [0, 50], "rest": 0, "detents": [0, 25, 50]},
      "panel_rect": [80, 40, 170, 130],
      "state_labels": {"0": "off", "25": "bake", "50": "grill"},
      "mechanisms": []
    },
    {
      "name": "temp_knob",
      "joint": {"kind": "revolute", "limits": [0, 80], "rest": 0, "detents": [0, 40, 80]},
      "panel_rect": [200, 40, 290, 130],
      "state_labels": {"0": "0", "40": "180", "80": "220"},
      "mechanisms": []
    },
    {
      "name": "screen",
      "joint": {"kind": "fixed"},
      "panel_rect": [320, 50, 480, 120],
      "state_labels": {},
      "mechanisms": [
        {"kind": "screen_display", "fields": ["set_temp"], "format": "{value} {unit}"}
      ]
    },
    {
      "name": "oven_lamp",
      "joint": {"kind": "fixed"},
      "panel_rect": [510, 50, 580, 120],
      "state_labels": {},
      "mechanisms": [
        {"kind": "illumination",
         "on_when": [{"param": "run_state", "op": "==", "value": "heating"}]}
      ]
    }
  ],
  "parameters": [
    {"name": "run_state", "domain": {"labels": ["idle", "heating"]}, "initial": "idle"},
    {"name": "set_temp", "domain": {"min": 0, "max": 220, "step": 20}, "initial": 0,
     "unit": "C"}
  ],
  "rules": [
    {"id": "sync_temp_0", "priority": 5,
     "when": [{"part": "temp_knob", "op": "==", "value": "0"}],
     "then": [{"set": "parameter", "name": "set_temp", "value": 0}]},
    {"id": "sync_temp_180", "priority": 5,
     "when": [{"part": "temp_knob", "op": "==", "value": "180"}],
     "then": [{"set": "parameter", "name": "set_temp", "value": 180}]},
    {"id": "sync_temp_220", "priority": 5,
     "when": [{"part": "temp_knob", "op": "==", "value": "220"}],
     "then": [{"set": "parameter", "name": "set_temp", "value": 220}]},
    {"id": "door_open_stops", "priority": 2,
     "when": [{"part": "door", "op": "==", "value": "open"}],
     "then": [{"set": "parameter", "name": "run_state", "value": "idle"}]},
    {"id": "mode_off_stops", "priority": 2,
     "when": [{"part": "mode_knob", "op": "==", "value": "off"}],
     "then": [{"set": "parameter", "name": "run_state", "value": "idle"}]},
    {"id": "temp_zero_stops", "priority": 2,
     "when": [{"param": "set_temp", "op": "==", "value": 0}],
     "then": [{"set": "parameter", "name": "run_state", "value": "idle"}]},
    {"id": "heat", "priority": 1,
     "when": [{"part": "mode_knob", "op": "!=", "value": "off"},
              {"param": "set_temp", "op": ">", "value": 0},
              {"part": "door", "op": "==", "value": "closed"}],
     "then": [{"set": "parameter", "name": "run_state", "value": "heating"}]}
  ],
  "objects": ["baking_tray", "grill_rack"]
})JSON";

  b.drafts.push_back({"ov350_bake",
                      "Bake at one-eighty.",
                      {},
                      {param_is("run_state", std::string("heating")),
                       part_is("mode_knob", "bake"), part_is("temp_knob", "180")},
                      {pert(1, {part_fx("mode_knob", "off")})},
                      {"mode_knob", "temp_knob", "door"}});
  b.drafts.push_back({"ov350_grill",
                      "Grill at two-twenty.",
                      {},
                      {param_is("run_state", std::string("heating")),
                       part_is("mode_knob", "grill"), part_is("temp_knob", "220")},
                      {pert(1, {part_fx("mode_knob", "bake")})},
                      {"mode_knob", "screen", "oven_lamp"}});
  b.drafts.push_back({"ov350_shutdown",
                      "Shut the oven down.",
                      {"Rotate(mode_knob, \"bake\", 25.0)", "Rotate(temp_knob, \"180\", 40.0)"},
                      {param_is("run_state", std::string("idle")),
                       part_is("mode_knob", "off"), part_is("temp_knob", "0")},
                      {pert(1, {part_fx("mode_knob", "bake")})},
                      {"mode_knob", "temp_knob", "oven_lamp"}});
  b.drafts.push_back({"ov350_door_preheat",
                      "Close the door and let it preheat.",
                      {"Open(door)", "Rotate(mode_knob, \"bake\", 25.0)",
                       "Rotate(temp_knob, \"180\", 40.0)"},
                      {param_is("run_state", std::string("heating"))},
                      {pert(0, {part_fx("temp_knob", "0")})},
                      {"door", "temp_knob", "mode_knob"}});
  b.drafts.push_back({"ov350_switch_grill",
                      "Switch the roast over to grill at one-eighty.",
                      {"Rotate(mode_knob, \"bake\", 25.0)", "Rotate(temp_knob, \"220\", 80.0)"},
                      {param_is("run_state", std::string("heating")),
                       part_is("mode_knob", "grill"), part_is("temp_knob", "180")},
                      {pert(1, {part_fx("mode_knob", "bake")})},
                      {"mode_knob", "temp_knob", "screen"}});
  return b;
}

Bundle coffee_machine() {
  Bundle b;
  b.json = R"JSON({
  "id": "cm280",
  "category": "coffee_machine",
  "panel": {"width": 480, "height": 360},
  "parts": [
    {
      "name": "tank_lid",
      "joint": {"kind": "revolute", "limits": [0, 60], "rest": 0},
      "panel_rect": [40, 30, 200, 90],
      "state_labels": {"0": "closed", "60": "open"},
      "mechanisms": [
        {"kind": "magnetic_attraction",
         "hold": [{"param": "run_state", "op": "==", "value": "brewing"}]}
      ]
    },
    {
      "name": "brew_button",
      "joint": {"kind": "prismatic", "limits": [0, 2], "rest": 0},
      "panel_rect": [360, 120, 440, 170],
      "state_labels": {"0": "released", "2": "pressed"},
      "mechanisms": [
        {"kind": "inner_spring", "return_ticks": 1},
        {"kind": "safety_lock",
         "unlocked_when": [{"part": "tank_lid", "op": "==", "value": "closed"}],
         "blocks": ["Press"]}
      ]
    },
    {
      "name": "stop_button",
      "joint": {"kind": "prismatic", "limits": [0, 2], "rest": 0},
      "panel_rect": [360, 190, 440, 240],
      "state_labels": {"0": "released", "2": "pressed"},
      "mechanisms": [
        {"kind": "inner_spring", "return_ticks": 1}
      ]
    },
    {
      "name": "small_pad",
      "joint": {"kind": "fixed"},
      "panel_rect": [240, 120, 310, 170],
      "state_labels": {},
      "mechanisms": [
        {"kind": "touch_sensing",
         "effects": [{"set": "parameter", "name": "cup_size", "value": "small"}]},
        {"kind": "safety_lock",
         "unlocked_when": [{"part": "tank_lid", "op": "==", "value": "closed"}],
         "blocks": ["Touch"]}
      ]
    },
    {
      "name": "large_pad",
      "joint": {"kind": "fixed"},
      "panel_rect": [240, 190, 310, 240],
      "state_labels": {},
      "mechanisms": [
        {"kind": "touch_sensing",
         "effects": [{"set": "parameter", "name": "cup_size", "value": "large"}]},
        {"kind": "safety_lock",
         "unlocked_when": [{"part": "tank_lid", "op": "==", "value": "closed"}],
         "blocks": ["Touch"]}
      ]
    },
    {
      "name": "screen",
      "joint": {"kind": "fixed"},
      "panel_rect": [40, 120, 200, 190],
      "state_labels": {},
      "mechanisms": [
        {"kind": "screen_display", "fields": ["cup_size"], "format": "{value}"}
      ]
    },
    {
      "name": "drip_lamp",
      "joint": {"kind": "fixed"},
      "panel_rect": [40, 220, 110, 260],
      "state_labels": {},
      "mechanisms": [
        {"kind": "illumination",
         "on_when": [{"param": "run_state", "op": "==", "value": "brewing"}]}
      ]
    },
    {
      "name": "badge",
      "joint": {"kind": "fixed"},
      "panel_rect": [380, 30, 440, 70],
      "state_labels": {},
      "mechanisms": [
        {"kind": "logo_indicator", "mode_when": [
          {"when": [{"param": "run_state", "op": "==", "value": "brewing"}], "mode": "on"},
          {"when": [{"part": "tank_lid", "op": "==", "value": "open"}], "mode": "flash"}
        ]}
      ]
    }
  ],
  "parameters": [
    {"name": "run_state", "domain": {"labels": ["idle", "brewing"]}, "initial": "idle"},
    {"name": "cup_size", "domain": {"labels": ["small", "large"]}, "initial": "small"}
  ],
  "rules": [
    {"id": "lid_open_stops", "priority": 2,
     "when": [{"part": "tank_lid", "op": "==", "value": "open"}],
     "then": [{"set": "parameter", "name": "run_state", "value": "idle"}]},
    {"id": "stop_pressed_stops", "priority": 2,
     "when": [{"part": "stop_button", "op": "==", "value": "pressed"}],
     "then": [{"set": "parameter", "name": "run_state", "value": "idle"}]},
    {"id": "brew", "priority": 1,
     "when": [{"part": "brew_button", "op": "==", "value": "pressed"},
              {"part": "tank_lid", "op": "==", "value": "closed"}],
     "then": [{"set": "parameter", "name": "run_state", "value": "brewing"}]}
  ],
  "objects": ["carafe"]
})JSON";

  b.drafts.push_back({"cm280_large",
                      "Brew a large cup.",
                      {},
                      {param_is("run_state", std::string("brewing")),
                       param_is("cup_size", std::string("large"))},
                      {pert(1, {param_fx("run_state", std::string("idle"))})},
                      {"brew_button", "large_pad", "tank_lid"}});
  b.drafts.push_back({"cm280_open_small",
                      "Top up the tank, close it and brew a small.",
                      {"Open(tank_lid)"},
                      {param_is("run_state", std::string("brewing")),
                       param_is("cup_size", std::string("small"))},
                      {pert(1, {part_fx("tank_lid", "open")})},
                      {"tank_lid", "brew_button", "small_pad"}});
  b.drafts.push_back({"cm280_size_up",
                      "Set the next brew to a large cup.",
                      {},
                      {param_is("cup_size", std::string("large")),
                       param_is("run_state", std::string("idle"))},
                      {pert(0, {part_fx("tank_lid", "open")})},
                      {"large_pad", "small_pad", "screen"}});
  b.drafts.push_back({"cm280_refill",
                      "Open the tank lid for a refill.",
                      {},
                      {part_is("tank_lid", "open")},
                      {pert(0, {param_fx("run_state", std::string("brewing"))})},
                      {"tank_lid", "stop_button", "badge"}});
  b.drafts.push_back({"cm280_full_large",
                      "From refilling the tank to a large brew.",
                      {"Open(tank_lid)"},
                      {param_is("run_state", std::string("brewing")),
                       param_is("cup_size", std::string("large"))},
                      {pert(1, {part_fx("tank_lid", "open")}),
                       pert(2, {param_fx("run_state", std::string("idle"))})},
                      {"tank_lid", "brew_button", "large_pad"}});
  return b;
}

Bundle blender() {
  Bundle b;
  b.json = R"JSON({
  "id": "bl60",
  "category": "blender",
  "panel": {"width": 440, "height": 400},
  "parts": [
    {
      "name": "jar",
      "joint": {"kind": "prismatic", "limits": [0, 6], "rest": 6},
      "panel_rect": [120, 60, 320, 220],
      "state_labels": {"0": "removed", "6": "mounted"},
      "mechanisms": [
        {"kind": "magnetic_attraction",
         "hold": [{"param": "run_state", "op": "==", "value": "blending"}]}
      ]
    },
    {
      "name": "jar_lid",
      "joint": {"kind": "revolute", "limits": [0, 50], "rest": 0},
      "panel_rect": [150, 10, 290, 50],
      "state_labels": {"0": "closed", "50": "open"},
      "mechanisms": [
        {"kind": "magnetic_attraction",
         "hold": [{"param": "run_state", "op": "==", "value": "blending"}]}
      ]
    },
    {
      "name": "speed_dial",
      "joint": {"kind": "revolute", "limits": [0, 70], "rest": 0, "detents": [0, 35, 70]},
      "panel_rect": [40, 260, 130, 350],
      "state_labels": {"0": "off", "35": "low", "70": "high"},
      "mechanisms": [
        {"kind": "safety_lock",
         "unlocked_when": [{"part": "jar", "op": "==", "value": "mounted"},
                           {"part": "jar_lid", "op": "==", "value": "closed"}],
         "blocks": ["Rotate"]}
      ]
    },
    {
      "name": "blade",
      "joint": {"kind": "revolute", "limits": [0, 360], "rest": 0},
      "panel_rect": [200, 240, 260, 300],
      "state_labels": {},
      "mechanisms": [
        {"kind": "rotary_motor", "joint": "blade", "rate": 15,
         "on_when": [{"param": "run_state", "op": "==", "value": "blending"}]}
      ]
    },
    {
      "name": "power_lamp",
      "joint": {"kind": "fixed"},
      "panel_rect": [340, 260, 410, 310],
      "state_labels": {},
      "mechanisms": [
        {"kind": "illumination",
         "on_when": [{"param": "run_state", "op": "==", "value": "blending"}]}
      ]
    },
    {
      "name": "badge",
      "joint": {"kind": "fixed"},
      "panel_rect": [340, 330, 410, 370],
      "state_labels": {},
      "mechanisms": [
        {"kind": "logo_indicator", "mode_when": [
          {"when": [{"param": "run_state", "op": "==", "value": "blending"}], "mode": "on"},
          {"when": [{"part": "jar", "op": "==", "value": "removed"}], "mode": "flash"}
        ]}
      ]
    }
  ],
  "parameters": [
    {"name": "run_state", "domain": {"labels": ["idle", "blending"]}, "initial": "idle"}
  ],
  "rules": [
    {"id": "jar_off_stops", "priority": 2,
     "when": [{"part": "jar", "op": "==", "value": "removed"}],
     "then": [{"set": "parameter", "name": "run_state", "value": "idle"}]},
    {"id": "lid_open_stops", "priority": 2,
     "when": [{"part": "jar_lid", "op": "==", "value": "open"}],
     "then": [{"set": "parameter", "name": "run_state", "value": "idle"}]},
    {"id": "dial_off_stops", "priority": 2,
     "when": [{"part": "speed_dial", "op": "==", "value": "off"}],
     "then": [{"set": "parameter", "name": "run_state", "value": "idle"}]},
    {"id": "spin", "priority": 1,
     "when": [{"part": "speed_dial", "op": "!=", "value": "off"},
              {"part": "jar", "op": "==", "value": "mounted"},
              {"part": "jar_lid", "op": "==", "value": "closed"}],
     "then": [{"set": "parameter", "name": "run_state", "value": "blending"}]}
  ],
  "objects": ["measuring_cup"]
})JSON";

  b.drafts.push_back({"bl60_high",
                      "Blend the smoothie on high.",
                      {},
                      {param_is("run_state", std::string("blending")),
                       part_is("speed_dial", "high")},
                      {pert(0, {part_fx("jar_lid", "open")})},
                      {"speed_dial", "jar_lid", "jar"}});
  b.drafts.push_back({"bl60_mount_low",
                      "Seat the jar and blend on low.",
                      {"Slide(jar, \"removed\")"},
                      {param_is("run_state", std::string("blending")),
                       part_is("speed_dial", "low")},
                      {pert(1, {part_fx("jar", "removed")})},
                      {"jar", "speed_dial", "blade"}});
  b.drafts.push_back({"bl60_scrape",
                      "Stop the motor and open the lid to scrape down.",
                      {"Rotate(speed_dial, \"low\", 35.0)"},
                      {part_is("speed_dial", "off"), part_is("jar_lid", "open")},
                      {pert(1, {part_fx("speed_dial", "low")})},
                      {"speed_dial", "jar_lid", "power_lamp"}});
  b.drafts.push_back({"bl60_rinse",
                      "Lift the jar off for rinsing.",
                      {},
                      {part_is("jar", "removed")},
                      {pert(0, {part_fx("speed_dial", "low")})},
                      {"jar", "speed_dial", "badge"}});
  b.drafts.push_back({"bl60_assemble",
                      "Build it up from parts and blend on high.",
                      {"Open(jar_lid)", "Slide(jar, \"removed\")"},
                      {param_is("run_state", std::string("blending")),
                       part_is("speed_dial", "high")},
                      {pert(1, {part_fx("jar_lid", "open")}),
                       pert(2, {part_fx("jar", "removed")})},
                      {"jar", "jar_lid", "speed_dial"}});
  return b;
}

// ------------------------------------------------------- negative fixtures

struct Negative {
  std::string file;
  std::string text;
  enum class Expect { LoadError, ErrorFinding, WarningOnly, NotJson } expect;
  std::string finding_code;  // for ErrorFinding / WarningOnly
};

std::vector<Negative> negatives() {
  std::vector<Negative> out;

  out.push_back({"trigger_cycle.json", R"JSON({
  "id": "latch_pair",
  "category": "kettle",
  "panel": {"width": 200, "height": 120},
  "parts": [
    {
      "name": "latch_a",
      "joint": {"kind": "revolute", "limits": [0, 30], "rest": 0},
      "panel_rect": [10, 10, 60, 60],
      "state_labels": {"0": "clear", "30": "set"},
      "mechanisms": [
        {"kind": "mechanical_trigger", "on": {"part": "latch_b", "state": "set"},
         "target": "latch_a",
         "effect": {"set": "part_state", "name": "latch_a", "value": "set"}, "guard": []}
      ]
    },
    {
      "name": "latch_b",
      "joint": {"kind": "revolute", "limits": [0, 30], "rest": 0},
      "panel_rect": [80, 10, 130, 60],
      "state_labels": {"0": "clear", "30": "set"},
      "mechanisms": [
        {"kind": "mechanical_trigger", "on": {"part": "latch_a", "state": "set"},
         "target": "latch_b",
         "effect": {"set": "part_state", "name": "latch_b", "value": "set"}, "guard": []}
      ]
    }
  ],
  "parameters": [],
  "rules": [],
  "objects": []
})JSON",
                 Negative::Expect::ErrorFinding, "trigger_cycle"});

  out.push_back({"rule_oscillation.json", R"JSON({
  "id": "ping_pong",
  "category": "kettle",
  "panel": {"width": 200, "height": 120},
  "parts": [
    {
      "name": "shell",
      "joint": {"kind": "fixed"},
      "panel_rect": [10, 10, 190, 110],
      "state_labels": {},
      "mechanisms": []
    }
  ],
  "parameters": [
    {"name": "ping", "domain": {"min": 0, "max": 1, "step": 1}, "initial": 0}
  ],
  "rules": [
    {"id": "ping_up", "priority": 1,
     "when": [{"param": "ping", "op": "==", "value": 0}],
     "then": [{"set": "parameter", "name": "ping", "value": 1}]},
    {"id": "ping_down", "priority": 1,
     "when": [{"param": "ping", "op": "==", "value": 1}],
     "then": [{"set": "parameter", "name": "ping", "value": 0}]}
  ],
  "objects": []
})JSON",
                 Negative::Expect::ErrorFinding, "rule_oscillation"});

  out.push_back({"unknown_category.json", R"JSON({
  "id": "mystery_box",
  "category": "teleporter",
  "panel": {"width": 200, "height": 120},
  "parts": [
    {
      "name": "lever",
      "joint": {"kind": "revolute", "limits": [0, 30], "rest": 0},
      "panel_rect": [10, 10, 60, 60],
      "state_labels": {"0": "off", "30": "on"},
      "mechanisms": []
    }
  ],
  "parameters": [],
  "rules": [],
  "objects": []
})JSON",
                 Negative::Expect::WarningOnly, "unknown_category"});

  out.push_back({"rule_unknown_part.json", R"JSON({
  "id": "ghost_rule",
  "category": "kettle",
  "panel": {"width": 200, "height": 120},
  "parts": [
    {
      "name": "lever",
      "joint": {"kind": "revolute", "limits": [0, 30], "rest": 0},
      "panel_rect": [10, 10, 60, 60],
      "state_labels": {"0": "off", "30": "on"},
      "mechanisms": []
    }
  ],
  "parameters": [],
  "rules": [
    {"id": "haunt", "priority": 1,
     "when": [{"part": "ghost", "op": "==", "value": "on"}],
     "then": [{"set": "parameter", "name": "run_state", "value": "idle"}]}
  ],
  "objects": []
})JSON",
                 Negative::Expect::LoadError, ""});

  out.push_back({"inverted_limits.json", R"JSON({
  "id": "bad_limits",
  "category": "kettle",
  "panel": {"width": 200, "height": 120},
  "parts": [
    {
      "name": "lever",
      "joint": {"kind": "revolute", "limits": [50, 10], "rest": 50},
      "panel_rect": [10, 10, 60, 60],
      "state_labels": {},
      "mechanisms": []
    }
  ],
  "parameters": [],
  "rules": [],
  "objects": []
})JSON",
                 Negative::Expect::LoadError, ""});

  out.push_back({"duplicate_part.json", R"JSON({
  "id": "twins",
  "category": "kettle",
  "panel": {"width": 200, "height": 120},
  "parts": [
    {
      "name": "knob",
      "joint": {"kind": "revolute", "limits": [0, 30], "rest": 0},
      "panel_rect": [10, 10, 60, 60],
      "state_labels": {},
      "mechanisms": []
    },
    {
      "name": "knob",
      "joint": {"kind": "revolute", "limits": [0, 30], "rest": 0},
      "panel_rect": [80, 10, 130, 60],
      "state_labels": {},
      "mechanisms": []
    }
  ],
  "parameters": [],
  "rules": [],
  "objects": []
})JSON",
                 Negative::Expect::LoadError, ""});

  out.push_back({"label_outside_limits.json", R"JSON({
  "id": "far_label",
  "category": "kettle",
  "panel": {"width": 200, "height": 120},
  "parts": [
    {
      "name": "dial",
      "joint": {"kind": "revolute", "limits": [0, 90], "rest": 0},
      "panel_rect": [10, 10, 60, 60],
      "state_labels": {"0": "near", "120": "far"},
      "mechanisms": []
    }
  ],
  "parameters": [],
  "rules": [],
  "objects": []
})JSON",
                 Negative::Expect::LoadError, ""});

  out.push_back({"inverted_rect.json", R"JSON({
  "id": "bad_rect",
  "category": "kettle",
  "panel": {"width": 400, "height": 300},
  "parts": [
    {
      "name": "plate",
      "joint": {"kind": "fixed"},
      "panel_rect": [300, 200, 100, 240],
      "state_labels": {},
      "mechanisms": []
    }
  ],
  "parameters": [],
  "rules": [],
  "objects": []
})JSON",
                 Negative::Expect::LoadError, ""});

  out.push_back({"initial_outside_domain.json", R"JSON({
  "id": "overflow",
  "category": "kettle",
  "panel": {"width": 200, "height": 120},
  "parts": [
    {
      "name": "shell",
      "joint": {"kind": "fixed"},
      "panel_rect": [10, 10, 190, 110],
      "state_labels": {},
      "mechanisms": []
    }
  ],
  "parameters": [
    {"name": "count", "domain": {"min": 0, "max": 3, "step": 1}, "initial": 7}
  ],
  "rules": [],
  "objects": []
})JSON",
                 Negative::Expect::LoadError, ""});

  out.push_back({"not_json.json", "{ this is not json\n", Negative::Expect::NotJson, ""});

  return out;
}

void verify_negative(const Negative& n) {
  if (n.expect == Negative::Expect::NotJson) {
    check(nlohmann::json::parse(n.text, nullptr, false).is_discarded(),
          n.file + ": expected unparseable JSON");
    return;
  }
  if (n.expect == Negative::Expect::LoadError) {
    try {
      load_spec(n.text, n.file);
      check(false, n.file + ": expected a load error");
    } catch (const SpecError&) {
    }
    return;
  }
  const ApplianceSpec spec = load_spec(n.text, n.file);
  const ValidationReport report = validate_spec(spec);
  bool found = false;
  for (const auto& f : report.findings) found = found || f.code == n.finding_code;
  check(found, n.file + ": expected finding '" + n.finding_code + "'");
  if (n.expect == Negative::Expect::ErrorFinding) {
    check(!report.ok(), n.file + ": expected an error finding");
  } else {
    check(report.ok(), n.file + ": expected warnings only");
  }
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path out_dir = argc > 1 ? fs::path(argv[1]) : fs::path("corpus");
  try {
    std::vector<Bundle> bundles = {microwave(),       kettle(), toaster(),
                                   air_fryer(),       stand_mixer(), washing_machine(),
                                   oven(),            coffee_machine(), blender()};

    const auto planner = make_planner(endpoint_from_address("builtin:oracle"), 0);

    size_t episode_count = 0;
    size_t perturbation_count = 0;
    std::vector<std::string> categories;
    Episode sample_for_bad_episode;
    std::string sample_appliance;

    for (size_t bi = 0; bi < bundles.size(); ++bi) {
      const Bundle& bundle = bundles[bi];
      const ApplianceSpec spec = load_spec(bundle.json, "bundle " + std::to_string(bi));

      const ValidationReport report = validate_spec(spec);
      check(report.findings.empty(), spec.id + ": validation findings present");
      if (std::find(categories.begin(), categories.end(), spec.category) == categories.end()) {
        categories.push_back(spec.category);
      }

      std::vector<Episode> episodes;
      std::vector<ManualRecipe> recipes;
      for (size_t ei = 0; ei < bundle.drafts.size(); ++ei) {
        Episode e = realize(spec, bundle.drafts[ei], (bi + 1) * 100 + ei);
        recipes.push_back({e.instruction, e.gt_plan.steps});
        episodes.push_back(std::move(e));
      }

      const ManualDocument manual = render_manual(spec, bi * 17 + 3, recipes);
      const auto add_pages = [&manual](Episode& e, const std::string& category) {
        const auto indices = manual.pages_of(category);
        if (!indices.empty()) e.relevant_pages[category] = indices;
      };
      for (size_t ei = 0; ei < episodes.size(); ++ei) {
        Episode& e = episodes[ei];
        add_pages(e, "operating_procedure");
        if (ei % 2 == 1) add_pages(e, "safety_precaution");
        if (ei == 2) add_pages(e, "maintenance");
        check(!e.relevant_pages.empty(), e.id + ": no relevant pages");

        const auto problems = check_episode(e, spec, static_cast<int>(manual.pages.size()));
        check(problems.empty(),
              e.id + ": " + (problems.empty() ? "" : problems.front()));
        assert_reference_perfect(spec, manual, e, *planner);
      }

      write_file(out_dir / "specs" / (spec.id + ".json"),
                 std::string(bundle.json).substr(bundle.json.find('{')) + "\n");
      for (const auto& page : manual.pages) {
        write_file(out_dir / "manuals" / spec.id / page_filename(page), page.text);
      }
      write_file(out_dir / "manuals" / spec.id / "manual.json",
                 manual_to_json(manual).dump(2) + "\n");
      write_file(out_dir / "schematics" / (spec.id + ".svg"), render_panel_schematic(spec));
      for (const auto& e : episodes) {
        write_file(out_dir / "episodes" / episode_filename(e),
                   episode_to_json(e).dump(2) + "\n");
        ++episode_count;
        perturbation_count += e.perturbations.size();
      }
      if (spec.id == "mx600") {
        sample_for_bad_episode = episodes.front();
        sample_appliance = spec.id;
      }
    }

    check(bundles.size() >= 8, "need at least 8 specs");
    check(categories.size() >= 6, "need at least 6 categories");
    check(episode_count >= 40, "need at least 40 episodes");
    check(perturbation_count >= 30, "need at least 30 perturbation steps");

    for (const auto& n : negatives()) {
      verify_negative(n);
      write_file(out_dir / "negative" / n.file, n.text);
    }

    // A structurally broken episode for validator tests: the perturbation
    // points past the plan and one grounding query names no part.
    {
      Episode bad = sample_for_bad_episode;
      bad.id = "mx600_bad_steps";
      check(!bad.perturbations.empty(), "sample episode lost its perturbation");
      bad.perturbations[0].at_step = 99;
      bad.grounding_queries.push_back("phantom_lever");
      const ApplianceSpec spec =
          load_spec(microwave().json, "mx600");
      check(!check_episode(bad, spec, 100).empty(), "broken episode passed its checks");
      write_file(out_dir / "negative" / "bad_steps.episode.json",
                 episode_to_json(bad).dump(2) + "\n");
    }

    std::cout << "corpus: " << bundles.size() << " specs, " << categories.size()
              << " categories, " << episode_count << " episodes, " << perturbation_count
              << " perturbation steps -> " << out_dir.string() << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "corpusgen: " << e.what() << "\n";
    return 1;
  }
}
