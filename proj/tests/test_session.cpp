#include <algorithm>
#include <string>

#include "appsim/actions.hpp"
#include "appsim/util.hpp"
#include "appsim/errors.hpp"
#include "appsim/session.hpp"
#include "appsim/spec_io.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "json.hpp"

using namespace appsim;

namespace {

AtomicAction act(const std::string& text) { return parse_action(text); }

// Runs the standard cook setup: 2 minutes on the timer, start pressed.
void start_cooking(Session& s) {
  REQUIRE(s.execute_action(act("Rotate(timer_knob, \"2\", 72.0)")).ok);
  REQUIRE(s.execute_action(act("Press(start_button, \"pressed\", 1)")).ok);
}

std::string label_of(const Observation& o, const std::string& part) {
  for (const auto& p : o.parts) {
    if (p.name == part) return p.state_label;
  }
  return "<missing part>";
}

double joint_of(const Observation& o, const std::string& part) {
  for (const auto& p : o.parts) {
    if (p.name == part) return p.joint_value;
  }
  return -1e9;
}

}  // namespace

TEST_CASE("fresh session: rests, initials, rendered registers") {
  ApplianceSpec spec = fixtures::micro_spec();
  Session s(spec, 7);
  Observation o = s.observe();
  CHECK(o.tick == 0);
  CHECK(label_of(o, "door") == "closed");
  CHECK(label_of(o, "timer_knob") == "0");
  CHECK(label_of(o, "lever") == "up");
  CHECK(o.screen_text == "time_left: 0 min");
  CHECK(o.lights.at("lamp") == "off");
  CHECK(o.indicators.at("logo_badge") == "off");
  CHECK(o.motors.at("turntable") == "stopped");
  CHECK(o.held_object.empty());
  CHECK(o.panel_width == 800);

  // Same spec and seed build byte-identical states.
  Session t(spec, 7);
  CHECK(serialize_session_state(t.snapshot()) == serialize_session_state(s.snapshot()));
}

TEST_CASE("press trigger pops the door and the button springs back") {
  ApplianceSpec spec = fixtures::micro_spec();
  Session s(spec, 1);
  ActionOutcome out = s.execute_action(act("Press(door_button, \"pressed\", 1)"));
  REQUIRE(out.ok);
  CHECK(label_of(out.observation, "door") == "open");
  CHECK(label_of(out.observation, "door_button") == "released");
  CHECK(out.observation.indicators.at("logo_badge") == "flash");
  CHECK(s.snapshot().pressed.at("door_button") == 1);
  CHECK_FALSE(out.effects_applied.empty());
}

TEST_CASE("cook cycle: rules, motor, countdown, timeout") {
  ApplianceSpec spec = fixtures::micro_spec();
  Session s(spec, 1);
  start_cooking(s);

  Observation o = s.observe();
  CHECK(o.screen_text == "time_left: 2 min");
  CHECK(o.lights.at("lamp") == "on");
  CHECK(o.motors.at("turntable") == "running");
  CHECK(o.indicators.at("logo_badge") == "on");
  CHECK(label_of(o, "start_button") == "released");  // sprang back

  // 5 ticks at 2 degrees per tick; half a detent consumed.
  o = s.step(5);
  CHECK(joint_of(o, "turntable") == 10.0);
  CHECK(s.snapshot().countdown_remainders.at("timer_knob") == 5);

  // 10 ticks in: one detent consumed, one minute left.
  o = s.step(5);
  CHECK(label_of(o, "timer_knob") == "1");
  CHECK(o.screen_text == "time_left: 1 min");
  CHECK(o.motors.at("turntable") == "running");

  // Run out. The knob hits zero, rules stop the cook, outputs go quiet.
  o = s.step(10);
  CHECK(label_of(o, "timer_knob") == "0");
  CHECK(o.screen_text == "time_left: 0 min");
  CHECK(o.lights.at("lamp") == "off");
  CHECK(o.motors.at("turntable") == "stopped");
  CHECK(o.indicators.at("logo_badge") == "off");
  CHECK(joint_of(o, "turntable") == 40.0);  // 20 ticks of drive, then parked
  CHECK(o.tick == 20);

  // Nothing moves once idle.
  Observation later = s.step(20);
  CHECK(joint_of(later, "turntable") == 40.0);
  CHECK(later.tick == 40);
}

TEST_CASE("magnet holds the door shut while cooking") {
  ApplianceSpec spec = fixtures::micro_spec();
  Session s(spec, 1);
  start_cooking(s);
  SessionState before = s.snapshot();

  ActionOutcome out = s.execute_action(act("Open(door)"));
  CHECK_FALSE(out.ok);
  CHECK(out.error == ActionOutcome::Error::GuardViolation);
  CHECK(s.snapshot() == before);  // atomicity

  // The door-pop trigger is guarded on idle, so the press lands but the door
  // stays shut.
  out = s.execute_action(act("Press(door_button, \"pressed\", 1)"));
  CHECK(out.ok);
  CHECK(label_of(out.observation, "door") == "closed");

  s.step(20);  // run out the timer
  out = s.execute_action(act("Open(door)"));
  CHECK(out.ok);
  CHECK(label_of(out.observation, "door") == "open");
}

TEST_CASE("safety lock rejects start while the door is open") {
  ApplianceSpec spec = fixtures::micro_spec();
  Session s(spec, 1);
  REQUIRE(s.execute_action(act("Open(door)")).ok);
  ActionOutcome out = s.execute_action(act("Press(start_button, \"pressed\", 1)"));
  CHECK_FALSE(out.ok);
  CHECK(out.error == ActionOutcome::Error::GuardViolation);

  REQUIRE(s.execute_action(act("Close(door)")).ok);
  CHECK(s.execute_action(act("Press(start_button, \"pressed\", 1)")).ok);
}

TEST_CASE("door opening mid-cook stops the appliance") {
  ApplianceSpec spec = fixtures::micro_spec();
  Session s(spec, 1);
  start_cooking(s);
  // The agent cannot open the held door, but interference can.
  Perturbation p;
  p.changes.push_back(Effect{EffectTarget::PartState, "door", ParamValue(std::string("open"))});
  Observation o = s.apply_perturbation(p);
  CHECK(label_of(o, "door") == "open");
  CHECK(o.lights.at("lamp") == "off");
  CHECK(o.motors.at("turntable") == "stopped");
}

TEST_CASE("compatibility matrix rejections") {
  ApplianceSpec spec = fixtures::micro_spec();
  Session s(spec, 1);
  SessionState before = s.snapshot();

  auto expect = [&](const std::string& text, ActionOutcome::Error err) {
    ActionOutcome out = s.execute_action(act(text));
    CHECK_FALSE(out.ok);
    CHECK(out.error == err);
    CHECK(s.snapshot() == before);
  };

  expect("Press(quantum_button, \"pressed\", 1)", ActionOutcome::Error::UnknownPart);
  expect("Rotate(door_button, \"pressed\", 2.0)", ActionOutcome::Error::IncompatibleAction);
  expect("Press(door, \"open\", 1)", ActionOutcome::Error::IncompatibleAction);
  expect("Touch(door, 1)", ActionOutcome::Error::IncompatibleAction);
  expect("Open(timer_knob)", ActionOutcome::Error::IncompatibleAction);
  expect("Slide(door, \"open\")", ActionOutcome::Error::IncompatibleAction);
  expect("Flip(timer_knob, \"3\")", ActionOutcome::Error::IncompatibleAction);
  expect("Slide(lever, \"middle\")", ActionOutcome::Error::ParameterOutOfRange);
  expect("Rotate(timer_knob, \"3\", 36.0)", ActionOutcome::Error::ParameterOutOfRange);
  expect("Rotate(timer_knob, \"9\", 36.0)", ActionOutcome::Error::ParameterOutOfRange);
}

TEST_CASE("rotation must land exactly on the named detent") {
  ApplianceSpec spec = fixtures::micro_spec();
  Session s(spec, 1);
  ActionOutcome out = s.execute_action(act("Rotate(timer_knob, \"3\", 108.0)"));
  REQUIRE(out.ok);
  CHECK(label_of(out.observation, "timer_knob") == "3");
  CHECK(out.observation.screen_text == "time_left: 3 min");

  // Signed rotation back down.
  out = s.execute_action(act("Rotate(timer_knob, \"1\", -72.0)"));
  REQUIRE(out.ok);
  CHECK(label_of(out.observation, "timer_knob") == "1");
}

TEST_CASE("flip drives two-position revolute joints") {
  ApplianceSpec spec = fixtures::micro_spec();
  Session s(spec, 1);
  ActionOutcome out = s.execute_action(act("Flip(door, \"open\")"));
  REQUIRE(out.ok);
  CHECK(label_of(out.observation, "door") == "open");
}

TEST_CASE("pull and push ride the joint to its ends") {
  ApplianceSpec spec = fixtures::micro_spec();
  Session s(spec, 1);

  // The lever springs back up within the action unless latched.
  ActionOutcome out = s.execute_action(act("Push(lever)"));
  REQUIRE(out.ok);
  CHECK(label_of(out.observation, "lever") == "up");

  Perturbation latch;
  latch.changes.push_back(Effect{EffectTarget::Parameter, "lever_latch", ParamValue(int64_t{1})});
  s.apply_perturbation(latch);
  out = s.execute_action(act("Push(lever)"));
  REQUIRE(out.ok);
  CHECK(label_of(out.observation, "lever") == "down");

  out = s.execute_action(act("Pull(lever)"));
  REQUIRE(out.ok);
  CHECK(label_of(out.observation, "lever") == "up");
}

TEST_CASE("latched spring returns over real ticks after release") {
  ApplianceSpec spec = fixtures::micro_spec();
  Session s(spec, 1);
  Perturbation latch;
  latch.changes.push_back(Effect{EffectTarget::Parameter, "lever_latch", ParamValue(int64_t{1})});
  s.apply_perturbation(latch);
  REQUIRE(s.execute_action(act("Push(lever)")).ok);

  Perturbation release;
  release.changes.push_back(
      Effect{EffectTarget::Parameter, "lever_latch", ParamValue(int64_t{0})});
  Observation o = s.apply_perturbation(release);
  // Perturbations do not settle springs; the lever climbs 2mm per tick.
  CHECK(joint_of(o, "lever") == 0.0);
  CHECK(joint_of(s.step(1), "lever") == 2.0);
  CHECK(joint_of(s.step(1), "lever") == 4.0);
  CHECK(joint_of(s.step(1), "lever") == 6.0);
  CHECK(joint_of(s.step(5), "lever") == 6.0);
}

TEST_CASE("touch pad applies its effects") {
  ApplianceSpec spec = fixtures::micro_spec();
  Session s(spec, 1);
  ActionOutcome out = s.execute_action(act("Touch(power_pad, 2)"));
  REQUIRE(out.ok);
  CHECK(std::get<std::string>(s.parameter_value("power_level")) == "high");
}

TEST_CASE("object hand rules") {
  ApplianceSpec spec = fixtures::micro_spec();
  Session s(spec, 1);

  CHECK(s.execute_action(act("Pick(kettle_ghost)")).error ==
        ActionOutcome::Error::UnknownPart);
  CHECK(s.execute_action(act("Place(mug)")).error == ActionOutcome::Error::ObjectHandError);
  CHECK(s.execute_action(act("Pour(mug, door)")).error ==
        ActionOutcome::Error::ObjectHandError);

  REQUIRE(s.execute_action(act("Pick(mug)")).ok);
  CHECK(s.held_object() == "mug");
  CHECK(s.execute_action(act("Pick(mug)")).error == ActionOutcome::Error::ObjectHandError);
  CHECK(s.execute_action(act("Move(mug, \"counter\", \"table\")")).error ==
        ActionOutcome::Error::ObjectHandError);
  CHECK(s.execute_action(act("Pour(mug, door)")).ok);
  CHECK(s.execute_action(act("Pour(mug, nowhere)")).error ==
        ActionOutcome::Error::UnknownPart);

  REQUIRE(s.execute_action(act("Place(mug)")).ok);
  CHECK(s.held_object().empty());
  CHECK(s.execute_action(act("Move(mug, \"counter\", \"table\")")).ok);
}

TEST_CASE("external knob set clears countdown progress") {
  ApplianceSpec spec = fixtures::micro_spec();
  Session s(spec, 1);
  start_cooking(s);
  s.step(5);
  CHECK(s.snapshot().countdown_remainders.at("timer_knob") == 5);

  SUBCASE("via action") {
    REQUIRE(s.execute_action(act("Rotate(timer_knob, \"3\", 36.0)")).ok);
    CHECK(s.snapshot().countdown_remainders.at("timer_knob") == 0);
  }
  SUBCASE("via perturbation") {
    Perturbation p;
    p.changes.push_back(
        Effect{EffectTarget::PartState, "timer_knob", ParamValue(std::string("1"))});
    s.apply_perturbation(p);
    CHECK(s.snapshot().countdown_remainders.at("timer_knob") == 0);
  }
}

TEST_CASE("perturbations bypass guards and skip cascades") {
  ApplianceSpec spec = fixtures::micro_spec();
  Session s(spec, 1);
  start_cooking(s);

  // Empty change list: identity.
  SessionState before = s.snapshot();
  Perturbation noop;
  s.apply_perturbation(noop);
  CHECK(s.snapshot() == before);

  // Rewriting a screen field sticks until the next refresh overwrites it.
  Perturbation rewrite;
  rewrite.changes.push_back(
      Effect{EffectTarget::ScreenField, "time_left", ParamValue(std::string("88 min"))});
  Observation o = s.apply_perturbation(rewrite);
  CHECK(o.screen_text == "time_left: 88 min");
  o = s.step(1);
  CHECK(o.screen_text == "time_left: 2 min");

  // Invalid effects are refused.
  Perturbation bad;
  bad.changes.push_back(Effect{EffectTarget::Parameter, "time_left", ParamValue(int64_t{77})});
  CHECK_THROWS_AS(s.apply_perturbation(bad), InvalidEffect);
}

TEST_CASE("snapshot and restore preserve future behavior") {
  ApplianceSpec spec = fixtures::micro_spec();
  Session s(spec, 3);
  start_cooking(s);
  s.step(7);  // mid-detent: remainder 7

  SessionState snap = s.snapshot();
  CHECK(snap.countdown_remainders.at("timer_knob") == 7);

  // JSON round-trip of the state itself.
  SessionState reparsed =
      session_state_from_json(nlohmann::json::parse(serialize_session_state(snap)), "state");
  CHECK(reparsed == snap);

  Session r = Session::restore(spec, reparsed);
  CHECK(observation_to_json(r.observe()) == observation_to_json(s.observe()));

  // Identical futures, including the partial countdown tick: 3 more ticks
  // complete the first detent exactly.
  Observation a = s.step(3);
  Observation b = r.step(3);
  CHECK(observation_to_json(a) == observation_to_json(b));
  CHECK(label_of(a, "timer_knob") == "1");
  CHECK(s.snapshot().countdown_remainders.at("timer_knob") == 0);
  CHECK(serialize_session_state(s.snapshot()) == serialize_session_state(r.snapshot()));
}

TEST_CASE("restore rejects foreign or corrupt states") {
  ApplianceSpec micro = fixtures::micro_spec();
  ApplianceSpec toggle = fixtures::toggle_spec();
  Session s(micro, 3);
  SessionState snap = s.snapshot();

  CHECK_THROWS_AS(Session::restore(toggle, snap), SchemaMismatch);

  SessionState missing = snap;
  missing.joints.erase("door");
  CHECK_THROWS_AS(Session::restore(micro, missing), SchemaMismatch);

  SessionState outside = snap;
  outside.joints["door"] = 500.0;
  CHECK_THROWS_AS(Session::restore(micro, outside), SchemaMismatch);

  SessionState ghost = snap;
  ghost.parameters["ghost"] = int64_t{1};
  CHECK_THROWS_AS(Session::restore(micro, ghost), SchemaMismatch);

  SessionState bad_hold = snap;
  bad_hold.held_object = "anvil";
  CHECK_THROWS_AS(Session::restore(micro, bad_hold), SchemaMismatch);
}

TEST_CASE("tick additivity") {
  ApplianceSpec spec = fixtures::micro_spec();
  Session a(spec, 9);
  Session b(spec, 9);
  start_cooking(a);
  start_cooking(b);
  a.step(3);
  a.step(4);
  b.step(7);
  CHECK(serialize_session_state(a.snapshot()) == serialize_session_state(b.snapshot()));

  // step(0) is the identity.
  Observation before = a.observe();
  Observation after = a.step(0);
  CHECK(observation_to_json(before) == observation_to_json(after));
}

TEST_CASE("dynamics key ignores tick and press counters") {
  ApplianceSpec spec = fixtures::micro_spec();
  Session s(spec, 1);
  std::string key0 = dynamics_key(s.snapshot());

  // A press that changes nothing durable: button springs back, no rule fires.
  REQUIRE(s.execute_action(act("Press(start_button, \"pressed\", 1)")).ok);
  CHECK(dynamics_key(s.snapshot()) == key0);
  CHECK_FALSE(s.snapshot() == Session(spec, 1).snapshot());  // pressed count differs

  s.step(4);  // idle: time passes, nothing moves
  CHECK(dynamics_key(s.snapshot()) == key0);

  REQUIRE(s.execute_action(act("Rotate(timer_knob, \"1\", 36.0)")).ok);
  CHECK(dynamics_key(s.snapshot()) != key0);
}

TEST_CASE("trace log is deterministic and ordered") {
  ApplianceSpec spec = fixtures::micro_spec();

  auto run = [&spec]() {
    TraceBuffer buffer;
    Session s(spec, 5);
    s.set_trace_sink(&buffer);
    s.execute_action(act("Rotate(timer_knob, \"2\", 72.0)"));
    s.execute_action(act("Press(start_button, \"pressed\", 1)"));
    s.execute_action(act("Open(door)"));  // rejected: magnet
    s.step(12);
    Perturbation p;
    p.changes.push_back(
        Effect{EffectTarget::PartState, "door", ParamValue(std::string("open"))});
    s.apply_perturbation(p);
    return buffer.text();
  };

  std::string first = run();
  CHECK(first == run());
  REQUIRE_FALSE(first.empty());

  // Well-formed JSONL with strictly increasing seq and batch headers first.
  int64_t expected_seq = 0;
  std::vector<std::string> kinds;
  for (const auto& line : appsim::split_lines(first)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    CHECK(j["seq"] == expected_seq);
    ++expected_seq;
    kinds.push_back(j["kind"]);
  }
  CHECK(kinds.front() == "action");
  CHECK(std::count(kinds.begin(), kinds.end(), "action") == 3);
  CHECK(std::count(kinds.begin(), kinds.end(), "tick") == 1);
  CHECK(std::count(kinds.begin(), kinds.end(), "perturbation") == 1);
  CHECK(std::count(kinds.begin(), kinds.end(), "rule_fire") >= 2);

  // The rejected action contributes exactly one line and no effects.
  bool saw_rejected = false;
  for (const auto& line : appsim::split_lines(first)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    if (j["kind"] == "action" && j["payload"]["status"] == "rejected") {
      saw_rejected = true;
      CHECK(j["payload"]["error"] == "GuardViolation");
    }
  }
  CHECK(saw_rejected);
}

TEST_CASE("rule oscillation is cut off") {
  const char* ping_pong = R"JSON({
    "id": "pingpong", "category": "kettle", "panel": {"width": 10, "height": 10},
    "parts": [
      {"name": "shell", "joint": {"kind": "fixed"}, "panel_rect": [0, 0, 5, 5],
       "state_labels": {}, "mechanisms": []}
    ],
    "parameters": [
      {"name": "g", "domain": {"min": 0, "max": 1}, "initial": 0}
    ],
    "rules": [
      {"id": "up", "when": [{"param": "g", "op": "==", "value": 0}],
       "then": [{"set": "parameter", "name": "g", "value": 1}]},
      {"id": "down", "when": [{"param": "g", "op": "==", "value": 1}],
       "then": [{"set": "parameter", "name": "g", "value": 0}]}
    ],
    "objects": []
  })JSON";
  ApplianceSpec spec = load_spec(ping_pong, "pingpong");
  CHECK_THROWS_AS(Session(spec, 1), RuleOscillation);
}

TEST_CASE("fixpoint quiescence after every operation") {
  // After any mutation, no rule may be left both satisfied and unapplied.
  ApplianceSpec spec = fixtures::micro_spec();
  Session s(spec, 2);

  auto quiescent = [&]() {
    for (int idx : spec.rule_order()) {
      const LogicRule& rule = spec.rules[idx];
      if (!eval_predicate(rule.when, s)) continue;
      for (const auto& e : rule.then) {
        if (e.target == EffectTarget::Parameter) {
          CHECK(param_value_equal(s.parameter_value(e.name), e.value));
        }
      }
    }
  };

  quiescent();
  s.execute_action(act("Rotate(timer_knob, \"2\", 72.0)"));
  quiescent();
  s.execute_action(act("Press(start_button, \"pressed\", 1)"));
  quiescent();
  s.step(13);
  quiescent();
  Perturbation p;
  p.changes.push_back(Effect{EffectTarget::PartState, "door", ParamValue(std::string("open"))});
  s.apply_perturbation(p);
  quiescent();
  s.step(30);
  quiescent();
}
