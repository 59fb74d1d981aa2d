#include <map>
#include <string>

#include "appsim/errors.hpp"
#include "appsim/mechanism_engine.hpp"
#include "appsim/spec_io.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace appsim;

namespace {

// Minimal stand-in for a session so policies can be probed in isolation.
struct FakeView final : SessionView {
  const ApplianceSpec* spec_;
  std::map<std::string, double> joints;
  std::map<std::string, ParamValue> params;

  explicit FakeView(const ApplianceSpec& s) : spec_(&s) {
    for (const auto& part : s.parts) {
      if (part.joint.movable()) joints[part.name] = part.joint.rest;
    }
    for (const auto& p : s.parameters) params[p.name] = p.initial;
  }
  const ApplianceSpec& spec() const override { return *spec_; }
  double joint_value(const std::string& part) const override {
    auto it = joints.find(part);
    return it == joints.end() ? 0.0 : it->second;
  }
  std::string state_label(const std::string& part) const override {
    const PartSpec* p = spec_->part(part);
    if (!p || !p->joint.movable()) return "";
    auto label = p->label_at(joint_value(part));
    return label ? *label : "";
  }
  ParamValue parameter_value(const std::string& name) const override {
    auto it = params.find(name);
    return it == params.end() ? ParamValue(int64_t{0}) : it->second;
  }
};

// Three-link trigger chain. Rest positions sit on the non-target labels so
// every link changes a value when it fires. The middle link's guard reads a,
// which the cascade itself rewrites; the guard must see the pre-cascade view.
const char* kChainJson = R"JSON({
  "id": "chain_test", "category": "kettle", "panel": {"width": 100, "height": 100},
  "parts": [
    {"name": "btn", "joint": {"kind": "prismatic", "limits": [0, 1], "rest": 0},
     "panel_rect": [0, 0, 10, 10], "state_labels": {"0": "up", "1": "down"},
     "mechanisms": [
       {"kind": "mechanical_trigger", "on": {"press": "btn"}, "target": "a",
        "effect": {"set": "part_state", "name": "a", "value": "p"}}
     ]},
    {"name": "a", "joint": {"kind": "revolute", "limits": [0, 10], "rest": 10},
     "panel_rect": [10, 0, 20, 10], "state_labels": {"0": "p", "10": "q"},
     "mechanisms": [
       {"kind": "mechanical_trigger", "on": {"part": "a", "state": "p"}, "target": "b",
        "effect": {"set": "part_state", "name": "b", "value": "x"},
        "guard": [{"part": "a", "op": "==", "value": "q"}]}
     ]},
    {"name": "b", "joint": {"kind": "revolute", "limits": [0, 10], "rest": 10},
     "panel_rect": [20, 0, 30, 10], "state_labels": {"0": "x", "10": "y"},
     "mechanisms": [
       {"kind": "mechanical_trigger", "on": {"part": "b", "state": "x"}, "target": "c",
        "effect": {"set": "part_state", "name": "c", "value": "m"}}
     ]},
    {"name": "c", "joint": {"kind": "revolute", "limits": [0, 10], "rest": 10},
     "panel_rect": [30, 0, 40, 10], "state_labels": {"0": "m", "10": "n"},
     "mechanisms": []}
  ],
  "parameters": [], "rules": [], "objects": []
})JSON";

// Five triggers closing a four-phase loop: p -> x -> q -> y -> p. Loads fine
// (loading is pure name resolution); the runtime cascade cap must stop it.
const char* kOscillatorJson = R"JSON({
  "id": "oscillator_test", "category": "kettle", "panel": {"width": 100, "height": 100},
  "parts": [
    {"name": "btn", "joint": {"kind": "prismatic", "limits": [0, 1], "rest": 0},
     "panel_rect": [0, 0, 10, 10], "state_labels": {"0": "up", "1": "down"},
     "mechanisms": [
       {"kind": "mechanical_trigger", "on": {"press": "btn"}, "target": "a",
        "effect": {"set": "part_state", "name": "a", "value": "p"}}
     ]},
    {"name": "a", "joint": {"kind": "revolute", "limits": [0, 10], "rest": 10},
     "panel_rect": [10, 0, 20, 10], "state_labels": {"0": "p", "10": "q"},
     "mechanisms": [
       {"kind": "mechanical_trigger", "on": {"part": "a", "state": "p"}, "target": "b",
        "effect": {"set": "part_state", "name": "b", "value": "x"}}
     ]},
    {"name": "b", "joint": {"kind": "revolute", "limits": [0, 10], "rest": 10},
     "panel_rect": [20, 0, 30, 10], "state_labels": {"0": "x", "10": "y"},
     "mechanisms": [
       {"kind": "mechanical_trigger", "on": {"part": "b", "state": "x"}, "target": "a",
        "effect": {"set": "part_state", "name": "a", "value": "q"}}
     ]},
    {"name": "h1", "joint": {"kind": "fixed"}, "panel_rect": [30, 0, 40, 10],
     "state_labels": {},
     "mechanisms": [
       {"kind": "mechanical_trigger", "on": {"part": "a", "state": "q"}, "target": "b",
        "effect": {"set": "part_state", "name": "b", "value": "y"}}
     ]},
    {"name": "h2", "joint": {"kind": "fixed"}, "panel_rect": [40, 0, 50, 10],
     "state_labels": {},
     "mechanisms": [
       {"kind": "mechanical_trigger", "on": {"part": "b", "state": "y"}, "target": "a",
        "effect": {"set": "part_state", "name": "a", "value": "p"}}
     ]}
  ],
  "parameters": [], "rules": [], "objects": []
})JSON";

AtomicAction press(const std::string& part) {
  AtomicAction a;
  a.kind = ActionKind::Press;
  a.part = part;
  a.target_state = "down";
  a.times = 1;
  return a;
}

}  // namespace

TEST_CASE("countdown advance") {
  CountdownConfig cfg;
  cfg.ticks_per_detent = 10;

  SUBCASE("full run to zero") {
    CountdownStep s = countdown_advance(cfg, 3, 0, 30);
    CHECK(s.detent_index == 0);
    CHECK(s.remainder == 0);
    CHECK(s.fired_zero);
  }
  SUBCASE("partial progress keeps a remainder") {
    CountdownStep s = countdown_advance(cfg, 3, 0, 12);
    CHECK(s.detent_index == 2);
    CHECK(s.remainder == 2);
    CHECK_FALSE(s.fired_zero);
  }
  SUBCASE("remainder accumulates across calls") {
    CountdownStep s = countdown_advance(cfg, 2, 7, 3);
    CHECK(s.detent_index == 1);
    CHECK(s.remainder == 0);
    CHECK_FALSE(s.fired_zero);
  }
  SUBCASE("zero is absorbing") {
    CountdownStep s = countdown_advance(cfg, 0, 5, 100);
    CHECK(s.detent_index == 0);
    CHECK(s.remainder == 0);
    CHECK_FALSE(s.fired_zero);
  }
  SUBCASE("overshoot clamps at zero and fires once") {
    CountdownStep s = countdown_advance(cfg, 1, 9, 50);
    CHECK(s.detent_index == 0);
    CHECK(s.remainder == 0);
    CHECK(s.fired_zero);
  }
}

TEST_CASE("spring relaxation") {
  ApplianceSpec spec = fixtures::micro_spec();
  FakeView view(spec);
  const PartSpec* lever = spec.part("lever");
  REQUIRE(lever != nullptr);
  const MechanismConfig* spring = lever->mechanism(MechanismKind::InnerSpring);
  REQUIRE(spring != nullptr);

  // Step size: 6mm span over 3 ticks = 2mm per tick.
  view.joints["lever"] = 0.0;
  auto effects = handle_event(*lever, *spring, tick_event(1), view);
  REQUIRE(effects.size() == 1);
  CHECK(effects[0].target == EffectTarget::PartState);
  CHECK(effects[0].name == "lever");
  CHECK(std::get<double>(effects[0].value) == 2.0);

  CHECK(std::get<double>(handle_event(*lever, *spring, tick_event(2), view)[0].value) == 4.0);
  // Clamp at rest, never overshoot.
  CHECK(std::get<double>(handle_event(*lever, *spring, tick_event(5), view)[0].value) == 6.0);

  SUBCASE("at rest: nothing to do") {
    view.joints["lever"] = 6.0;
    CHECK(handle_event(*lever, *spring, tick_event(4), view).empty());
  }
  SUBCASE("zero ticks: nothing to do") {
    CHECK(handle_event(*lever, *spring, tick_event(0), view).empty());
  }
  SUBCASE("latch holds the displaced position") {
    view.params["lever_latch"] = int64_t{1};
    CHECK(handle_event(*lever, *spring, tick_event(3), view).empty());
  }
}

TEST_CASE("magnet refuses joint motion while holding") {
  ApplianceSpec spec = fixtures::micro_spec();
  FakeView view(spec);
  const PartSpec* door = spec.part("door");
  const MechanismConfig* magnet = door->mechanism(MechanismKind::MagneticAttraction);
  REQUIRE(magnet != nullptr);

  AtomicAction open;
  open.kind = ActionKind::Open;
  open.part = "door";

  view.params["run_state"] = std::string("cooking");
  CHECK_THROWS_AS(handle_event(*door, *magnet, action_event(open), view), GuardViolation);

  // Releasing the hold predicate releases the door.
  view.params["run_state"] = std::string("idle");
  CHECK_NOTHROW(handle_event(*door, *magnet, action_event(open), view));

  // Motion to the position the door already holds passes even while held.
  AtomicAction close;
  close.kind = ActionKind::Close;
  close.part = "door";
  view.params["run_state"] = std::string("cooking");
  CHECK_NOTHROW(handle_event(*door, *magnet, action_event(close), view));
}

TEST_CASE("safety lock blocks listed kinds until unlocked") {
  ApplianceSpec spec = fixtures::micro_spec();
  FakeView view(spec);
  const PartSpec* start = spec.part("start_button");
  const MechanismConfig* lock = start->mechanism(MechanismKind::SafetyLock);
  REQUIRE(lock != nullptr);

  AtomicAction a = press("start_button");
  a.target_state = "pressed";

  view.joints["door"] = 90.0;  // open -> locked
  CHECK_THROWS_AS(handle_event(*start, *lock, action_event(a), view), GuardViolation);

  view.joints["door"] = 0.0;  // closed -> unlocked
  CHECK_NOTHROW(handle_event(*start, *lock, action_event(a), view));

  // Kinds outside the block list pass even while locked.
  AtomicAction pull;
  pull.kind = ActionKind::Pull;
  pull.part = "start_button";
  view.joints["door"] = 90.0;
  CHECK_NOTHROW(handle_event(*start, *lock, action_event(pull), view));
}

TEST_CASE("screen rendering substitutes name, value and unit") {
  ApplianceSpec spec = fixtures::micro_spec();
  const ScreenConfig& screen =
      spec.part("screen")->mechanism(MechanismKind::ScreenDisplay)->as<ScreenConfig>();
  const SettingParameter* time_left = spec.parameter("time_left");

  CHECK(render_screen_field(screen, *time_left, ParamValue(int64_t{2})) == "2 min");

  ScreenConfig named;
  named.format = "{name}={value}";
  CHECK(render_screen_field(named, *time_left, ParamValue(int64_t{0})) == "time_left=0");
}

TEST_CASE("touch sensing repeats its effects per touch") {
  ApplianceSpec spec = fixtures::micro_spec();
  FakeView view(spec);
  const PartSpec* pad = spec.part("power_pad");
  const MechanismConfig* touch = pad->mechanism(MechanismKind::TouchSensing);

  AtomicAction a;
  a.kind = ActionKind::Touch;
  a.part = "power_pad";
  a.times = 3;
  auto effects = handle_event(*pad, *touch, action_event(a), view);
  REQUIRE(effects.size() == 3);
  for (const auto& e : effects) {
    CHECK(e.target == EffectTarget::Parameter);
    CHECK(e.name == "power_level");
    CHECK(std::get<std::string>(e.value) == "high");
  }
}

TEST_CASE("illumination and indicator registers") {
  ApplianceSpec spec = fixtures::micro_spec();
  FakeView view(spec);
  const PartSpec* lamp = spec.part("lamp");
  const MechanismConfig* light = lamp->mechanism(MechanismKind::Illumination);
  const PartSpec* logo = spec.part("logo_badge");
  const MechanismConfig* indicator = logo->mechanism(MechanismKind::LogoIndicator);

  auto effects = handle_event(*lamp, *light, tick_event(0), view);
  REQUIRE(effects.size() == 1);
  CHECK(std::get<std::string>(effects[0].value) == "off");

  view.params["run_state"] = std::string("cooking");
  CHECK(std::get<std::string>(handle_event(*lamp, *light, tick_event(0), view)[0].value) ==
        "on");

  // First matching mode wins; cooking outranks the open-door flash.
  view.joints["door"] = 90.0;
  auto modes = handle_event(*logo, *indicator, tick_event(0), view);
  REQUIRE(modes.size() == 1);
  CHECK(modes[0].target == EffectTarget::Indicator);
  CHECK(std::get<std::string>(modes[0].value) == "on");

  view.params["run_state"] = std::string("idle");
  CHECK(std::get<std::string>(handle_event(*logo, *indicator, tick_event(0), view)[0].value) ==
        "flash");

  view.joints["door"] = 0.0;
  CHECK(std::get<std::string>(handle_event(*logo, *indicator, tick_event(0), view)[0].value) ==
        "off");
}

TEST_CASE("motor advance wraps full circles and clamps bounded joints") {
  ApplianceSpec spec = fixtures::micro_spec();
  FakeView view(spec);
  const PartSpec* turntable = spec.part("turntable");
  const MotorConfig& motor =
      turntable->mechanism(MechanismKind::RotaryMotor)->as<MotorConfig>();

  SUBCASE("off: identity") {
    CHECK(motor_advance(motor, turntable->joint, 42.0, 100, view) == 42.0);
  }
  SUBCASE("on: rate times ticks") {
    view.params["run_state"] = std::string("cooking");
    CHECK(motor_advance(motor, turntable->joint, 0.0, 5, view) == 10.0);
  }
  SUBCASE("full-circle joints wrap") {
    view.params["run_state"] = std::string("cooking");
    CHECK(motor_advance(motor, turntable->joint, 350.0, 10, view) == 10.0);
  }
  SUBCASE("bounded joints clamp") {
    view.params["run_state"] = std::string("cooking");
    JointSpec bounded{JointKind::Revolute, 0.0, 90.0, 0.0, {}};
    CHECK(motor_advance(motor, bounded, 60.0, 100, view) == 90.0);
  }
}

TEST_CASE("trigger cascade fires down the chain in declaration order") {
  ApplianceSpec spec = load_spec(kChainJson, "chain");
  FakeView view(spec);

  auto firings = trigger_propagate(spec, {action_event(press("btn"))}, view);
  REQUIRE(firings.size() == 3);
  CHECK(firings[0].host == "btn");
  CHECK(firings[0].effect.name == "a");
  CHECK(std::get<std::string>(firings[0].effect.value) == "p");
  CHECK(firings[1].host == "a");
  CHECK(firings[1].effect.name == "b");
  CHECK(firings[2].host == "b");
  CHECK(firings[2].effect.name == "c");
  CHECK(std::get<std::string>(firings[2].effect.value) == "m");
}

TEST_CASE("trigger guards see the pre-cascade view") {
  // The middle link requires a == "q". The cascade moves a to "p" before that
  // guard runs; it must still fire because guards read the entry state.
  ApplianceSpec spec = load_spec(kChainJson, "chain");
  FakeView view(spec);
  auto firings = trigger_propagate(spec, {action_event(press("btn"))}, view);
  CHECK(firings.size() == 3);

  // With a parked between labels the guard is false on entry, so the chain
  // stops after the first link even though the cascade moves a onto "p".
  view.joints["a"] = 5.0;
  auto stopped = trigger_propagate(spec, {action_event(press("btn"))}, view);
  CHECK(stopped.size() == 1);
}

TEST_CASE("no-op firings are skipped") {
  ApplianceSpec spec = load_spec(kChainJson, "chain");
  FakeView view(spec);
  // c already sits on "m": the last link has nothing to change.
  view.joints["c"] = 0.0;
  auto firings = trigger_propagate(spec, {action_event(press("btn"))}, view);
  CHECK(firings.size() == 2);
}

TEST_CASE("cyclic cascades hit the cap") {
  ApplianceSpec spec = load_spec(kOscillatorJson, "oscillator");
  FakeView view(spec);
  CHECK_THROWS_AS(trigger_propagate(spec, {action_event(press("btn"))}, view),
                  CascadeLimitExceeded);
}

TEST_CASE("handle_event is referentially transparent") {
  ApplianceSpec spec = fixtures::micro_spec();
  FakeView view(spec);
  view.joints["lever"] = 1.0;
  const PartSpec* lever = spec.part("lever");
  const MechanismConfig* spring = lever->mechanism(MechanismKind::InnerSpring);
  auto a = handle_event(*lever, *spring, tick_event(1), view);
  auto b = handle_event(*lever, *spring, tick_event(1), view);
  REQUIRE(a.size() == b.size());
  CHECK(a[0] == b[0]);
}
