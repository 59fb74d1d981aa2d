#include <algorithm>
#include <set>
#include <string>

#include "appsim/errors.hpp"
#include "appsim/session.hpp"
#include "appsim/spec_io.hpp"
#include "appsim/state_graph.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace appsim;

namespace {

std::set<std::string> action_texts(const std::vector<AtomicAction>& actions) {
  std::set<std::string> out;
  for (const auto& a : actions) out.insert(format_action(a));
  return out;
}

std::set<std::string> edge_texts(const StateGraph& g) {
  std::set<std::string> out;
  for (const auto& e : g.edges) {
    out.insert(std::to_string(e.from) + " " + format_action(e.action) + " " +
               std::to_string(e.to));
  }
  return out;
}

const char* kKnobJson = R"JSON({
  "id": "knob_test", "category": "oven", "panel": {"width": 100, "height": 100},
  "parts": [
    {"name": "knob", "joint": {"kind": "revolute", "limits": [0, 72], "rest": 0,
     "detents": [0, 36, 72]},
     "panel_rect": [10, 10, 60, 60], "state_labels": {"0": "0", "36": "1", "72": "2"},
     "mechanisms": []}
  ],
  "parameters": [], "rules": [], "objects": []
})JSON";

}  // namespace

TEST_CASE("toggle appliance: two nodes, two flip edges") {
  ApplianceSpec spec = fixtures::toggle_spec();
  StateGraph g = enumerate_states(spec);
  CHECK(g.nodes.size() == 2);
  CHECK(g.edges.size() == 2);
  CHECK(g.start == 0);
  CHECK(edge_texts(g) ==
        std::set<std::string>{"0 Flip(switch, \"on\") 1", "1 Flip(switch, \"off\") 0"});

  // The illumination register rides along in the node states.
  CHECK(g.nodes[0].lights.at("lamp") == "off");
  CHECK(g.nodes[1].lights.at("lamp") == "on");
}

TEST_CASE("three-detent knob: three nodes, six rotate edges") {
  ApplianceSpec spec = load_spec(kKnobJson, "knob");
  StateGraph g = enumerate_states(spec);
  CHECK(g.nodes.size() == 3);
  CHECK(g.edges.size() == 6);
  for (const auto& e : g.edges) {
    CHECK(e.action.kind == ActionKind::Rotate);
    CHECK(e.from != e.to);
  }
  CHECK(edge_texts(g).count("0 Rotate(knob, \"2\", 72.0) 2") == 1);
  CHECK(edge_texts(g).count("2 Rotate(knob, \"0\", -72.0) 0") == 1);
}

TEST_CASE("candidate repertoire for the fresh microwave") {
  ApplianceSpec spec = fixtures::micro_spec();
  Session s(spec, 0);
  auto actions = candidate_actions(s);
  CHECK(actions.size() == 8);
  CHECK(action_texts(actions) == std::set<std::string>{
                                     "Open(door)",
                                     "Press(door_button, \"pressed\", 1)",
                                     "Press(start_button, \"pressed\", 1)",
                                     "Rotate(timer_knob, \"1\", 36.0)",
                                     "Rotate(timer_knob, \"2\", 72.0)",
                                     "Rotate(timer_knob, \"3\", 108.0)",
                                     "Touch(power_pad, 1)",
                                     "Press(lever, \"down\", 1)",
                                 });

  // After opening, the door offers Close instead of Open.
  REQUIRE(s.execute_action(parse_action("Open(door)")).ok);
  auto reopened = action_texts(candidate_actions(s));
  CHECK(reopened.count("Close(door)") == 1);
  CHECK(reopened.count("Open(door)") == 0);
}

TEST_CASE("microwave graph is finite, deterministic and anchored at start") {
  ApplianceSpec spec = fixtures::micro_spec();
  StateGraph g = enumerate_states(spec);

  CHECK(g.nodes.size() > 10);
  CHECK(g.nodes.size() < 60);
  CHECK(g.index.size() == g.nodes.size());
  for (const auto& e : g.edges) {
    CHECK(e.from >= 0);
    CHECK(e.from < static_cast<int>(g.nodes.size()));
    CHECK(e.to >= 0);
    CHECK(e.to < static_cast<int>(g.nodes.size()));
  }

  // Every non-start node enters via some edge (BFS discovery).
  std::set<int> entered{g.start};
  for (const auto& e : g.edges) entered.insert(e.to);
  CHECK(entered.size() == g.nodes.size());

  StateGraph again = enumerate_states(spec);
  CHECK(state_graph_to_json(again) == state_graph_to_json(g));

  // Spot checks: pressing the door button and opening the door land in the
  // same successor; an idle start press changes nothing durable.
  int via_button = -1, via_open = -1, via_start = -1;
  for (int edge : g.out[g.start]) {
    const StateEdge& e = g.edges[edge];
    std::string text = format_action(e.action);
    if (text == "Press(door_button, \"pressed\", 1)") via_button = e.to;
    if (text == "Open(door)") via_open = e.to;
    if (text == "Press(start_button, \"pressed\", 1)") via_start = e.to;
  }
  CHECK(via_button == via_open);
  CHECK(via_button != -1);
  CHECK(via_start == g.start);
}

TEST_CASE("node budget is enforced") {
  ApplianceSpec spec = fixtures::micro_spec();
  EnumerationLimits limits;
  limits.max_nodes = 3;
  CHECK_THROWS_AS(enumerate_states(spec, limits), StateSpaceExceeded);
}

TEST_CASE("enumeration can start anywhere") {
  ApplianceSpec spec = fixtures::micro_spec();
  Session s(spec, 0);
  REQUIRE(s.execute_action(parse_action("Rotate(timer_knob, \"2\", 72.0)")).ok);
  StateGraph g = enumerate_states_from(spec, s.snapshot());
  CHECK(g.keys[g.start] == dynamics_key(s.snapshot()));
  // Same closed world regardless of entry point.
  StateGraph full = enumerate_states(spec);
  CHECK(g.nodes.size() == full.nodes.size());
}
