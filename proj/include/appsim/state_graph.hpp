#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "appsim/actions.hpp"
#include "appsim/session.hpp"
#include "appsim/spec.hpp"
#include "appsim/view.hpp"
#include "json.hpp"

namespace appsim {

// Read-only view over a stored state, for evaluating predicates on graph
// nodes without rebuilding a session.
class StateView final : public SessionView {
 public:
  StateView(const ApplianceSpec& spec, const SessionState& state)
      : spec_(&spec), state_(&state) {}
  const ApplianceSpec& spec() const override { return *spec_; }
  double joint_value(const std::string& part) const override;
  std::string state_label(const std::string& part) const override;
  ParamValue parameter_value(const std::string& name) const override;

 private:
  const ApplianceSpec* spec_;
  const SessionState* state_;
};

// The canonical manipulation repertoire in the given state: one action per
// (part, reachable target position), parts in declaration order, targets in
// ascending position order. The most specific compatible kind is chosen
// (Open/Close over Flip over Rotate; Press on sprung buttons, Slide on bare
// sliders, Pull/Push for unlabeled prismatic ends), so semantically duplicate
// parallel edges never enter the state graph. Rotations target detents, or
// {lo, rest, hi} when the joint has none.
std::vector<AtomicAction> candidate_actions(const SessionView& view);

struct StateEdge {
  int from = 0;
  AtomicAction action;
  int to = 0;
};

struct StateGraph {
  std::vector<SessionState> nodes;  // node 0 = start state
  std::vector<std::string> keys;    // dynamics key per node
  std::vector<StateEdge> edges;     // BFS discovery order
  std::vector<std::vector<int>> out;  // edge indices per source node
  std::map<std::string, int> index;   // dynamics key -> node id
  int start = 0;
};

struct EnumerationLimits {
  int64_t max_nodes = 20000;
  int64_t max_ticks_per_edge = 64;  // spring settle budget inside one edge
};

// Exhaustive BFS over everything the canonical repertoire can reach. Time
// never elapses on an edge: countdowns and motors hold still, springs settle.
StateGraph enumerate_states(const ApplianceSpec& spec, const EnumerationLimits& limits = {});
StateGraph enumerate_states_from(const ApplianceSpec& spec, const SessionState& initial,
                                 const EnumerationLimits& limits = {});

nlohmann::ordered_json state_graph_to_json(const StateGraph& g);

}  // namespace appsim
