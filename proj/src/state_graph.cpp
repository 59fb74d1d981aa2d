#include "appsim/state_graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "appsim/errors.hpp"

namespace appsim {

double StateView::joint_value(const std::string& part) const {
  auto it = state_->joints.find(part);
  return it == state_->joints.end() ? 0.0 : it->second;
}

std::string StateView::state_label(const std::string& part) const {
  const PartSpec* p = spec_->part(part);
  if (!p || !p->joint.movable()) return "";
  auto label = p->label_at(joint_value(part));
  return label ? *label : "";
}

ParamValue StateView::parameter_value(const std::string& name) const {
  auto it = state_->parameters.find(name);
  return it == state_->parameters.end() ? ParamValue(int64_t{0}) : it->second;
}

namespace {

constexpr double kPosEps = 1e-9;

void push_unique(std::vector<double>& positions, double v) {
  for (double p : positions) {
    if (std::abs(p - v) <= kPosEps) return;
  }
  positions.push_back(v);
}

bool has_open_close(const PartSpec& part) {
  return part.position_of("open").has_value() && part.position_of("closed").has_value();
}

}  // namespace

std::vector<AtomicAction> candidate_actions(const SessionView& view) {
  const ApplianceSpec& spec = view.spec();
  std::vector<AtomicAction> actions;

  for (const auto& part : spec.parts) {
    if (!part.joint.movable()) {
      if (part.mechanism(MechanismKind::TouchSensing)) {
        AtomicAction a;
        a.kind = ActionKind::Touch;
        a.part = part.name;
        a.times = 1;
        actions.push_back(a);
      }
      continue;
    }

    // Rotation stops: detents, or the quantized {lo, rest, hi} set.
    std::vector<double> stops;
    if (!part.joint.detents.empty()) {
      stops = part.joint.detents;
    } else {
      push_unique(stops, part.joint.lo);
      push_unique(stops, part.joint.rest);
      push_unique(stops, part.joint.hi);
    }

    std::vector<double> targets = stops;
    for (const auto& [pos, label] : part.state_labels) {
      (void)label;
      push_unique(targets, pos);
    }
    std::sort(targets.begin(), targets.end());

    double current = view.joint_value(part.name);
    bool open_close = has_open_close(part);
    bool sprung = part.mechanism(MechanismKind::InnerSpring) != nullptr;

    for (double target : targets) {
      if (std::abs(target - current) <= kPosEps) continue;
      auto label = part.label_at(target);

      AtomicAction a;
      a.part = part.name;
      if (label && open_close && (*label == "open" || *label == "closed")) {
        a.kind = *label == "open" ? ActionKind::Open : ActionKind::Close;
      } else if (part.joint.kind == JointKind::Revolute) {
        if (!label) continue;  // unreachable by the action grammar
        if (part.state_labels.size() == 2) {
          a.kind = ActionKind::Flip;
          a.target_state = *label;
        } else {
          bool on_stop = false;
          for (double s : stops) on_stop = on_stop || std::abs(s - target) <= kPosEps;
          if (!on_stop) continue;
          a.kind = ActionKind::Rotate;
          a.target_state = *label;
          a.degrees = target - current;
        }
      } else {  // prismatic
        if (label) {
          a.kind = sprung ? ActionKind::Press : ActionKind::Slide;
          a.target_state = *label;
          if (a.kind == ActionKind::Press) a.times = 1;
        } else if (std::abs(target - part.joint.hi) <= kPosEps) {
          a.kind = ActionKind::Pull;
        } else if (std::abs(target - part.joint.lo) <= kPosEps) {
          a.kind = ActionKind::Push;
        } else {
          continue;
        }
      }
      actions.push_back(a);
    }
  }
  return actions;
}

StateGraph enumerate_states_from(const ApplianceSpec& spec, const SessionState& initial,
                                 const EnumerationLimits& limits) {
  StateGraph g;
  auto add_node = [&](const SessionState& state, const std::string& key) {
    if (static_cast<int64_t>(g.nodes.size()) >= limits.max_nodes) {
      throw StateSpaceExceeded("state space exceeds " + std::to_string(limits.max_nodes) +
                               " nodes for spec '" + spec.id + "'");
    }
    int id = static_cast<int>(g.nodes.size());
    g.nodes.push_back(state);
    g.keys.push_back(key);
    g.out.emplace_back();
    g.index.emplace(key, id);
    return id;
  };

  Session start = Session::restore(spec, initial);
  start.set_settle_budget(limits.max_ticks_per_edge);
  g.start = add_node(start.snapshot(), dynamics_key(start.snapshot()));

  std::deque<int> frontier{g.start};
  while (!frontier.empty()) {
    int node = frontier.front();
    frontier.pop_front();

    for (const auto& action : candidate_actions(StateView(spec, g.nodes[node]))) {
      Session s = Session::restore(spec, g.nodes[node]);
      s.set_settle_budget(limits.max_ticks_per_edge);
      ActionOutcome out = s.execute_action(action);
      if (!out.ok) continue;

      std::string key = dynamics_key(s.snapshot());
      auto it = g.index.find(key);
      int to;
      if (it == g.index.end()) {
        to = add_node(s.snapshot(), key);
        frontier.push_back(to);
      } else {
        to = it->second;
      }
      g.out[node].push_back(static_cast<int>(g.edges.size()));
      g.edges.push_back(StateEdge{node, action, to});
    }
  }
  return g;
}

StateGraph enumerate_states(const ApplianceSpec& spec, const EnumerationLimits& limits) {
  Session fresh(spec, 0);
  return enumerate_states_from(spec, fresh.snapshot(), limits);
}

nlohmann::ordered_json state_graph_to_json(const StateGraph& g) {
  nlohmann::ordered_json j;
  j["start"] = g.start;
  nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
  for (const auto& n : g.nodes) nodes.push_back(session_state_to_json(n));
  j["nodes"] = nodes;
  nlohmann::ordered_json edges = nlohmann::ordered_json::array();
  for (const auto& e : g.edges) {
    edges.push_back({{"from", e.from}, {"action", format_action(e.action)}, {"to", e.to}});
  }
  j["edges"] = edges;
  return j;
}

}  // namespace appsim
