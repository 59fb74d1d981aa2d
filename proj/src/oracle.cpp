#include "appsim/oracle.hpp"

#include <algorithm>
#include <deque>
#include <limits>

#include "appsim/errors.hpp"

namespace appsim {

bool goal_satisfied(const ApplianceSpec& spec, const SessionState& state, const Predicate& goal) {
  StateView view(spec, state);
  return eval_predicate(goal, view);
}

bool canonical_action_less(const ApplianceSpec& spec, const AtomicAction& a,
                           const AtomicAction& b) {
  if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
  const int pa = spec.part_index(a.part);
  const int pb = spec.part_index(b.part);
  if (pa != pb) return pa < pb;
  if (a.times != b.times) return a.times < b.times;
  if (a.degrees != b.degrees) return a.degrees < b.degrees;
  if (a.target_state != b.target_state) return a.target_state < b.target_state;
  if (a.object != b.object) return a.object < b.object;
  if (a.start_pos != b.start_pos) return a.start_pos < b.start_pos;
  return a.end_pos < b.end_pos;
}

namespace {

constexpr int kInf = std::numeric_limits<int>::max();

// Distance from every node to its nearest goal node, by BFS over reversed
// edges from all goal nodes at once.
std::vector<int> goal_distances(const ApplianceSpec& spec, const StateGraph& g,
                                const Predicate& goal) {
  std::vector<std::vector<int>> incoming(g.nodes.size());
  for (size_t ei = 0; ei < g.edges.size(); ++ei) {
    incoming[static_cast<size_t>(g.edges[ei].to)].push_back(static_cast<int>(ei));
  }
  std::vector<int> dist(g.nodes.size(), kInf);
  std::deque<int> frontier;
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    StateView view(spec, g.nodes[i]);
    if (eval_predicate(goal, view)) {
      dist[i] = 0;
      frontier.push_back(static_cast<int>(i));
    }
  }
  while (!frontier.empty()) {
    const int v = frontier.front();
    frontier.pop_front();
    for (int ei : incoming[static_cast<size_t>(v)]) {
      const int u = g.edges[static_cast<size_t>(ei)].from;
      if (dist[static_cast<size_t>(u)] == kInf) {
        dist[static_cast<size_t>(u)] = dist[static_cast<size_t>(v)] + 1;
        frontier.push_back(u);
      }
    }
  }
  return dist;
}

}  // namespace

Plan oracle_plan(const ApplianceSpec& spec, const SessionState& initial, const Predicate& goal,
                 const EnumerationLimits& limits) {
  Plan plan;
  if (goal_satisfied(spec, initial, goal)) return plan;
  const StateGraph g = enumerate_states_from(spec, initial, limits);
  const auto dist = goal_distances(spec, g, goal);
  if (dist[static_cast<size_t>(g.start)] == kInf) {
    throw UnreachableGoal("no reachable state satisfies the goal");
  }
  int cur = g.start;
  while (dist[static_cast<size_t>(cur)] > 0) {
    const StateEdge* best = nullptr;
    for (int ei : g.out[static_cast<size_t>(cur)]) {
      const StateEdge& e = g.edges[static_cast<size_t>(ei)];
      if (dist[static_cast<size_t>(e.to)] != dist[static_cast<size_t>(cur)] - 1) continue;
      if (!best || canonical_action_less(spec, e.action, best->action)) best = &e;
    }
    plan.steps.push_back(best->action);
    cur = best->to;
  }
  return plan;
}

std::vector<AtomicAction> oracle_first_actions(const ApplianceSpec& spec,
                                               const SessionState& initial, const Predicate& goal,
                                               const EnumerationLimits& limits) {
  std::vector<AtomicAction> out;
  if (goal_satisfied(spec, initial, goal)) return out;
  const StateGraph g = enumerate_states_from(spec, initial, limits);
  const auto dist = goal_distances(spec, g, goal);
  if (dist[static_cast<size_t>(g.start)] == kInf) {
    throw UnreachableGoal("no reachable state satisfies the goal");
  }
  for (int ei : g.out[static_cast<size_t>(g.start)]) {
    const StateEdge& e = g.edges[static_cast<size_t>(ei)];
    if (dist[static_cast<size_t>(e.to)] == dist[static_cast<size_t>(g.start)] - 1) {
      out.push_back(e.action);
    }
  }
  std::sort(out.begin(), out.end(), [&spec](const AtomicAction& a, const AtomicAction& b) {
    return canonical_action_less(spec, a, b);
  });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const AtomicAction& a, const AtomicAction& b) {
                          return action_equal(a, b);
                        }),
            out.end());
  return out;
}

}  // namespace appsim
