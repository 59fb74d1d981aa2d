#pragma once

#include <vector>

#include "appsim/actions.hpp"
#include "appsim/session.hpp"
#include "appsim/spec.hpp"
#include "appsim/state_graph.hpp"
#include "appsim/value.hpp"

namespace appsim {

bool goal_satisfied(const ApplianceSpec& spec, const SessionState& state, const Predicate& goal);

// Total order used to break ties among equally short plans: action kind in
// vocabulary order, then part declaration order, then counts, degrees and
// remaining strings.
bool canonical_action_less(const ApplianceSpec& spec, const AtomicAction& a,
                           const AtomicAction& b);

// Shortest plan to a goal-satisfying state by BFS over the canonical
// repertoire; ties resolved edge by edge via canonical_action_less, so the
// result is deterministic. Empty plan when the goal already holds.
Plan oracle_plan(const ApplianceSpec& spec, const SessionState& initial, const Predicate& goal,
                 const EnumerationLimits& limits = {});

// First actions of every minimal plan, deduplicated, canonically ordered.
// Empty when the goal already holds.
std::vector<AtomicAction> oracle_first_actions(const ApplianceSpec& spec,
                                               const SessionState& initial, const Predicate& goal,
                                               const EnumerationLimits& limits = {});

}  // namespace appsim
