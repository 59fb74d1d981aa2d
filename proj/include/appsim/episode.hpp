#pragma once

#include <map>
#include <string>
#include <vector>

#include "appsim/actions.hpp"
#include "appsim/session.hpp"
#include "appsim/spec.hpp"
#include "appsim/value.hpp"
#include "json.hpp"

namespace appsim {

// One benchmark task: drive the named appliance from initial_state until the
// goal predicate holds, following gt_plan, with scripted perturbations
// injected at fixed plan steps.
struct Episode {
  std::string id;
  std::string appliance;  // spec id
  std::string instruction;
  SessionState initial_state;
  Predicate goal;
  Plan gt_plan;
  std::vector<Perturbation> perturbations;
  std::map<std::string, std::vector<int>> relevant_pages;  // manual category -> page indices
  std::vector<std::string> grounding_queries;              // part names
};

Episode episode_from_json(const nlohmann::json& j, const std::string& where);
nlohmann::ordered_json episode_to_json(const Episode& e);

// <id>.episode.json
std::string episode_filename(const Episode& e);

// Structural complaints, empty when sound: goal and queries resolve against
// the spec, perturbation steps fall inside the plan, page indices inside the
// manual.
std::vector<std::string> check_episode(const Episode& e, const ApplianceSpec& spec,
                                       int manual_page_count);

}  // namespace appsim
