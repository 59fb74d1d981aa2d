#include "appsim/episode.hpp"

#include <set>

#include "appsim/errors.hpp"
#include "appsim/spec_io.hpp"

namespace appsim {

namespace {

const nlohmann::json& field(const nlohmann::json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw SpecError(SpecError::Code::MissingField, std::string("missing '") + key + "'", where);
  }
  return *it;
}

std::string string_field(const nlohmann::json& j, const char* key, const std::string& where) {
  const auto& v = field(j, key, where);
  if (!v.is_string()) {
    throw SpecError(SpecError::Code::BadType, std::string("'") + key + "' must be a string",
                    where);
  }
  return v.get<std::string>();
}

}  // namespace

Episode episode_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_object()) throw SpecError(SpecError::Code::BadType, "episode must be an object", where);
  static const std::set<std::string> kKeys = {
      "id",            "appliance",      "instruction", "initial_state",    "goal",
      "gt_plan",       "perturbations",  "relevant_pages", "grounding_queries"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!kKeys.count(key)) {
      throw SpecError(SpecError::Code::UnknownField, "unknown field '" + key + "'", where);
    }
  }

  Episode e;
  e.id = string_field(j, "id", where);
  e.appliance = string_field(j, "appliance", where);
  e.instruction = string_field(j, "instruction", where);
  e.initial_state = session_state_from_json(field(j, "initial_state", where), where);
  e.goal = predicate_from_json(field(j, "goal", where), where + ".goal");

  const auto& plan = field(j, "gt_plan", where);
  if (!plan.is_array()) {
    throw SpecError(SpecError::Code::BadType, "'gt_plan' must be an array of action lines", where);
  }
  for (const auto& line : plan) {
    if (!line.is_string()) {
      throw SpecError(SpecError::Code::BadType, "'gt_plan' entries must be strings", where);
    }
    try {
      e.gt_plan.steps.push_back(parse_action(line.get<std::string>()));
    } catch (const ActionParseError& err) {
      throw SpecError(SpecError::Code::BadValue,
                      "gt_plan line '" + line.get<std::string>() + "': " + err.what(), where);
    }
  }

  const auto& perts = field(j, "perturbations", where);
  if (!perts.is_array()) {
    throw SpecError(SpecError::Code::BadType, "'perturbations' must be an array", where);
  }
  for (const auto& p : perts) {
    e.perturbations.push_back(perturbation_from_json(p, where + ".perturbations"));
  }

  const auto& pages = field(j, "relevant_pages", where);
  if (!pages.is_object()) {
    throw SpecError(SpecError::Code::BadType, "'relevant_pages' must map category to pages",
                    where);
  }
  for (const auto& [category, list] : pages.items()) {
    if (!list.is_array()) {
      throw SpecError(SpecError::Code::BadType, "relevant_pages." + category + " must be an array",
                      where);
    }
    std::vector<int> indices;
    for (const auto& idx : list) {
      if (!idx.is_number_integer()) {
        throw SpecError(SpecError::Code::BadType,
                        "relevant_pages." + category + " entries must be integers", where);
      }
      indices.push_back(idx.get<int>());
    }
    e.relevant_pages[category] = std::move(indices);
  }

  const auto& queries = field(j, "grounding_queries", where);
  if (!queries.is_array()) {
    throw SpecError(SpecError::Code::BadType, "'grounding_queries' must be an array", where);
  }
  for (const auto& q : queries) {
    if (!q.is_string()) {
      throw SpecError(SpecError::Code::BadType, "'grounding_queries' entries must be strings",
                      where);
    }
    e.grounding_queries.push_back(q.get<std::string>());
  }

  return e;
}

nlohmann::ordered_json episode_to_json(const Episode& e) {
  nlohmann::ordered_json plan = nlohmann::ordered_json::array();
  for (const auto& step : e.gt_plan.steps) plan.push_back(format_action(step));

  nlohmann::ordered_json perts = nlohmann::ordered_json::array();
  for (const auto& p : e.perturbations) perts.push_back(perturbation_to_json(p));

  nlohmann::ordered_json pages = nlohmann::ordered_json::object();
  for (const auto& [category, indices] : e.relevant_pages) pages[category] = indices;

  return nlohmann::ordered_json{{"id", e.id},
                                {"appliance", e.appliance},
                                {"instruction", e.instruction},
                                {"initial_state", session_state_to_json(e.initial_state)},
                                {"goal", predicate_to_json(e.goal)},
                                {"gt_plan", plan},
                                {"perturbations", perts},
                                {"relevant_pages", pages},
                                {"grounding_queries", e.grounding_queries}};
}

std::string episode_filename(const Episode& e) { return e.id + ".episode.json"; }

std::vector<std::string> check_episode(const Episode& e, const ApplianceSpec& spec,
                                       int manual_page_count) {
  std::vector<std::string> problems;
  if (e.appliance != spec.id) {
    problems.push_back("episode appliance '" + e.appliance + "' is not spec '" + spec.id + "'");
  }
  try {
    check_predicate_against_spec(spec, e.goal, e.id + ".goal");
  } catch (const SpecError& err) {
    problems.push_back(err.what());
  }
  if (e.gt_plan.steps.empty()) problems.push_back("gt_plan is empty");
  for (const auto& p : e.perturbations) {
    if (p.at_step < 0 || p.at_step >= static_cast<int64_t>(e.gt_plan.steps.size())) {
      problems.push_back("perturbation at_step " + std::to_string(p.at_step) +
                         " outside plan of length " + std::to_string(e.gt_plan.steps.size()));
    }
    for (const auto& change : p.changes) {
      try {
        check_effect_against_spec(spec, change, e.id + ".perturbations");
      } catch (const SpecError& err) {
        problems.push_back(err.what());
      }
    }
  }
  for (const auto& q : e.grounding_queries) {
    if (!spec.part(q)) problems.push_back("grounding query '" + q + "' is not a part");
  }
  for (const auto& [category, indices] : e.relevant_pages) {
    for (int idx : indices) {
      if (idx < 1 || idx > manual_page_count) {
        problems.push_back("relevant page " + std::to_string(idx) + " for '" + category +
                           "' outside manual of " + std::to_string(manual_page_count) + " pages");
      }
    }
  }
  return problems;
}

}  // namespace appsim
