#pragma once

#include <string>
#include <vector>

#include "appsim/spec.hpp"
#include "appsim/state_graph.hpp"
#include "json.hpp"

namespace appsim {

struct Finding {
  enum class Severity { Error, Warning };
  Severity severity = Severity::Error;
  std::string code;  // stable machine-readable tag
  std::string path;  // spec location, dotted
  std::string message;
};

const char* to_string(Finding::Severity s);

struct ValidationReport {
  std::vector<Finding> findings;

  bool ok() const {
    for (const auto& f : findings) {
      if (f.severity == Finding::Severity::Error) return false;
    }
    return true;
  }
};

// Checks beyond what loading already enforces: the mechanical trigger graph
// must be acyclic (ignoring guards), the rule fixpoint must terminate on
// every reachable state, and the category should be a known one. Dynamic
// checks walk the full state graph, so a clean report certifies the whole
// reachable space.
ValidationReport validate_spec(const ApplianceSpec& spec, const EnumerationLimits& limits = {});

nlohmann::ordered_json validation_report_to_json(const ValidationReport& report);

}  // namespace appsim
