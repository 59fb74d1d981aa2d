#include "appsim/validate.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "appsim/errors.hpp"

namespace appsim {

const char* to_string(Finding::Severity s) {
  return s == Finding::Severity::Error ? "error" : "warning";
}

namespace {

struct TriggerNode {
  std::string host;
  const TriggerConfig* cfg;
};

// Label the trigger drives its target part into, when determinable.
std::optional<std::string> effect_label(const ApplianceSpec& spec, const TriggerConfig& t) {
  const PartSpec* target = spec.part(t.target);
  if (!target) return std::nullopt;
  if (const auto* s = std::get_if<std::string>(&t.effect.value)) return *s;
  if (auto num = numeric_value(t.effect.value)) return target->label_at(*num);
  return std::nullopt;
}

}  // namespace

ValidationReport validate_spec(const ApplianceSpec& spec, const EnumerationLimits& limits) {
  ValidationReport report;
  auto add = [&](Finding::Severity sev, std::string code, std::string path, std::string message) {
    report.findings.push_back({sev, std::move(code), std::move(path), std::move(message)});
  };

  const auto& known = known_categories();
  if (std::find(known.begin(), known.end(), spec.category) == known.end()) {
    add(Finding::Severity::Warning, "unknown_category", "category",
        "category '" + spec.category + "' is not a known appliance category");
  }

  // Trigger cycle check. Edge i -> j when trigger i drives the state that
  // trigger j listens for. Guards are ignored, so a cycle is flagged even
  // when guards would break it at run time.
  std::vector<TriggerNode> nodes;
  for (const auto& part : spec.parts) {
    for (const auto& mech : part.mechanisms) {
      if (mech.kind != MechanismKind::MechanicalTrigger) continue;
      nodes.push_back({part.name, &mech.as<TriggerConfig>()});
    }
  }
  const int n = static_cast<int>(nodes.size());
  std::vector<std::vector<int>> out_edges(n);
  for (int i = 0; i < n; ++i) {
    auto label = effect_label(spec, *nodes[i].cfg);
    if (!label) continue;
    for (int j = 0; j < n; ++j) {
      const EventPattern& on = nodes[j].cfg->on;
      if (on.kind != EventPattern::Kind::StateEntered) continue;
      if (on.part == nodes[i].cfg->target && on.state == *label) out_edges[i].push_back(j);
    }
  }
  std::vector<int> color(n, 0);  // 0 new, 1 on stack, 2 done
  std::vector<int> path;
  bool cycle_found = false;
  auto dfs = [&](auto&& self, int v) -> bool {
    color[v] = 1;
    path.push_back(v);
    for (int w : out_edges[v]) {
      if (color[w] == 2) continue;
      if (color[w] == 1) {
        auto it = std::find(path.begin(), path.end(), w);
        std::string names;
        for (; it != path.end(); ++it) {
          if (!names.empty()) names += " -> ";
          names += nodes[*it].host;
        }
        names += " -> " + nodes[w].host;
        add(Finding::Severity::Error, "trigger_cycle", "parts",
            "mechanical triggers form a cycle: " + names);
        return true;
      }
      if (self(self, w)) return true;
    }
    path.pop_back();
    color[v] = 2;
    return false;
  };
  for (int v = 0; v < n && !cycle_found; ++v) {
    if (color[v] == 0) cycle_found = dfs(dfs, v);
  }

  // The dynamic checks walk every reachable state. A trigger cycle would trip
  // the cascade cap on the way, so skip them once one has been reported.
  if (!cycle_found) {
    try {
      enumerate_states(spec, limits);
    } catch (const RuleOscillation& e) {
      add(Finding::Severity::Error, "rule_oscillation", "rules", e.what());
    } catch (const CascadeLimitExceeded& e) {
      add(Finding::Severity::Error, "trigger_cascade_overflow", "parts", e.what());
    } catch (const StateSpaceExceeded& e) {
      add(Finding::Severity::Warning, "state_space_exceeded", "",
          std::string(e.what()) + "; dynamic checks cover only the explored region");
    }
  }

  return report;
}

nlohmann::ordered_json validation_report_to_json(const ValidationReport& report) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& f : report.findings) {
    arr.push_back({{"severity", to_string(f.severity)},
                   {"code", f.code},
                   {"path", f.path},
                   {"message", f.message}});
  }
  return nlohmann::ordered_json{{"ok", report.ok()}, {"findings", arr}};
}

}  // namespace appsim
