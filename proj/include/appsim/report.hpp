#pragma once

#include <string>
#include <utility>
#include <vector>

#include "appsim/runner.hpp"
#include "json.hpp"

namespace appsim {

struct SummaryRow {
  std::string category;
  int episodes = 0;
  // Column order is fixed per task, so rows align in the text table.
  std::vector<std::pair<std::string, double>> metrics;
  int planner_failures = 0;
  int transport_failures = 0;
};

struct Summary {
  int task = 0;
  std::vector<SummaryRow> per_category;  // sorted by category name
  SummaryRow overall;
};

// Per-category and overall means of one task's reports. Mixing tasks or
// passing nothing is MixedTask.
Summary aggregate_reports(const std::vector<TaskReport>& reports);

nlohmann::ordered_json summary_to_json(const Summary& s);

// Aligned fixed-point table, one row per category plus overall.
std::string summary_to_text(const Summary& s);

}  // namespace appsim
