#include "appsim/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "appsim/errors.hpp"

namespace appsim {

namespace {

std::vector<std::pair<std::string, double>> metric_values(const TaskReport& r) {
  switch (r.task) {
    case 1:
      return {{"precision", r.retrieval.precision},
              {"recall", r.retrieval.recall},
              {"f1", r.retrieval.f1}};
    case 2:
      return {{"completion_rate", r.open_loop.completion_rate},
              {"success_rate", r.open_loop.success ? 1.0 : 0.0}};
    case 3:
      return {{"mean_iou", r.grounding.mean_iou}, {"map50", r.grounding.map50}};
    case 4:
      return {{"stepwise_success_rate", r.closed_loop.stepwise_success_rate}};
    case 5:
      return {{"completion_rate", r.full_process.completion_rate},
              {"success_rate", r.full_process.success ? 1.0 : 0.0}};
    default:
      return {};
  }
}

SummaryRow mean_row(const std::string& category, const std::vector<const TaskReport*>& group) {
  SummaryRow row;
  row.category = category;
  row.episodes = static_cast<int>(group.size());
  auto columns = metric_values(*group.front());
  for (auto& [name, value] : columns) value = 0.0;
  for (const TaskReport* r : group) {
    const auto values = metric_values(*r);
    for (size_t i = 0; i < columns.size(); ++i) columns[i].second += values[i].second;
    row.planner_failures += r->planner_failures;
    row.transport_failures += r->transport_failures;
  }
  for (auto& [name, value] : columns) value /= static_cast<double>(group.size());
  row.metrics = std::move(columns);
  return row;
}

}  // namespace

Summary aggregate_reports(const std::vector<TaskReport>& reports) {
  if (reports.empty()) throw MixedTask("nothing to aggregate");
  const int task = reports.front().task;
  for (const auto& r : reports) {
    if (r.task != task) {
      throw MixedTask("cannot aggregate task " + std::to_string(r.task) + " with task " +
                      std::to_string(task));
    }
  }

  std::map<std::string, std::vector<const TaskReport*>> by_category;
  std::vector<const TaskReport*> all;
  for (const auto& r : reports) {
    by_category[r.category].push_back(&r);
    all.push_back(&r);
  }

  Summary s;
  s.task = task;
  for (const auto& [category, group] : by_category) {
    s.per_category.push_back(mean_row(category, group));
  }
  s.overall = mean_row("overall", all);
  return s;
}

nlohmann::ordered_json summary_to_json(const Summary& s) {
  auto row_json = [](const SummaryRow& row) {
    nlohmann::ordered_json metrics;
    for (const auto& [name, value] : row.metrics) metrics[name] = value;
    return nlohmann::ordered_json{{"category", row.category},
                                  {"episodes", row.episodes},
                                  {"metrics", metrics},
                                  {"planner_failures", row.planner_failures},
                                  {"transport_failures", row.transport_failures}};
  };
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : s.per_category) rows.push_back(row_json(row));
  return nlohmann::ordered_json{{"task", s.task},
                                {"task_name", task_name(s.task)},
                                {"per_category", rows},
                                {"overall", row_json(s.overall)}};
}

std::string summary_to_text(const Summary& s) {
  std::vector<std::string> headers = {"category", "episodes"};
  for (const auto& [name, value] : s.overall.metrics) headers.push_back(name);
  headers.push_back("planner_failures");

  auto format_row = [&](const SummaryRow& row) {
    std::vector<std::string> cells = {row.category, std::to_string(row.episodes)};
    for (const auto& [name, value] : row.metrics) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.4f", value);
      cells.emplace_back(buf);
    }
    cells.push_back(std::to_string(row.planner_failures));
    return cells;
  };

  std::vector<std::vector<std::string>> rows;
  for (const auto& row : s.per_category) rows.push_back(format_row(row));
  rows.push_back(format_row(s.overall));

  std::vector<size_t> widths(headers.size());
  for (size_t c = 0; c < headers.size(); ++c) widths[c] = headers[c].size();
  for (const auto& row : rows) {
    for (size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());
  }

  auto emit = [&](const std::vector<std::string>& cells) {
    std::string line;
    for (size_t c = 0; c < cells.size(); ++c) {
      if (c) line += "  ";
      // category left-aligned, numbers right-aligned
      if (c == 0) {
        line += cells[c] + std::string(widths[c] - cells[c].size(), ' ');
      } else {
        line += std::string(widths[c] - cells[c].size(), ' ') + cells[c];
      }
    }
    return line + "\n";
  };

  std::string out = "task " + std::to_string(s.task) + " (" + task_name(s.task) + ")\n";
  out += emit(headers);
  for (const auto& row : rows) out += emit(row);
  return out;
}

}  // namespace appsim
