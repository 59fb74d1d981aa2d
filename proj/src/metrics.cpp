#include "appsim/metrics.hpp"

#include <algorithm>
#include <set>

#include "appsim/errors.hpp"

namespace appsim {

RetrievalMetrics eval_page_retrieval(const std::vector<int>& predicted,
                                     const std::vector<int>& truth, int page_count) {
  auto as_set = [page_count](const std::vector<int>& pages, const char* which) {
    std::set<int> out;
    for (int p : pages) {
      if (p < 1 || p > page_count) {
        throw PageOutOfRange(std::string(which) + " page " + std::to_string(p) +
                             " outside 1.." + std::to_string(page_count));
      }
      out.insert(p);
    }
    return out;
  };
  const std::set<int> pred = as_set(predicted, "predicted");
  const std::set<int> gt = as_set(truth, "truth");

  std::set<int> hit;
  std::set_intersection(pred.begin(), pred.end(), gt.begin(), gt.end(),
                        std::inserter(hit, hit.begin()));

  RetrievalMetrics m;
  m.precision = pred.empty() ? (gt.empty() ? 1.0 : 0.0)
                             : static_cast<double>(hit.size()) / static_cast<double>(pred.size());
  m.recall = gt.empty() ? 1.0 : static_cast<double>(hit.size()) / static_cast<double>(gt.size());
  m.f1 = (m.precision + m.recall) > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                                        : 0.0;
  return m;
}

OpenLoopMetrics eval_open_loop(const Plan& pred, const Plan& gt) {
  OpenLoopMetrics m;
  if (gt.steps.empty()) return m;
  size_t prefix = 0;
  while (prefix < pred.steps.size() && prefix < gt.steps.size() &&
         action_equal(pred.steps[prefix], gt.steps[prefix])) {
    ++prefix;
  }
  m.completion_rate = static_cast<double>(prefix) / static_cast<double>(gt.steps.size());
  m.success = pred.steps.size() == gt.steps.size() && prefix == gt.steps.size();
  return m;
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  if (a.width() < 0.0 || a.height() < 0.0 || b.width() < 0.0 || b.height() < 0.0) {
    throw DegenerateBox("box with negative extent");
  }
  const double ix = std::max(0.0, std::min(a.x2, b.x2) - std::max(a.x1, b.x1));
  const double iy = std::max(0.0, std::min(a.y2, b.y2) - std::max(a.y1, b.y1));
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

double map50(const std::vector<double>& ious) {
  if (ious.empty()) return 0.0;
  int hits = 0;
  for (double v : ious) {
    if (v >= 0.5) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(ious.size());
}

GroundingMetrics eval_grounding(const std::vector<double>& ious) {
  GroundingMetrics m;
  m.per_query = ious;
  if (ious.empty()) return m;
  double sum = 0.0;
  for (double v : ious) sum += v;
  m.mean_iou = sum / static_cast<double>(ious.size());
  m.map50 = map50(ious);
  return m;
}

}  // namespace appsim
