#pragma once

#include <string>
#include <vector>

#include "appsim/actions.hpp"
#include "appsim/spec.hpp"

namespace appsim {

struct RetrievalMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Set semantics: duplicates in either list collapse. An empty prediction has
// precision 1 against an empty truth and 0 otherwise; an empty truth has
// recall 1.
RetrievalMetrics eval_page_retrieval(const std::vector<int>& predicted,
                                     const std::vector<int>& truth, int page_count);

struct OpenLoopMetrics {
  double completion_rate = 0.0;
  bool success = false;
};

// completion = longest matching prefix / len(gt); success needs the whole
// plan correct with nothing extra.
OpenLoopMetrics eval_open_loop(const Plan& pred, const Plan& gt);

// Intersection over union; 0 for disjoint boxes. Inverted or negative-area
// boxes are DegenerateBox.
double iou(const BoundingBox& a, const BoundingBox& b);

// Fraction of queries whose IoU clears 0.5: the single-prediction reduction
// of average precision at that threshold.
double map50(const std::vector<double>& ious);

struct GroundingMetrics {
  std::vector<double> per_query;
  double mean_iou = 0.0;
  double map50 = 0.0;
};

GroundingMetrics eval_grounding(const std::vector<double>& ious);

struct ClosedLoopMetrics {
  int queries = 0;
  int successes = 0;
  double stepwise_success_rate = 0.0;
};

struct FullProcessMetrics {
  double completion_rate = 0.0;
  bool success = false;
  std::vector<std::string> failure_stages;  // planning | grounding | execution
};

}  // namespace appsim
