#include "appsim/view.hpp"

namespace appsim {

bool eval_comparison(const Comparison& c, const SessionView& view) {
  ParamValue actual = c.subject == Comparison::Subject::Parameter
                          ? view.parameter_value(c.name)
                          : ParamValue(view.state_label(c.name));
  switch (c.op) {
    case CompareOp::Eq:
      return param_value_equal(actual, c.value);
    case CompareOp::Ne:
      return !param_value_equal(actual, c.value);
    default:
      break;
  }
  auto lhs = numeric_value(actual);
  auto rhs = numeric_value(c.value);
  if (!lhs || !rhs) return false;
  switch (c.op) {
    case CompareOp::Lt: return *lhs < *rhs;
    case CompareOp::Le: return *lhs <= *rhs;
    case CompareOp::Gt: return *lhs > *rhs;
    case CompareOp::Ge: return *lhs >= *rhs;
    default: return false;
  }
}

bool eval_predicate(const Predicate& p, const SessionView& view) {
  for (const auto& c : p) {
    if (!eval_comparison(c, view)) return false;
  }
  return true;
}

bool latch_engaged(const SettingParameter& param, const ParamValue& value) {
  if (auto n = numeric_value(value)) return *n != 0.0;
  if (std::holds_alternative<LabelSet>(param.domain)) {
    const auto& labels = std::get<LabelSet>(param.domain).labels;
    return !labels.empty() && std::get<std::string>(value) != labels.front();
  }
  return false;
}

}  // namespace appsim
