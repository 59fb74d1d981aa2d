#pragma once

#include <string>

#include "appsim/spec.hpp"
#include "appsim/value.hpp"

namespace appsim {

// Read-only window onto live session state, the only thing mechanism policies
// and predicates may consult.
class SessionView {
 public:
  virtual ~SessionView() = default;
  virtual const ApplianceSpec& spec() const = 0;
  virtual double joint_value(const std::string& part) const = 0;
  // Label of the part's current position, empty when between labels.
  virtual std::string state_label(const std::string& part) const = 0;
  virtual ParamValue parameter_value(const std::string& name) const = 0;
};

bool eval_comparison(const Comparison& c, const SessionView& view);

// Conjunction; empty predicate is true.
bool eval_predicate(const Predicate& p, const SessionView& view);

// Spring latches interpret their parameter as a flag: nonzero integers are
// truthy; for label domains every label except the first is truthy.
bool latch_engaged(const SettingParameter& param, const ParamValue& value);

}  // namespace appsim
