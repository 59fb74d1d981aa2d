#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace appsim {

// Scalar carried by parameters, predicate comparisons and effects. Integers
// and doubles are kept distinct so serialization is stable.
using ParamValue = std::variant<int64_t, double, std::string>;

nlohmann::ordered_json param_value_to_json(const ParamValue& v);
ParamValue param_value_from_json(const nlohmann::json& j, const std::string& where);

std::string param_value_to_text(const ParamValue& v);

bool is_numeric(const ParamValue& v);
std::optional<double> numeric_value(const ParamValue& v);

// Numeric comparison when both sides are numeric, exact string comparison
// otherwise; a numeric never equals a string.
bool param_value_equal(const ParamValue& a, const ParamValue& b);

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };

const char* to_string(CompareOp op);
std::optional<CompareOp> compare_op_from(const std::string& s);

// One conjunct: a parameter value or a part state label compared to a value.
struct Comparison {
  enum class Subject { Parameter, PartState };
  Subject subject = Subject::Parameter;
  std::string name;
  CompareOp op = CompareOp::Eq;
  ParamValue value;

  bool operator==(const Comparison&) const = default;
};

// Conjunction; empty predicate is vacuously true.
using Predicate = std::vector<Comparison>;

nlohmann::ordered_json comparison_to_json(const Comparison& c);
Comparison comparison_from_json(const nlohmann::json& j, const std::string& where);
nlohmann::ordered_json predicate_to_json(const Predicate& p);
Predicate predicate_from_json(const nlohmann::json& j, const std::string& where);

enum class EffectTarget { Parameter, PartState, ScreenField, Indicator, Light, Motor };

const char* to_string(EffectTarget t);
std::optional<EffectTarget> effect_target_from(const std::string& s);

struct Effect {
  EffectTarget target = EffectTarget::Parameter;
  std::string name;
  ParamValue value;

  bool operator==(const Effect&) const = default;
};

nlohmann::ordered_json effect_to_json(const Effect& e);
Effect effect_from_json(const nlohmann::json& j, const std::string& where);
nlohmann::ordered_json effects_to_json(const std::vector<Effect>& effects);
std::vector<Effect> effects_from_json(const nlohmann::json& j, const std::string& where);

}  // namespace appsim
