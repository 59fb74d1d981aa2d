#include "appsim/value.hpp"

#include "appsim/errors.hpp"
#include "appsim/util.hpp"

namespace appsim {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json param_value_to_json(const ParamValue& v) {
  if (std::holds_alternative<int64_t>(v)) return std::get<int64_t>(v);
  if (std::holds_alternative<double>(v)) return std::get<double>(v);
  return std::get<std::string>(v);
}

ParamValue param_value_from_json(const json& j, const std::string& where) {
  if (j.is_number_integer()) return j.get<int64_t>();
  if (j.is_number_float()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw SpecError(SpecError::Code::BadType, "value must be a number or string", where);
}

std::string param_value_to_text(const ParamValue& v) {
  if (std::holds_alternative<int64_t>(v)) return std::to_string(std::get<int64_t>(v));
  if (std::holds_alternative<double>(v)) return canon_num(std::get<double>(v));
  return std::get<std::string>(v);
}

bool is_numeric(const ParamValue& v) { return !std::holds_alternative<std::string>(v); }

std::optional<double> numeric_value(const ParamValue& v) {
  if (std::holds_alternative<int64_t>(v)) return static_cast<double>(std::get<int64_t>(v));
  if (std::holds_alternative<double>(v)) return std::get<double>(v);
  return std::nullopt;
}

bool param_value_equal(const ParamValue& a, const ParamValue& b) {
  if (is_numeric(a) && is_numeric(b)) return *numeric_value(a) == *numeric_value(b);
  if (is_numeric(a) != is_numeric(b)) return false;
  return std::get<std::string>(a) == std::get<std::string>(b);
}

const char* to_string(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "==";
    case CompareOp::Ne: return "!=";
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
  }
  return "?";
}

std::optional<CompareOp> compare_op_from(const std::string& s) {
  if (s == "==") return CompareOp::Eq;
  if (s == "!=") return CompareOp::Ne;
  if (s == "<") return CompareOp::Lt;
  if (s == "<=") return CompareOp::Le;
  if (s == ">") return CompareOp::Gt;
  if (s == ">=") return CompareOp::Ge;
  return std::nullopt;
}

ordered_json comparison_to_json(const Comparison& c) {
  ordered_json j;
  j[c.subject == Comparison::Subject::Parameter ? "param" : "part"] = c.name;
  j["op"] = to_string(c.op);
  j["value"] = param_value_to_json(c.value);
  return j;
}

Comparison comparison_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) {
    throw SpecError(SpecError::Code::BadType, "comparison must be an object", where);
  }
  Comparison c;
  bool has_param = j.contains("param");
  bool has_part = j.contains("part");
  if (has_param == has_part) {
    throw SpecError(SpecError::Code::MissingField,
                    "comparison needs exactly one of 'param' or 'part'", where);
  }
  c.subject = has_param ? Comparison::Subject::Parameter : Comparison::Subject::PartState;
  const json& name = has_param ? j.at("param") : j.at("part");
  if (!name.is_string()) {
    throw SpecError(SpecError::Code::BadType, "comparison subject must be a string", where);
  }
  c.name = name.get<std::string>();
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (key != "param" && key != "part" && key != "op" && key != "value") {
      throw SpecError(SpecError::Code::UnknownField, "unknown comparison field '" + key + "'",
                      where);
    }
  }
  if (!j.contains("op") || !j.at("op").is_string()) {
    throw SpecError(SpecError::Code::MissingField, "comparison needs a string 'op'", where);
  }
  auto op = compare_op_from(j.at("op").get<std::string>());
  if (!op) {
    throw SpecError(SpecError::Code::BadValue,
                    "unknown op '" + j.at("op").get<std::string>() + "'", where);
  }
  c.op = *op;
  if (!j.contains("value")) {
    throw SpecError(SpecError::Code::MissingField, "comparison needs a 'value'", where);
  }
  c.value = param_value_from_json(j.at("value"), where + ".value");
  if (!is_numeric(c.value) && c.op != CompareOp::Eq && c.op != CompareOp::Ne) {
    throw SpecError(SpecError::Code::BadValue, "ordering comparison on a string value", where);
  }
  return c;
}

ordered_json predicate_to_json(const Predicate& p) {
  ordered_json arr = ordered_json::array();
  for (const auto& c : p) arr.push_back(comparison_to_json(c));
  return arr;
}

Predicate predicate_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) {
    throw SpecError(SpecError::Code::BadType, "predicate must be an array", where);
  }
  Predicate p;
  for (size_t i = 0; i < j.size(); ++i) {
    p.push_back(comparison_from_json(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return p;
}

const char* to_string(EffectTarget t) {
  switch (t) {
    case EffectTarget::Parameter: return "parameter";
    case EffectTarget::PartState: return "part_state";
    case EffectTarget::ScreenField: return "screen_field";
    case EffectTarget::Indicator: return "indicator";
    case EffectTarget::Light: return "light";
    case EffectTarget::Motor: return "motor";
  }
  return "?";
}

std::optional<EffectTarget> effect_target_from(const std::string& s) {
  if (s == "parameter") return EffectTarget::Parameter;
  if (s == "part_state") return EffectTarget::PartState;
  if (s == "screen_field") return EffectTarget::ScreenField;
  if (s == "indicator") return EffectTarget::Indicator;
  if (s == "light") return EffectTarget::Light;
  if (s == "motor") return EffectTarget::Motor;
  return std::nullopt;
}

ordered_json effect_to_json(const Effect& e) {
  ordered_json j;
  j["set"] = to_string(e.target);
  j["name"] = e.name;
  j["value"] = param_value_to_json(e.value);
  return j;
}

Effect effect_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) {
    throw SpecError(SpecError::Code::BadType, "effect must be an object", where);
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (key != "set" && key != "name" && key != "value") {
      throw SpecError(SpecError::Code::UnknownField, "unknown effect field '" + key + "'", where);
    }
  }
  if (!j.contains("set") || !j.at("set").is_string()) {
    throw SpecError(SpecError::Code::MissingField, "effect needs a string 'set'", where);
  }
  Effect e;
  auto target = effect_target_from(j.at("set").get<std::string>());
  if (!target) {
    throw SpecError(SpecError::Code::BadValue,
                    "unknown effect target '" + j.at("set").get<std::string>() + "'", where);
  }
  e.target = *target;
  if (!j.contains("name") || !j.at("name").is_string()) {
    throw SpecError(SpecError::Code::MissingField, "effect needs a string 'name'", where);
  }
  e.name = j.at("name").get<std::string>();
  if (!j.contains("value")) {
    throw SpecError(SpecError::Code::MissingField, "effect needs a 'value'", where);
  }
  e.value = param_value_from_json(j.at("value"), where + ".value");
  return e;
}

ordered_json effects_to_json(const std::vector<Effect>& effects) {
  ordered_json arr = ordered_json::array();
  for (const auto& e : effects) arr.push_back(effect_to_json(e));
  return arr;
}

std::vector<Effect> effects_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) {
    throw SpecError(SpecError::Code::BadType, "effects must be an array", where);
  }
  std::vector<Effect> out;
  for (size_t i = 0; i < j.size(); ++i) {
    out.push_back(effect_from_json(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

}  // namespace appsim
