#include "appsim/spec_io.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "appsim/errors.hpp"
#include "appsim/json_util.hpp"
#include "appsim/util.hpp"
#include "json.hpp"

namespace appsim {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

BoundingBox bbox_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 4) {
    throw SpecError(SpecError::Code::BadType, "bounding box must be [x1, y1, x2, y2]", where);
  }
  for (const auto& v : j) {
    if (!v.is_number()) {
      throw SpecError(SpecError::Code::BadType, "bounding box entries must be numbers", where);
    }
  }
  BoundingBox b{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
  if (b.x1 < 0 || b.y1 < 0 || b.x2 <= b.x1 || b.y2 <= b.y1) {
    throw SpecError(SpecError::Code::BadValue,
                    "bounding box needs 0 <= x1 < x2 and 0 <= y1 < y2", where);
  }
  return b;
}

JointSpec joint_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) {
    throw SpecError(SpecError::Code::BadType, "joint must be an object", where);
  }
  reject_unknown(j, {"kind", "limits", "rest", "detents"}, where);
  JointSpec joint;
  auto kind = joint_kind_from(get_string(j, "kind", where));
  if (!kind) {
    throw SpecError(SpecError::Code::BadValue, "joint kind must be revolute, prismatic or fixed",
                    where);
  }
  joint.kind = *kind;
  if (joint.kind == JointKind::Fixed) {
    if (j.contains("limits") || j.contains("rest") || j.contains("detents")) {
      throw SpecError(SpecError::Code::BadValue,
                      "fixed joints carry no limits, rest or detents", where);
    }
    return joint;
  }
  const json& limits = require(j, "limits", where);
  if (!limits.is_array() || limits.size() != 2 || !limits[0].is_number() ||
      !limits[1].is_number()) {
    throw SpecError(SpecError::Code::BadType, "'limits' must be [lo, hi]", where);
  }
  joint.lo = limits[0].get<double>();
  joint.hi = limits[1].get<double>();
  if (!(joint.lo < joint.hi)) {
    throw SpecError(SpecError::Code::BadValue, "joint limits need lo < hi", where);
  }
  joint.rest = get_number(j, "rest", where);
  if (joint.rest < joint.lo || joint.rest > joint.hi) {
    throw SpecError(SpecError::Code::BadValue, "rest position outside joint limits", where);
  }
  if (j.contains("detents")) {
    const json& detents = j.at("detents");
    if (!detents.is_array()) {
      throw SpecError(SpecError::Code::BadType, "'detents' must be an array", where);
    }
    double prev = joint.lo - 1.0;
    for (const auto& d : detents) {
      if (!d.is_number()) {
        throw SpecError(SpecError::Code::BadType, "detents must be numbers", where);
      }
      double v = d.get<double>();
      if (v < joint.lo || v > joint.hi) {
        throw SpecError(SpecError::Code::BadValue, "detent outside joint limits", where);
      }
      if (!joint.detents.empty() && v <= prev) {
        throw SpecError(SpecError::Code::BadValue, "detents must be strictly increasing", where);
      }
      joint.detents.push_back(v);
      prev = v;
    }
  }
  return joint;
}

Predicate predicate_field(const json& j, const char* key, const std::string& where,
                          bool required) {
  if (!j.contains(key)) {
    if (required) {
      throw SpecError(SpecError::Code::MissingField, std::string("missing field '") + key + "'",
                      where);
    }
    return {};
  }
  return predicate_from_json(j.at(key), where + "." + key);
}

MechanismConfig mechanism_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) {
    throw SpecError(SpecError::Code::BadType, "mechanism must be an object", where);
  }
  auto kind = mechanism_kind_from(get_string(j, "kind", where));
  if (!kind) {
    throw SpecError(SpecError::Code::BadValue,
                    "unknown mechanism kind '" + get_string(j, "kind", where) + "'", where);
  }
  MechanismConfig m;
  m.kind = *kind;
  switch (*kind) {
    case MechanismKind::InnerSpring: {
      reject_unknown(j, {"kind", "return_ticks", "latch_param"}, where);
      SpringConfig c;
      c.return_ticks = get_int(j, "return_ticks", where);
      if (c.return_ticks < 1) {
        throw SpecError(SpecError::Code::BadValue, "return_ticks must be >= 1", where);
      }
      if (j.contains("latch_param")) c.latch_param = get_string(j, "latch_param", where);
      m.config = c;
      break;
    }
    case MechanismKind::MagneticAttraction: {
      reject_unknown(j, {"kind", "hold"}, where);
      MagnetConfig c;
      c.hold = predicate_field(j, "hold", where, true);
      m.config = c;
      break;
    }
    case MechanismKind::MechanicalTrigger: {
      reject_unknown(j, {"kind", "on", "target", "effect", "guard"}, where);
      TriggerConfig c;
      const json& on = require(j, "on", where);
      if (!on.is_object()) {
        throw SpecError(SpecError::Code::BadType, "'on' must be an object", where);
      }
      if (on.contains("press")) {
        reject_unknown(on, {"press"}, where + ".on");
        c.on.kind = EventPattern::Kind::Press;
        c.on.part = get_string(on, "press", where + ".on");
      } else {
        reject_unknown(on, {"part", "state"}, where + ".on");
        c.on.kind = EventPattern::Kind::StateEntered;
        c.on.part = get_string(on, "part", where + ".on");
        c.on.state = get_string(on, "state", where + ".on");
      }
      c.target = get_string(j, "target", where);
      c.effect = effect_from_json(require(j, "effect", where), where + ".effect");
      c.guard = predicate_field(j, "guard", where, false);
      m.config = c;
      break;
    }
    case MechanismKind::KnobCountdown: {
      reject_unknown(j, {"kind", "ticks_per_detent", "on_zero"}, where);
      CountdownConfig c;
      c.ticks_per_detent = get_int(j, "ticks_per_detent", where);
      if (c.ticks_per_detent < 1) {
        throw SpecError(SpecError::Code::BadValue, "ticks_per_detent must be >= 1", where);
      }
      c.on_zero = effects_from_json(require(j, "on_zero", where), where + ".on_zero");
      m.config = c;
      break;
    }
    case MechanismKind::SafetyLock: {
      reject_unknown(j, {"kind", "unlocked_when", "blocks"}, where);
      SafetyLockConfig c;
      c.unlocked_when = predicate_field(j, "unlocked_when", where, true);
      const json& blocks = require(j, "blocks", where);
      if (!blocks.is_array() || blocks.empty()) {
        throw SpecError(SpecError::Code::BadValue, "'blocks' must be a non-empty array", where);
      }
      for (const auto& b : blocks) {
        if (!b.is_string()) {
          throw SpecError(SpecError::Code::BadType, "'blocks' entries must be strings", where);
        }
        auto ak = action_kind_from(b.get<std::string>());
        if (!ak) {
          throw SpecError(SpecError::Code::BadValue,
                          "unknown action kind '" + b.get<std::string>() + "' in blocks", where);
        }
        c.blocks.push_back(*ak);
      }
      m.config = c;
      break;
    }
    case MechanismKind::ScreenDisplay: {
      reject_unknown(j, {"kind", "fields", "format"}, where);
      ScreenConfig c;
      const json& fields = require(j, "fields", where);
      if (!fields.is_array()) {
        throw SpecError(SpecError::Code::BadType, "'fields' must be an array", where);
      }
      for (const auto& f : fields) {
        if (!f.is_string()) {
          throw SpecError(SpecError::Code::BadType, "'fields' entries must be strings", where);
        }
        c.fields.push_back(f.get<std::string>());
      }
      c.format = get_string(j, "format", where);
      m.config = c;
      break;
    }
    case MechanismKind::TouchSensing: {
      reject_unknown(j, {"kind", "effects"}, where);
      TouchConfig c;
      c.effects = effects_from_json(require(j, "effects", where), where + ".effects");
      m.config = c;
      break;
    }
    case MechanismKind::Illumination: {
      reject_unknown(j, {"kind", "on_when"}, where);
      IlluminationConfig c;
      c.on_when = predicate_field(j, "on_when", where, true);
      m.config = c;
      break;
    }
    case MechanismKind::LogoIndicator: {
      reject_unknown(j, {"kind", "mode_when"}, where);
      IndicatorConfig c;
      const json& modes = require(j, "mode_when", where);
      if (!modes.is_array()) {
        throw SpecError(SpecError::Code::BadType, "'mode_when' must be an array", where);
      }
      for (size_t i = 0; i < modes.size(); ++i) {
        const json& entry = modes[i];
        std::string ewhere = where + ".mode_when[" + std::to_string(i) + "]";
        if (!entry.is_object()) {
          throw SpecError(SpecError::Code::BadType, "mode_when entry must be an object", ewhere);
        }
        reject_unknown(entry, {"when", "mode"}, ewhere);
        IndicatorConfig::Mode mode;
        mode.when = predicate_field(entry, "when", ewhere, true);
        mode.mode = get_string(entry, "mode", ewhere);
        if (mode.mode != "on" && mode.mode != "off" && mode.mode != "flash") {
          throw SpecError(SpecError::Code::BadValue, "mode must be on, off or flash", ewhere);
        }
        c.mode_when.push_back(std::move(mode));
      }
      m.config = c;
      break;
    }
    case MechanismKind::RotaryMotor: {
      reject_unknown(j, {"kind", "joint", "rate", "on_when"}, where);
      MotorConfig c;
      c.joint = get_string(j, "joint", where);
      c.rate = get_number(j, "rate", where);
      if (!(c.rate > 0)) {
        throw SpecError(SpecError::Code::BadValue, "motor rate must be > 0", where);
      }
      c.on_when = predicate_field(j, "on_when", where, true);
      m.config = c;
      break;
    }
  }
  return m;
}

PartSpec part_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) {
    throw SpecError(SpecError::Code::BadType, "part must be an object", where);
  }
  reject_unknown(j, {"name", "joint", "panel_rect", "state_labels", "mechanisms"}, where);
  PartSpec part;
  part.name = get_string(j, "name", where);
  if (part.name.empty()) {
    throw SpecError(SpecError::Code::BadValue, "part name must be non-empty", where);
  }
  part.joint = joint_from_json(require(j, "joint", where), where + ".joint");
  part.panel_rect = bbox_from_json(require(j, "panel_rect", where), where + ".panel_rect");

  const json& labels = require(j, "state_labels", where);
  if (!labels.is_object()) {
    throw SpecError(SpecError::Code::BadType, "'state_labels' must be an object", where);
  }
  std::set<std::string> seen_labels;
  for (auto it = labels.begin(); it != labels.end(); ++it) {
    if (part.joint.kind == JointKind::Fixed) {
      throw SpecError(SpecError::Code::BadValue, "fixed joints carry no state labels", where);
    }
    const char* begin = it.key().c_str();
    char* end = nullptr;
    double pos = std::strtod(begin, &end);
    if (end == begin || *end != '\0') {
      throw SpecError(SpecError::Code::BadValue,
                      "state_labels key '" + it.key() + "' is not a number", where);
    }
    if (pos < part.joint.lo || pos > part.joint.hi) {
      throw SpecError(SpecError::Code::BadValue,
                      "state_labels key '" + it.key() + "' outside joint limits", where);
    }
    if (!it.value().is_string() || it.value().get<std::string>().empty()) {
      throw SpecError(SpecError::Code::BadType, "state labels must be non-empty strings", where);
    }
    std::string label = it.value().get<std::string>();
    if (!seen_labels.insert(label).second) {
      throw SpecError(SpecError::Code::DuplicateName,
                      "duplicate state label '" + label + "'", where);
    }
    part.state_labels.emplace_back(pos, label);
  }
  std::sort(part.state_labels.begin(), part.state_labels.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (size_t i = 1; i < part.state_labels.size(); ++i) {
    if (part.state_labels[i].first == part.state_labels[i - 1].first) {
      throw SpecError(SpecError::Code::DuplicateName, "duplicate state label position", where);
    }
  }

  const json& mechanisms = require(j, "mechanisms", where);
  if (!mechanisms.is_array()) {
    throw SpecError(SpecError::Code::BadType, "'mechanisms' must be an array", where);
  }
  std::set<MechanismKind> seen_kinds;
  for (size_t i = 0; i < mechanisms.size(); ++i) {
    MechanismConfig m =
        mechanism_from_json(mechanisms[i], where + ".mechanisms[" + std::to_string(i) + "]");
    if (!seen_kinds.insert(m.kind).second) {
      throw SpecError(SpecError::Code::DuplicateName,
                      std::string("part declares two ") + to_string(m.kind) + " mechanisms",
                      where);
    }
    part.mechanisms.push_back(std::move(m));
  }
  return part;
}

SettingParameter parameter_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) {
    throw SpecError(SpecError::Code::BadType, "parameter must be an object", where);
  }
  reject_unknown(j, {"name", "domain", "initial", "unit"}, where);
  SettingParameter p;
  p.name = get_string(j, "name", where);
  if (p.name.empty()) {
    throw SpecError(SpecError::Code::BadValue, "parameter name must be non-empty", where);
  }
  const json& domain = require(j, "domain", where);
  if (!domain.is_object()) {
    throw SpecError(SpecError::Code::BadType, "'domain' must be an object", where);
  }
  if (domain.contains("labels")) {
    reject_unknown(domain, {"labels"}, where + ".domain");
    const json& labels = domain.at("labels");
    if (!labels.is_array() || labels.empty()) {
      throw SpecError(SpecError::Code::BadValue, "'labels' must be a non-empty array",
                      where + ".domain");
    }
    LabelSet set;
    std::set<std::string> seen;
    for (const auto& l : labels) {
      if (!l.is_string()) {
        throw SpecError(SpecError::Code::BadType, "domain labels must be strings",
                        where + ".domain");
      }
      if (!seen.insert(l.get<std::string>()).second) {
        throw SpecError(SpecError::Code::DuplicateName,
                        "duplicate domain label '" + l.get<std::string>() + "'",
                        where + ".domain");
      }
      set.labels.push_back(l.get<std::string>());
    }
    p.domain = std::move(set);
  } else {
    reject_unknown(domain, {"min", "max", "step"}, where + ".domain");
    IntRange range;
    range.min = get_int(domain, "min", where + ".domain");
    range.max = get_int(domain, "max", where + ".domain");
    range.step = domain.contains("step") ? get_int(domain, "step", where + ".domain") : 1;
    if (range.min > range.max || range.step < 1) {
      throw SpecError(SpecError::Code::BadValue, "integer domain needs min <= max and step >= 1",
                      where + ".domain");
    }
    p.domain = range;
  }
  p.initial = param_value_from_json(require(j, "initial", where), where + ".initial");
  if (!p.value_in_domain(p.initial)) {
    throw SpecError(SpecError::Code::BadValue, "initial value outside parameter domain", where);
  }
  p.unit = j.contains("unit") ? get_string(j, "unit", where) : "";
  return p;
}

LogicRule rule_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) {
    throw SpecError(SpecError::Code::BadType, "rule must be an object", where);
  }
  reject_unknown(j, {"id", "priority", "when", "then"}, where);
  LogicRule r;
  r.id = get_string(j, "id", where);
  if (r.id.empty()) {
    throw SpecError(SpecError::Code::BadValue, "rule id must be non-empty", where);
  }
  r.priority = j.contains("priority") ? get_int(j, "priority", where) : 0;
  r.when = predicate_from_json(require(j, "when", where), where + ".when");
  r.then = effects_from_json(require(j, "then", where), where + ".then");
  if (r.then.empty()) {
    throw SpecError(SpecError::Code::BadValue, "rule must have at least one effect", where);
  }
  return r;
}

// Name resolution for predicates, effects and mechanism references, applied
// after all declarations are collected.
class Resolver {
 public:
  explicit Resolver(const ApplianceSpec& spec) : spec_(spec) {}

  void predicate(const Predicate& p, const std::string& where) const {
    for (const auto& c : p) {
      if (c.subject == Comparison::Subject::Parameter) {
        const SettingParameter* param = spec_.parameter(c.name);
        if (!param) {
          throw SpecError(SpecError::Code::UnknownName,
                          "predicate references unknown parameter '" + c.name + "'", where);
        }
        check_param_value(*param, c.value, where);
      } else {
        const PartSpec* part = spec_.part(c.name);
        if (!part) {
          throw SpecError(SpecError::Code::UnknownName,
                          "predicate references unknown part '" + c.name + "'", where);
        }
        if (c.op != CompareOp::Eq && c.op != CompareOp::Ne) {
          throw SpecError(SpecError::Code::BadValue,
                          "part states support only == and != comparisons", where);
        }
        if (!std::holds_alternative<std::string>(c.value) ||
            !part->position_of(std::get<std::string>(c.value))) {
          throw SpecError(SpecError::Code::BadValue,
                          "comparison value is not a state label of part '" + c.name + "'",
                          where);
        }
      }
    }
  }

  void effect(const Effect& e, const std::string& where) const {
    switch (e.target) {
      case EffectTarget::Parameter: {
        const SettingParameter* param = spec_.parameter(e.name);
        if (!param) {
          throw SpecError(SpecError::Code::UnknownName,
                          "effect references unknown parameter '" + e.name + "'", where);
        }
        if (!param->value_in_domain(e.value)) {
          throw SpecError(SpecError::Code::BadValue,
                          "effect value outside domain of parameter '" + e.name + "'", where);
        }
        break;
      }
      case EffectTarget::PartState: {
        const PartSpec* part = spec_.part(e.name);
        if (!part) {
          throw SpecError(SpecError::Code::UnknownName,
                          "effect references unknown part '" + e.name + "'", where);
        }
        if (std::holds_alternative<std::string>(e.value)) {
          if (!part->position_of(std::get<std::string>(e.value))) {
            throw SpecError(SpecError::Code::BadValue,
                            "effect value is not a state label of part '" + e.name + "'", where);
          }
        } else {
          double v = *numeric_value(e.value);
          if (!part->joint.movable() || v < part->joint.lo || v > part->joint.hi) {
            throw SpecError(SpecError::Code::BadValue,
                            "numeric part_state effect outside joint limits", where);
          }
        }
        break;
      }
      case EffectTarget::ScreenField: {
        if (spec_.parameter_index(e.name) < 0) {
          throw SpecError(SpecError::Code::UnknownName,
                          "screen_field effect references unknown parameter '" + e.name + "'",
                          where);
        }
        if (!std::holds_alternative<std::string>(e.value)) {
          throw SpecError(SpecError::Code::BadValue, "screen_field value must be a string",
                          where);
        }
        break;
      }
      case EffectTarget::Indicator:
      case EffectTarget::Light:
      case EffectTarget::Motor: {
        if (spec_.part_index(e.name) < 0) {
          throw SpecError(SpecError::Code::UnknownName,
                          "effect references unknown part '" + e.name + "'", where);
        }
        if (!std::holds_alternative<std::string>(e.value)) {
          throw SpecError(SpecError::Code::BadValue, "register value must be a string", where);
        }
        const std::string& v = std::get<std::string>(e.value);
        bool ok = e.target == EffectTarget::Indicator
                      ? (v == "on" || v == "off" || v == "flash")
                      : (e.target == EffectTarget::Light ? (v == "on" || v == "off")
                                                         : (v == "running" || v == "stopped"));
        if (!ok) {
          throw SpecError(SpecError::Code::BadValue, "register value '" + v + "' not allowed",
                          where);
        }
        break;
      }
    }
  }

  void effects(const std::vector<Effect>& list, const std::string& where) const {
    for (size_t i = 0; i < list.size(); ++i) {
      effect(list[i], where + "[" + std::to_string(i) + "]");
    }
  }

 private:
  void check_param_value(const SettingParameter& param, const ParamValue& v,
                         const std::string& where) const {
    if (std::holds_alternative<IntRange>(param.domain)) {
      if (!is_numeric(v)) {
        throw SpecError(SpecError::Code::BadValue,
                        "comparison value for integer parameter '" + param.name +
                            "' must be a number",
                        where);
      }
    } else {
      if (!param.value_in_domain(v)) {
        throw SpecError(SpecError::Code::BadValue,
                        "comparison value is not in the domain of parameter '" + param.name + "'",
                        where);
      }
    }
  }

  const ApplianceSpec& spec_;
};

void resolve_spec(const ApplianceSpec& spec, const std::string& source) {
  Resolver r(spec);
  for (const auto& part : spec.parts) {
    std::string pwhere = source + ": part '" + part.name + "'";
    for (const auto& m : part.mechanisms) {
      std::string mwhere = pwhere + " " + to_string(m.kind);
      switch (m.kind) {
        case MechanismKind::InnerSpring: {
          const auto& c = m.as<SpringConfig>();
          if (!part.joint.movable()) {
            throw SpecError(SpecError::Code::BadValue, "inner_spring needs a movable joint",
                            mwhere);
          }
          if (!c.latch_param.empty() && spec.parameter_index(c.latch_param) < 0) {
            throw SpecError(SpecError::Code::UnknownName,
                            "latch_param '" + c.latch_param + "' is not a declared parameter",
                            mwhere);
          }
          break;
        }
        case MechanismKind::MagneticAttraction: {
          if (!part.joint.movable()) {
            throw SpecError(SpecError::Code::BadValue,
                            "magnetic_attraction needs a movable joint", mwhere);
          }
          r.predicate(m.as<MagnetConfig>().hold, mwhere);
          break;
        }
        case MechanismKind::MechanicalTrigger: {
          const auto& c = m.as<TriggerConfig>();
          if (spec.part_index(c.on.part) < 0) {
            throw SpecError(SpecError::Code::UnknownName,
                            "trigger pattern references unknown part '" + c.on.part + "'",
                            mwhere);
          }
          if (c.on.kind == EventPattern::Kind::StateEntered) {
            const PartSpec* src = spec.part(c.on.part);
            if (!src->position_of(c.on.state)) {
              throw SpecError(SpecError::Code::BadValue,
                              "trigger pattern state '" + c.on.state +
                                  "' is not a label of part '" + c.on.part + "'",
                              mwhere);
            }
          }
          if (spec.part_index(c.target) < 0) {
            throw SpecError(SpecError::Code::UnknownName,
                            "trigger target '" + c.target + "' is not a declared part", mwhere);
          }
          if (c.effect.target != EffectTarget::PartState || c.effect.name != c.target) {
            throw SpecError(SpecError::Code::BadValue,
                            "trigger effect must set the state of its target part", mwhere);
          }
          r.effect(c.effect, mwhere);
          r.predicate(c.guard, mwhere);
          break;
        }
        case MechanismKind::KnobCountdown: {
          if (part.joint.detents.empty()) {
            throw SpecError(SpecError::Code::BadValue, "knob_countdown needs joint detents",
                            mwhere);
          }
          r.effects(m.as<CountdownConfig>().on_zero, mwhere);
          break;
        }
        case MechanismKind::SafetyLock: {
          r.predicate(m.as<SafetyLockConfig>().unlocked_when, mwhere);
          break;
        }
        case MechanismKind::ScreenDisplay: {
          for (const auto& f : m.as<ScreenConfig>().fields) {
            if (spec.parameter_index(f) < 0) {
              throw SpecError(SpecError::Code::UnknownName,
                              "screen field '" + f + "' is not a declared parameter", mwhere);
            }
          }
          break;
        }
        case MechanismKind::TouchSensing: {
          if (part.joint.movable()) {
            throw SpecError(SpecError::Code::BadValue, "touch_sensing needs a fixed joint",
                            mwhere);
          }
          r.effects(m.as<TouchConfig>().effects, mwhere);
          break;
        }
        case MechanismKind::Illumination: {
          r.predicate(m.as<IlluminationConfig>().on_when, mwhere);
          break;
        }
        case MechanismKind::LogoIndicator: {
          for (const auto& mode : m.as<IndicatorConfig>().mode_when) {
            r.predicate(mode.when, mwhere);
          }
          break;
        }
        case MechanismKind::RotaryMotor: {
          const auto& c = m.as<MotorConfig>();
          const PartSpec* driven = spec.part(c.joint);
          if (!driven) {
            throw SpecError(SpecError::Code::UnknownName,
                            "motor joint '" + c.joint + "' is not a declared part", mwhere);
          }
          if (!driven->joint.movable()) {
            throw SpecError(SpecError::Code::BadValue, "motor joint must be movable", mwhere);
          }
          r.predicate(c.on_when, mwhere);
          break;
        }
      }
    }
  }
  for (const auto& rule : spec.rules) {
    std::string rwhere = source + ": rule '" + rule.id + "'";
    r.predicate(rule.when, rwhere);
    r.effects(rule.then, rwhere);
  }
}

}  // namespace

ApplianceSpec load_spec(std::string_view text, const std::string& source_name) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SpecError(SpecError::Code::Syntax, e.what(), source_name);
  }
  if (!root.is_object()) {
    throw SpecError(SpecError::Code::BadType, "spec document must be a JSON object", source_name);
  }
  reject_unknown(root, {"id", "category", "panel", "parts", "parameters", "rules", "objects"},
                 source_name);

  ApplianceSpec spec;
  spec.id = get_string(root, "id", source_name);
  if (spec.id.empty()) {
    throw SpecError(SpecError::Code::BadValue, "id must be non-empty", source_name);
  }
  spec.category = get_string(root, "category", source_name);

  const json& panel = require(root, "panel", source_name);
  if (!panel.is_object()) {
    throw SpecError(SpecError::Code::BadType, "'panel' must be an object", source_name);
  }
  reject_unknown(panel, {"width", "height"}, source_name + ".panel");
  spec.panel.width = get_int(panel, "width", source_name + ".panel");
  spec.panel.height = get_int(panel, "height", source_name + ".panel");
  if (spec.panel.width <= 0 || spec.panel.height <= 0) {
    throw SpecError(SpecError::Code::BadValue, "panel dimensions must be positive",
                    source_name + ".panel");
  }

  const json& parts = require(root, "parts", source_name);
  if (!parts.is_array() || parts.empty()) {
    throw SpecError(SpecError::Code::BadValue, "'parts' must be a non-empty array", source_name);
  }
  std::set<std::string> part_names;
  for (size_t i = 0; i < parts.size(); ++i) {
    PartSpec part = part_from_json(parts[i], source_name + ".parts[" + std::to_string(i) + "]");
    if (!part_names.insert(part.name).second) {
      throw SpecError(SpecError::Code::DuplicateName, "duplicate part '" + part.name + "'",
                      source_name);
    }
    if (part.panel_rect.x2 > static_cast<double>(spec.panel.width) ||
        part.panel_rect.y2 > static_cast<double>(spec.panel.height)) {
      throw SpecError(SpecError::Code::BadValue,
                      "panel_rect of part '" + part.name + "' exceeds panel bounds", source_name);
    }
    spec.parts.push_back(std::move(part));
  }

  const json& params = require(root, "parameters", source_name);
  if (!params.is_array()) {
    throw SpecError(SpecError::Code::BadType, "'parameters' must be an array", source_name);
  }
  std::set<std::string> param_names;
  for (size_t i = 0; i < params.size(); ++i) {
    SettingParameter p =
        parameter_from_json(params[i], source_name + ".parameters[" + std::to_string(i) + "]");
    if (!param_names.insert(p.name).second) {
      throw SpecError(SpecError::Code::DuplicateName, "duplicate parameter '" + p.name + "'",
                      source_name);
    }
    spec.parameters.push_back(std::move(p));
  }

  const json& rules = require(root, "rules", source_name);
  if (!rules.is_array()) {
    throw SpecError(SpecError::Code::BadType, "'rules' must be an array", source_name);
  }
  std::set<std::string> rule_ids;
  for (size_t i = 0; i < rules.size(); ++i) {
    LogicRule rule = rule_from_json(rules[i], source_name + ".rules[" + std::to_string(i) + "]");
    if (!rule_ids.insert(rule.id).second) {
      throw SpecError(SpecError::Code::DuplicateName, "duplicate rule id '" + rule.id + "'",
                      source_name);
    }
    spec.rules.push_back(std::move(rule));
  }

  const json& objects = require(root, "objects", source_name);
  if (!objects.is_array()) {
    throw SpecError(SpecError::Code::BadType, "'objects' must be an array", source_name);
  }
  std::set<std::string> object_names;
  for (const auto& o : objects) {
    if (!o.is_string() || o.get<std::string>().empty()) {
      throw SpecError(SpecError::Code::BadType, "'objects' entries must be non-empty strings",
                      source_name);
    }
    if (!object_names.insert(o.get<std::string>()).second) {
      throw SpecError(SpecError::Code::DuplicateName,
                      "duplicate object '" + o.get<std::string>() + "'", source_name);
    }
    spec.objects.push_back(o.get<std::string>());
  }

  resolve_spec(spec, source_name);
  return spec;
}

ApplianceSpec load_spec_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw SpecError(SpecError::Code::Syntax, "cannot open file", path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_spec(buf.str(), path);
}

void check_predicate_against_spec(const ApplianceSpec& spec, const Predicate& p,
                                  const std::string& where) {
  Resolver(spec).predicate(p, where);
}

void check_effect_against_spec(const ApplianceSpec& spec, const Effect& e,
                               const std::string& where) {
  Resolver(spec).effect(e, where);
}

namespace {

ordered_json joint_to_json(const JointSpec& j) {
  ordered_json out;
  out["kind"] = to_string(j.kind);
  if (j.kind == JointKind::Fixed) return out;
  out["limits"] = {j.lo, j.hi};
  out["rest"] = j.rest;
  if (!j.detents.empty()) out["detents"] = j.detents;
  return out;
}

ordered_json bbox_to_json(const BoundingBox& b) { return {b.x1, b.y1, b.x2, b.y2}; }

ordered_json event_pattern_to_json(const EventPattern& p) {
  ordered_json out;
  if (p.kind == EventPattern::Kind::Press) {
    out["press"] = p.part;
  } else {
    out["part"] = p.part;
    out["state"] = p.state;
  }
  return out;
}

ordered_json mechanism_to_json(const MechanismConfig& m) {
  ordered_json out;
  out["kind"] = to_string(m.kind);
  switch (m.kind) {
    case MechanismKind::InnerSpring: {
      const auto& c = m.as<SpringConfig>();
      out["return_ticks"] = c.return_ticks;
      if (!c.latch_param.empty()) out["latch_param"] = c.latch_param;
      break;
    }
    case MechanismKind::MagneticAttraction:
      out["hold"] = predicate_to_json(m.as<MagnetConfig>().hold);
      break;
    case MechanismKind::MechanicalTrigger: {
      const auto& c = m.as<TriggerConfig>();
      out["on"] = event_pattern_to_json(c.on);
      out["target"] = c.target;
      out["effect"] = effect_to_json(c.effect);
      if (!c.guard.empty()) out["guard"] = predicate_to_json(c.guard);
      break;
    }
    case MechanismKind::KnobCountdown: {
      const auto& c = m.as<CountdownConfig>();
      out["ticks_per_detent"] = c.ticks_per_detent;
      out["on_zero"] = effects_to_json(c.on_zero);
      break;
    }
    case MechanismKind::SafetyLock: {
      const auto& c = m.as<SafetyLockConfig>();
      out["unlocked_when"] = predicate_to_json(c.unlocked_when);
      ordered_json blocks = ordered_json::array();
      for (ActionKind k : c.blocks) blocks.push_back(to_string(k));
      out["blocks"] = blocks;
      break;
    }
    case MechanismKind::ScreenDisplay: {
      const auto& c = m.as<ScreenConfig>();
      out["fields"] = c.fields;
      out["format"] = c.format;
      break;
    }
    case MechanismKind::TouchSensing:
      out["effects"] = effects_to_json(m.as<TouchConfig>().effects);
      break;
    case MechanismKind::Illumination:
      out["on_when"] = predicate_to_json(m.as<IlluminationConfig>().on_when);
      break;
    case MechanismKind::LogoIndicator: {
      ordered_json modes = ordered_json::array();
      for (const auto& mode : m.as<IndicatorConfig>().mode_when) {
        ordered_json entry;
        entry["when"] = predicate_to_json(mode.when);
        entry["mode"] = mode.mode;
        modes.push_back(entry);
      }
      out["mode_when"] = modes;
      break;
    }
    case MechanismKind::RotaryMotor: {
      const auto& c = m.as<MotorConfig>();
      out["joint"] = c.joint;
      out["rate"] = c.rate;
      out["on_when"] = predicate_to_json(c.on_when);
      break;
    }
  }
  return out;
}

ordered_json domain_to_json(const ParamDomain& d) {
  ordered_json out;
  if (std::holds_alternative<LabelSet>(d)) {
    out["labels"] = std::get<LabelSet>(d).labels;
  } else {
    const auto& r = std::get<IntRange>(d);
    out["min"] = r.min;
    out["max"] = r.max;
    out["step"] = r.step;
  }
  return out;
}

}  // namespace

std::string serialize_spec(const ApplianceSpec& spec) {
  ordered_json root;
  root["id"] = spec.id;
  root["category"] = spec.category;
  root["panel"] = {{"width", spec.panel.width}, {"height", spec.panel.height}};

  ordered_json parts = ordered_json::array();
  for (const auto& part : spec.parts) {
    ordered_json p;
    p["name"] = part.name;
    p["joint"] = joint_to_json(part.joint);
    p["panel_rect"] = bbox_to_json(part.panel_rect);
    ordered_json labels = ordered_json::object();
    for (const auto& [pos, label] : part.state_labels) labels[canon_num(pos)] = label;
    p["state_labels"] = labels;
    ordered_json mechanisms = ordered_json::array();
    for (const auto& m : part.mechanisms) mechanisms.push_back(mechanism_to_json(m));
    p["mechanisms"] = mechanisms;
    parts.push_back(p);
  }
  root["parts"] = parts;

  ordered_json params = ordered_json::array();
  for (const auto& param : spec.parameters) {
    ordered_json p;
    p["name"] = param.name;
    p["domain"] = domain_to_json(param.domain);
    p["initial"] = param_value_to_json(param.initial);
    p["unit"] = param.unit;
    params.push_back(p);
  }
  root["parameters"] = params;

  ordered_json rules = ordered_json::array();
  for (const auto& rule : spec.rules) {
    ordered_json r;
    r["id"] = rule.id;
    r["priority"] = rule.priority;
    r["when"] = predicate_to_json(rule.when);
    r["then"] = effects_to_json(rule.then);
    rules.push_back(r);
  }
  root["rules"] = rules;
  root["objects"] = spec.objects;

  return root.dump(2) + "\n";
}

}  // namespace appsim
