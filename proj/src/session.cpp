#include "appsim/session.hpp"

#include <algorithm>
#include <cmath>

#include "appsim/errors.hpp"
#include "appsim/json_util.hpp"
#include "appsim/mechanism_engine.hpp"
#include "appsim/util.hpp"

namespace appsim {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ordered_json string_map_to_json(const std::map<std::string, std::string>& m) {
  ordered_json out = ordered_json::object();
  for (const auto& [k, v] : m) out[k] = v;
  return out;
}

std::map<std::string, std::string> string_map_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) {
    throw SpecError(SpecError::Code::BadType, "expected an object of strings", where);
  }
  std::map<std::string, std::string> out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_string()) {
      throw SpecError(SpecError::Code::BadType, "expected string value for '" + it.key() + "'",
                      where);
    }
    out[it.key()] = it.value().get<std::string>();
  }
  return out;
}

}  // namespace

ordered_json session_state_to_json(const SessionState& s) {
  ordered_json j;
  j["spec_id"] = s.spec_id;
  j["tick"] = s.tick;
  j["seed"] = s.seed;
  ordered_json joints = ordered_json::object();
  for (const auto& [k, v] : s.joints) joints[k] = v;
  j["joints"] = joints;
  ordered_json pressed = ordered_json::object();
  for (const auto& [k, v] : s.pressed) pressed[k] = v;
  j["pressed"] = pressed;
  ordered_json remainders = ordered_json::object();
  for (const auto& [k, v] : s.countdown_remainders) remainders[k] = v;
  j["countdown_remainders"] = remainders;
  ordered_json params = ordered_json::object();
  for (const auto& [k, v] : s.parameters) params[k] = param_value_to_json(v);
  j["parameters"] = params;
  j["screen_fields"] = string_map_to_json(s.screen_fields);
  j["indicators"] = string_map_to_json(s.indicators);
  j["lights"] = string_map_to_json(s.lights);
  j["motors"] = string_map_to_json(s.motors);
  j["held_object"] = s.held_object;
  return j;
}

SessionState session_state_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) {
    throw SpecError(SpecError::Code::BadType, "session state must be an object", where);
  }
  reject_unknown(j,
                 {"spec_id", "tick", "seed", "joints", "pressed", "countdown_remainders",
                  "parameters", "screen_fields", "indicators", "lights", "motors", "held_object"},
                 where);
  SessionState s;
  s.spec_id = get_string(j, "spec_id", where);
  s.tick = get_int(j, "tick", where);
  if (s.tick < 0) {
    throw SpecError(SpecError::Code::BadValue, "tick must be non-negative", where);
  }
  const json& seed = require(j, "seed", where);
  if (!seed.is_number_unsigned() && !seed.is_number_integer()) {
    throw SpecError(SpecError::Code::BadType, "'seed' must be an integer", where);
  }
  s.seed = seed.get<uint64_t>();
  const json& joints = require(j, "joints", where);
  if (!joints.is_object()) {
    throw SpecError(SpecError::Code::BadType, "'joints' must be an object", where);
  }
  for (auto it = joints.begin(); it != joints.end(); ++it) {
    if (!it.value().is_number()) {
      throw SpecError(SpecError::Code::BadType, "joint values must be numbers", where);
    }
    s.joints[it.key()] = it.value().get<double>();
  }
  const json& pressed = require(j, "pressed", where);
  if (!pressed.is_object()) {
    throw SpecError(SpecError::Code::BadType, "'pressed' must be an object", where);
  }
  for (auto it = pressed.begin(); it != pressed.end(); ++it) {
    if (!it.value().is_number_integer()) {
      throw SpecError(SpecError::Code::BadType, "pressed counts must be integers", where);
    }
    s.pressed[it.key()] = it.value().get<int64_t>();
  }
  const json& remainders = require(j, "countdown_remainders", where);
  if (!remainders.is_object()) {
    throw SpecError(SpecError::Code::BadType, "'countdown_remainders' must be an object", where);
  }
  for (auto it = remainders.begin(); it != remainders.end(); ++it) {
    if (!it.value().is_number_integer() || it.value().get<int64_t>() < 0) {
      throw SpecError(SpecError::Code::BadType, "remainders must be non-negative integers",
                      where);
    }
    s.countdown_remainders[it.key()] = it.value().get<int64_t>();
  }
  const json& params = require(j, "parameters", where);
  if (!params.is_object()) {
    throw SpecError(SpecError::Code::BadType, "'parameters' must be an object", where);
  }
  for (auto it = params.begin(); it != params.end(); ++it) {
    s.parameters[it.key()] = param_value_from_json(it.value(), where + ".parameters");
  }
  s.screen_fields = string_map_from_json(require(j, "screen_fields", where), where);
  s.indicators = string_map_from_json(require(j, "indicators", where), where);
  s.lights = string_map_from_json(require(j, "lights", where), where);
  s.motors = string_map_from_json(require(j, "motors", where), where);
  s.held_object = get_string(j, "held_object", where);
  return s;
}

std::string serialize_session_state(const SessionState& s) {
  return session_state_to_json(s).dump(2) + "\n";
}

std::string dynamics_key(const SessionState& s) {
  ordered_json j;
  ordered_json joints = ordered_json::object();
  for (const auto& [k, v] : s.joints) joints[k] = canon_num(v);
  j["joints"] = joints;
  ordered_json params = ordered_json::object();
  for (const auto& [k, v] : s.parameters) params[k] = param_value_to_json(v);
  j["parameters"] = params;
  ordered_json remainders = ordered_json::object();
  for (const auto& [k, v] : s.countdown_remainders) remainders[k] = v;
  j["countdown_remainders"] = remainders;
  j["screen_fields"] = string_map_to_json(s.screen_fields);
  j["indicators"] = string_map_to_json(s.indicators);
  j["lights"] = string_map_to_json(s.lights);
  j["motors"] = string_map_to_json(s.motors);
  j["held_object"] = s.held_object;
  return j.dump();
}

ordered_json observation_to_json(const Observation& o) {
  ordered_json j;
  j["tick"] = o.tick;
  ordered_json parts = ordered_json::array();
  for (const auto& p : o.parts) {
    ordered_json e;
    e["name"] = p.name;
    e["joint_value"] = p.joint_value;
    e["state_label"] = p.state_label;
    parts.push_back(e);
  }
  j["parts"] = parts;
  j["screen_text"] = o.screen_text;
  j["screen_fields"] = string_map_to_json(o.screen_fields);
  j["indicators"] = string_map_to_json(o.indicators);
  j["lights"] = string_map_to_json(o.lights);
  j["motors"] = string_map_to_json(o.motors);
  j["held_object"] = o.held_object;
  j["panel"] = {{"width", o.panel_width}, {"height", o.panel_height}};
  return j;
}

std::string observation_to_text(const Observation& o) {
  std::string out = "tick " + std::to_string(o.tick) + "\n";
  out += "held " + (o.held_object.empty() ? std::string("none") : o.held_object) + "\n";
  out += "screen " + (o.screen_text.empty() ? std::string("-") : o.screen_text) + "\n";
  for (const auto& p : o.parts) {
    out += "part " + p.name + " " + canon_num(p.joint_value);
    if (!p.state_label.empty()) out += " (" + p.state_label + ")";
    out += "\n";
  }
  for (const auto& [k, v] : o.lights) out += "light " + k + " " + v + "\n";
  for (const auto& [k, v] : o.indicators) out += "indicator " + k + " " + v + "\n";
  for (const auto& [k, v] : o.motors) out += "motor " + k + " " + v + "\n";
  return out;
}

ordered_json perturbation_to_json(const Perturbation& p) {
  ordered_json j;
  j["at_step"] = p.at_step;
  j["changes"] = effects_to_json(p.changes);
  return j;
}

Perturbation perturbation_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) {
    throw SpecError(SpecError::Code::BadType, "perturbation must be an object", where);
  }
  reject_unknown(j, {"at_step", "changes"}, where);
  Perturbation p;
  p.at_step = get_int(j, "at_step", where);
  if (p.at_step < 0) {
    throw SpecError(SpecError::Code::BadValue, "at_step must be non-negative", where);
  }
  p.changes = effects_from_json(require(j, "changes", where), where + ".changes");
  return p;
}

const char* to_string(ActionOutcome::Error e) {
  switch (e) {
    case ActionOutcome::Error::None: return "None";
    case ActionOutcome::Error::UnknownPart: return "UnknownPart";
    case ActionOutcome::Error::IncompatibleAction: return "IncompatibleAction";
    case ActionOutcome::Error::GuardViolation: return "GuardViolation";
    case ActionOutcome::Error::ParameterOutOfRange: return "ParameterOutOfRange";
    case ActionOutcome::Error::ObjectHandError: return "ObjectHandError";
  }
  return "?";
}

std::string trace_event_to_line(const TraceEvent& e) {
  ordered_json j;
  j["tick"] = e.tick;
  j["seq"] = e.seq;
  j["kind"] = e.kind;
  j["payload"] = e.payload;
  return j.dump();
}

Session::Session(const ApplianceSpec& spec) : spec_(&spec) {}

Session::Session(const ApplianceSpec& spec, uint64_t seed) : spec_(&spec) {
  st_.spec_id = spec.id;
  st_.seed = seed;
  for (const auto& part : spec.parts) {
    if (part.joint.movable()) {
      st_.joints[part.name] = part.joint.rest;
      if (part.joint.kind == JointKind::Prismatic) st_.pressed[part.name] = 0;
    }
    if (part.mechanism(MechanismKind::KnobCountdown)) {
      st_.countdown_remainders[part.name] = 0;
    }
  }
  for (const auto& param : spec.parameters) {
    st_.parameters[param.name] = param.initial;
  }
  init_registers();
  std::vector<Effect> applied;
  run_rule_fixpoint(&applied);
  refresh_electronics();
  pending_.clear();
}

void Session::init_registers() {
  for (const auto& part : spec_->parts) {
    for (const auto& m : part.mechanisms) {
      switch (m.kind) {
        case MechanismKind::ScreenDisplay:
          for (const auto& f : m.as<ScreenConfig>().fields) st_.screen_fields[f] = "";
          break;
        case MechanismKind::Illumination:
          st_.lights[part.name] = "off";
          break;
        case MechanismKind::LogoIndicator:
          st_.indicators[part.name] = "off";
          break;
        case MechanismKind::RotaryMotor:
          st_.motors[part.name] = "stopped";
          break;
        default:
          break;
      }
    }
  }
}

Session Session::restore(const ApplianceSpec& spec, const SessionState& state) {
  if (state.spec_id != spec.id) {
    throw SchemaMismatch("state belongs to spec '" + state.spec_id + "', not '" + spec.id + "'");
  }
  auto fail = [](const std::string& msg) { throw SchemaMismatch(msg); };
  for (const auto& part : spec.parts) {
    if (!part.joint.movable()) continue;
    auto it = state.joints.find(part.name);
    if (it == state.joints.end()) fail("state lacks joint value for part '" + part.name + "'");
    if (it->second < part.joint.lo - 1e-9 || it->second > part.joint.hi + 1e-9) {
      fail("joint value for part '" + part.name + "' outside limits");
    }
  }
  for (const auto& [name, value] : state.joints) {
    const PartSpec* part = spec.part(name);
    if (!part || !part->joint.movable()) fail("state names unknown joint '" + name + "'");
    (void)value;
  }
  for (const auto& [name, count] : state.pressed) {
    if (!spec.part(name) || count < 0) fail("bad pressed entry '" + name + "'");
  }
  for (const auto& [name, rem] : state.countdown_remainders) {
    const PartSpec* part = spec.part(name);
    if (!part || !part->mechanism(MechanismKind::KnobCountdown) || rem < 0) {
      fail("bad countdown remainder entry '" + name + "'");
    }
  }
  for (const auto& param : spec.parameters) {
    auto it = state.parameters.find(param.name);
    if (it == state.parameters.end()) fail("state lacks parameter '" + param.name + "'");
    if (!param.value_in_domain(it->second)) {
      fail("parameter '" + param.name + "' value outside domain");
    }
  }
  for (const auto& [name, value] : state.parameters) {
    if (!spec.parameter(name)) fail("state names unknown parameter '" + name + "'");
    (void)value;
  }
  if (!state.held_object.empty() && !spec.has_object(state.held_object)) {
    fail("held object '" + state.held_object + "' is not declared");
  }
  Session s(spec);
  s.st_ = state;
  return s;
}

double Session::joint_value(const std::string& part) const {
  auto it = st_.joints.find(part);
  return it == st_.joints.end() ? 0.0 : it->second;
}

std::string Session::state_label(const std::string& part) const {
  const PartSpec* p = spec_->part(part);
  if (!p || !p->joint.movable()) return "";
  auto label = p->label_at(joint_value(part));
  return label ? *label : "";
}

ParamValue Session::parameter_value(const std::string& name) const {
  auto it = st_.parameters.find(name);
  return it == st_.parameters.end() ? ParamValue(int64_t{0}) : it->second;
}

void Session::emit(const std::string& kind, ordered_json payload) {
  pending_.push_back(TraceEvent{st_.tick, 0, kind, std::move(payload)});
}

void Session::flush_header(const std::string& kind, ordered_json payload) {
  flush_with_head(TraceEvent{st_.tick, 0, kind, std::move(payload)});
}

void Session::flush_with_head(TraceEvent head) {
  if (!sink_) {
    pending_.clear();
    return;
  }
  head.seq = seq_++;
  sink_->emit(head);
  for (auto& e : pending_) {
    e.seq = seq_++;
    sink_->emit(e);
  }
  pending_.clear();
}

void Session::trace_effect(const Effect& e) {
  if (sink_) emit("effect", effect_to_json(e));
}

void Session::reset_countdown_remainder(const std::string& part) {
  auto it = st_.countdown_remainders.find(part);
  if (it != st_.countdown_remainders.end()) it->second = 0;
}

bool Session::set_joint(const std::string& part, double value, Cause cause,
                        std::vector<Effect>* applied) {
  auto it = st_.joints.find(part);
  if (it == st_.joints.end()) {
    throw InvalidEffect("part '" + part + "' has no movable joint");
  }
  if (cause != Cause::Tick) reset_countdown_remainder(part);
  if (it->second == value) return false;
  it->second = value;
  Effect e{EffectTarget::PartState, part, value};
  if (applied) applied->push_back(e);
  trace_effect(e);
  return true;
}

void Session::set_parameter(const std::string& name, const ParamValue& value, Cause cause,
                            std::vector<Effect>* applied) {
  (void)cause;
  const SettingParameter* param = spec_->parameter(name);
  if (!param) throw InvalidEffect("unknown parameter '" + name + "'");
  if (!param->value_in_domain(value)) {
    throw InvalidEffect("value outside domain of parameter '" + name + "'");
  }
  auto it = st_.parameters.find(name);
  if (param_value_equal(it->second, value)) return;
  it->second = value;
  Effect e{EffectTarget::Parameter, name, value};
  if (applied) applied->push_back(e);
  trace_effect(e);
}

bool Session::set_register(std::map<std::string, std::string>& reg, EffectTarget target,
                           const std::string& name, const std::string& value, Cause cause,
                           std::vector<Effect>* applied) {
  (void)cause;
  auto it = reg.find(name);
  if (it != reg.end() && it->second == value) return false;
  reg[name] = value;
  Effect e{EffectTarget(target), name, value};
  if (applied) applied->push_back(e);
  trace_effect(e);
  return true;
}

void Session::apply_effect(const Effect& e, Cause cause, std::vector<Effect>* applied) {
  switch (e.target) {
    case EffectTarget::Parameter:
      set_parameter(e.name, e.value, cause, applied);
      break;
    case EffectTarget::PartState: {
      const PartSpec* part = spec_->part(e.name);
      if (!part || !part->joint.movable()) {
        throw InvalidEffect("part_state effect on unknown or fixed part '" + e.name + "'");
      }
      double position;
      if (std::holds_alternative<std::string>(e.value)) {
        auto pos = part->position_of(std::get<std::string>(e.value));
        if (!pos) {
          throw InvalidEffect("'" + std::get<std::string>(e.value) +
                              "' is not a state label of part '" + e.name + "'");
        }
        position = *pos;
      } else {
        position = *numeric_value(e.value);
        if (position < part->joint.lo - 1e-9 || position > part->joint.hi + 1e-9) {
          throw InvalidEffect("joint value for part '" + e.name + "' outside limits");
        }
      }
      set_joint(e.name, position, cause, applied);
      break;
    }
    case EffectTarget::ScreenField:
      set_register(st_.screen_fields, e.target, e.name, std::get<std::string>(e.value), cause,
                   applied);
      break;
    case EffectTarget::Indicator:
      set_register(st_.indicators, e.target, e.name, std::get<std::string>(e.value), cause,
                   applied);
      break;
    case EffectTarget::Light:
      set_register(st_.lights, e.target, e.name, std::get<std::string>(e.value), cause, applied);
      break;
    case EffectTarget::Motor:
      set_register(st_.motors, e.target, e.name, std::get<std::string>(e.value), cause, applied);
      break;
  }
}

void Session::run_rule_fixpoint(std::vector<Effect>* applied) {
  const std::vector<int> order = spec_->rule_order();
  auto effect_pending = [this](const Effect& e) {
    switch (e.target) {
      case EffectTarget::Parameter: {
        auto it = st_.parameters.find(e.name);
        return it == st_.parameters.end() || !param_value_equal(it->second, e.value);
      }
      case EffectTarget::PartState: {
        const PartSpec* part = spec_->part(e.name);
        if (!part) return false;
        double position = std::holds_alternative<std::string>(e.value)
                              ? part->position_of(std::get<std::string>(e.value)).value_or(0.0)
                              : *numeric_value(e.value);
        return joint_value(e.name) != position;
      }
      case EffectTarget::ScreenField: {
        auto it = st_.screen_fields.find(e.name);
        return it == st_.screen_fields.end() || it->second != std::get<std::string>(e.value);
      }
      case EffectTarget::Indicator: {
        auto it = st_.indicators.find(e.name);
        return it == st_.indicators.end() || it->second != std::get<std::string>(e.value);
      }
      case EffectTarget::Light: {
        auto it = st_.lights.find(e.name);
        return it == st_.lights.end() || it->second != std::get<std::string>(e.value);
      }
      case EffectTarget::Motor: {
        auto it = st_.motors.find(e.name);
        return it == st_.motors.end() || it->second != std::get<std::string>(e.value);
      }
    }
    return false;
  };

  int applications = 0;
  while (true) {
    const LogicRule* fired = nullptr;
    for (int idx : order) {
      const LogicRule& rule = spec_->rules[idx];
      if (!eval_predicate(rule.when, *this)) continue;
      bool pending = false;
      for (const auto& e : rule.then) pending = pending || effect_pending(e);
      if (!pending) continue;
      fired = &rule;
      break;
    }
    if (!fired) return;
    if (applications >= 8) {
      throw RuleOscillation("rule fixpoint did not settle within 8 applications; last rule '" +
                            fired->id + "'");
    }
    if (sink_) emit("rule_fire", {{"rule", fired->id}});
    for (const auto& e : fired->then) apply_effect(e, Cause::Rule, applied);
    ++applications;
  }
}

bool Session::settle_springs(std::vector<Effect>* applied) {
  bool changed = false;
  for (const auto& part : spec_->parts) {
    const MechanismConfig* m = part.mechanism(MechanismKind::InnerSpring);
    if (!m) continue;
    std::vector<Effect> effects =
        handle_event(part, *m, tick_event(std::min(settle_budget_,
                                                   m->as<SpringConfig>().return_ticks)),
                     *this);
    for (const auto& e : effects) {
      apply_effect(e, Cause::Settle, applied);
      changed = true;
    }
  }
  return changed;
}

void Session::refresh_electronics(const std::vector<Effect>* keep) {
  auto kept = [keep](const Effect& e) {
    if (!keep) return false;
    for (const auto& k : *keep) {
      if (k.target == e.target && k.name == e.name) return true;
    }
    return false;
  };
  for (const auto& part : spec_->parts) {
    for (const auto& m : part.mechanisms) {
      if (m.kind != MechanismKind::ScreenDisplay && m.kind != MechanismKind::Illumination &&
          m.kind != MechanismKind::LogoIndicator && m.kind != MechanismKind::RotaryMotor) {
        continue;
      }
      for (const auto& e : handle_event(part, m, tick_event(0), *this)) {
        if (kept(e)) continue;
        apply_effect(e, Cause::Refresh, nullptr);
      }
    }
  }
}

ActionOutcome Session::execute_action(const AtomicAction& action) {
  ActionOutcome out;
  SessionState before = st_;
  pending_.clear();

  auto reject = [&](ActionOutcome::Error err, const std::string& msg) {
    st_ = std::move(before);
    pending_.clear();
    out.ok = false;
    out.error = err;
    out.message = msg;
    flush_header("action", {{"text", format_action(action)},
                            {"status", "rejected"},
                            {"error", to_string(err)},
                            {"message", msg}});
    out.observation = observe();
    return out;
  };

  try {
    std::vector<Effect> applied;
    if (is_object_action(action.kind)) {
      const std::string& obj = action.object;
      if (!spec_->has_object(obj)) {
        return reject(ActionOutcome::Error::UnknownPart, "unknown object '" + obj + "'");
      }
      switch (action.kind) {
        case ActionKind::Pick:
          if (!st_.held_object.empty()) {
            return reject(ActionOutcome::Error::ObjectHandError,
                          "hand already holds '" + st_.held_object + "'");
          }
          st_.held_object = obj;
          break;
        case ActionKind::Place:
          if (st_.held_object != obj) {
            return reject(ActionOutcome::Error::ObjectHandError,
                          "hand does not hold '" + obj + "'");
          }
          st_.held_object.clear();
          break;
        case ActionKind::Move:
          if (!st_.held_object.empty()) {
            return reject(ActionOutcome::Error::ObjectHandError,
                          "cannot move '" + obj + "' while holding '" + st_.held_object + "'");
          }
          break;
        case ActionKind::Pour: {
          if (st_.held_object != obj) {
            return reject(ActionOutcome::Error::ObjectHandError,
                          "hand does not hold '" + obj + "'");
          }
          if (!spec_->part(action.part)) {
            return reject(ActionOutcome::Error::UnknownPart,
                          "unknown part '" + action.part + "'");
          }
          break;
        }
        default:
          break;
      }
      run_rule_fixpoint(&applied);
      refresh_electronics();
    } else {
      const PartSpec* part = spec_->part(action.part);
      if (!part) {
        return reject(ActionOutcome::Error::UnknownPart, "unknown part '" + action.part + "'");
      }

      // Kind/joint compatibility.
      bool compatible = true;
      std::string why;
      switch (action.kind) {
        case ActionKind::Press:
        case ActionKind::Slide:
        case ActionKind::Pull:
        case ActionKind::Push:
          compatible = part->joint.kind == JointKind::Prismatic;
          why = "needs a prismatic joint";
          break;
        case ActionKind::Rotate:
          compatible = part->joint.kind == JointKind::Revolute;
          why = "needs a revolute joint";
          break;
        case ActionKind::Flip:
          compatible =
              part->joint.kind == JointKind::Revolute && part->state_labels.size() == 2;
          why = "needs a two-position revolute joint";
          break;
        case ActionKind::Open:
        case ActionKind::Close:
          compatible = part->joint.movable() && part->position_of("open").has_value() &&
                       part->position_of("closed").has_value();
          why = "needs a movable joint with open/closed labels";
          break;
        case ActionKind::Touch:
          compatible = part->joint.kind == JointKind::Fixed &&
                       part->mechanism(MechanismKind::TouchSensing) != nullptr;
          why = "needs a fixed touch-sensing part";
          break;
        default:
          break;
      }
      if (!compatible) {
        return reject(ActionOutcome::Error::IncompatibleAction,
                      std::string(to_string(action.kind)) + " on '" + part->name + "' " + why);
      }

      // Safety locks and magnets on the target part inspect the action first.
      for (const auto& m : part->mechanisms) {
        if (m.kind == MechanismKind::SafetyLock || m.kind == MechanismKind::MagneticAttraction) {
          handle_event(*part, m, action_event(action), *this);
        }
      }

      double target = 0.0;
      bool moves = true;
      switch (action.kind) {
        case ActionKind::Press:
        case ActionKind::Slide:
        case ActionKind::Flip:
        case ActionKind::Rotate: {
          auto pos = part->position_of(action.target_state);
          if (!pos) {
            return reject(ActionOutcome::Error::ParameterOutOfRange,
                          "'" + action.target_state + "' is not a state label of '" +
                              part->name + "'");
          }
          if (action.kind == ActionKind::Rotate) {
            double landing = joint_value(part->name) + action.degrees;
            if (std::abs(landing - *pos) > 1e-6) {
              return reject(ActionOutcome::Error::ParameterOutOfRange,
                            "rotation of " + canon_decimal(action.degrees) +
                                " does not land on '" + action.target_state + "'");
            }
          }
          target = *pos;
          break;
        }
        case ActionKind::Open:
          target = *part->position_of("open");
          break;
        case ActionKind::Close:
          target = *part->position_of("closed");
          break;
        case ActionKind::Pull:
          target = part->joint.hi;
          break;
        case ActionKind::Push:
          target = part->joint.lo;
          break;
        case ActionKind::Touch:
          moves = false;
          break;
        default:
          moves = false;
          break;
      }

      std::vector<MechanismEvent> events;
      events.push_back(action_event(action));
      if (moves) {
        std::string old_label = state_label(part->name);
        set_joint(part->name, target, Cause::Action, &applied);
        if (action.kind == ActionKind::Press) {
          st_.pressed[part->name] += action.times;
        }
        std::string new_label = state_label(part->name);
        if (!new_label.empty() && new_label != old_label) {
          events.push_back(state_event(part->name, new_label));
        }
      }
      if (action.kind == ActionKind::Touch) {
        const MechanismConfig* touch = part->mechanism(MechanismKind::TouchSensing);
        for (const auto& e : handle_event(*part, *touch, action_event(action), *this)) {
          apply_effect(e, Cause::Action, &applied);
        }
      }

      for (const auto& firing : trigger_propagate(*spec_, events, *this)) {
        apply_effect(firing.effect, Cause::Trigger, &applied);
      }

      run_rule_fixpoint(&applied);
      for (int i = 0; i < 4; ++i) {
        if (!settle_springs(&applied)) break;
        run_rule_fixpoint(&applied);
      }
      refresh_electronics();
    }

    out.ok = true;
    out.effects_applied = std::move(applied);
    flush_header("action", {{"text", format_action(action)}, {"status", "ok"}});
    out.observation = observe();
    return out;
  } catch (const GuardViolation& g) {
    return reject(ActionOutcome::Error::GuardViolation, g.what());
  } catch (...) {
    // Oscillation or cascade overflow mark a defective spec; validation keeps
    // bundled specs clear of both. Leave the session as it was.
    st_ = std::move(before);
    pending_.clear();
    throw;
  }
}

Observation Session::step(int64_t n_ticks) {
  pending_.clear();
  int64_t start_tick = st_.tick;
  for (int64_t t = 0; t < n_ticks; ++t) {
    ++st_.tick;
    for (const auto& part : spec_->parts) {
      for (const auto& m : part.mechanisms) {
        switch (m.kind) {
          case MechanismKind::InnerSpring:
          case MechanismKind::RotaryMotor:
            for (const auto& e : handle_event(part, m, tick_event(1), *this)) {
              apply_effect(e, Cause::Tick, nullptr);
            }
            break;
          case MechanismKind::KnobCountdown: {
            const auto& c = m.as<CountdownConfig>();
            int64_t index = -1;
            double v = joint_value(part.name);
            for (size_t d = 0; d < part.joint.detents.size(); ++d) {
              if (std::abs(part.joint.detents[d] - v) <= 1e-9) {
                index = static_cast<int64_t>(d);
                break;
              }
            }
            if (index <= 0) break;
            CountdownStep stepped =
                countdown_advance(c, index, st_.countdown_remainders[part.name], 1);
            if (stepped.detent_index != index) {
              set_joint(part.name, part.joint.detents[stepped.detent_index], Cause::Tick,
                        nullptr);
            }
            st_.countdown_remainders[part.name] = stepped.remainder;
            if (stepped.fired_zero) {
              for (const auto& e : c.on_zero) apply_effect(e, Cause::Tick, nullptr);
            }
            break;
          }
          default:
            break;
        }
      }
    }
    run_rule_fixpoint(nullptr);
    refresh_electronics();
  }
  TraceEvent head{start_tick, 0, "tick", ordered_json{{"n", n_ticks}}};
  flush_with_head(head);
  return observe();
}

Observation Session::apply_perturbation(const Perturbation& p) {
  pending_.clear();
  for (const auto& e : p.changes) {
    apply_effect(e, Cause::Perturbation, nullptr);
  }
  run_rule_fixpoint(nullptr);
  refresh_electronics(&p.changes);
  flush_header("perturbation", {{"changes", effects_to_json(p.changes)}});
  return observe();
}

Observation Session::observe() const {
  Observation o;
  o.tick = st_.tick;
  for (const auto& part : spec_->parts) {
    PartObservation po;
    po.name = part.name;
    po.joint_value = part.joint.movable() ? joint_value(part.name) : 0.0;
    po.state_label = state_label(part.name);
    o.parts.push_back(po);
  }
  std::vector<std::string> owned_parts_text;
  std::vector<std::string> owned;
  for (const auto& part : spec_->parts) {
    const MechanismConfig* m = part.mechanism(MechanismKind::ScreenDisplay);
    if (!m) continue;
    for (const auto& field : m->as<ScreenConfig>().fields) {
      auto it = st_.screen_fields.find(field);
      if (it != st_.screen_fields.end()) {
        owned_parts_text.push_back(field + ": " + it->second);
        owned.push_back(field);
      }
    }
  }
  for (const auto& [name, text] : st_.screen_fields) {
    if (std::find(owned.begin(), owned.end(), name) == owned.end()) {
      owned_parts_text.push_back(name + ": " + text);
    }
  }
  o.screen_text = join(owned_parts_text, " | ");
  o.screen_fields = st_.screen_fields;
  o.indicators = st_.indicators;
  o.lights = st_.lights;
  o.motors = st_.motors;
  o.held_object = st_.held_object;
  o.panel_width = spec_->panel.width;
  o.panel_height = spec_->panel.height;
  return o;
}

}  // namespace appsim
