#include "appsim/mechanism_engine.hpp"

#include <cmath>
#include <deque>
#include <map>

#include "appsim/errors.hpp"
#include "appsim/util.hpp"

namespace appsim {

namespace {

// Action kinds that reposition the target part's joint.
bool moves_joint(ActionKind k) {
  switch (k) {
    case ActionKind::Press:
    case ActionKind::Rotate:
    case ActionKind::Open:
    case ActionKind::Close:
    case ActionKind::Slide:
    case ActionKind::Flip:
    case ActionKind::Pull:
    case ActionKind::Push:
      return true;
    default:
      return false;
  }
}

// Where the action wants the joint; nullopt when the target cannot be
// resolved (the executor rejects that separately).
std::optional<double> intended_position(const PartSpec& part, const AtomicAction& a) {
  switch (a.kind) {
    case ActionKind::Press:
    case ActionKind::Rotate:
    case ActionKind::Slide:
    case ActionKind::Flip:
      return part.position_of(a.target_state);
    case ActionKind::Open:
      return part.position_of("open");
    case ActionKind::Close:
      return part.position_of("closed");
    case ActionKind::Pull:
      return part.joint.hi;
    case ActionKind::Push:
      return part.joint.lo;
    default:
      return std::nullopt;
  }
}

double spring_step(const SpringConfig& c, const JointSpec& joint) {
  double span = std::max(joint.hi - joint.rest, joint.rest - joint.lo);
  return span / static_cast<double>(c.return_ticks);
}

bool spring_latched(const SpringConfig& c, const SessionView& view) {
  if (c.latch_param.empty()) return false;
  const SettingParameter* param = view.spec().parameter(c.latch_param);
  if (!param) return false;
  return latch_engaged(*param, view.parameter_value(c.latch_param));
}

bool pattern_matches(const EventPattern& p, const MechanismEvent& e) {
  if (p.kind == EventPattern::Kind::Press) {
    return e.kind == MechanismEvent::Kind::ActionApplied && e.action.kind == ActionKind::Press &&
           e.action.part == p.part;
  }
  return e.kind == MechanismEvent::Kind::StateEntered && e.part == p.part && e.label == p.state;
}

}  // namespace

MechanismEvent action_event(const AtomicAction& a) {
  MechanismEvent e;
  e.kind = MechanismEvent::Kind::ActionApplied;
  e.action = a;
  return e;
}

MechanismEvent tick_event(int64_t ticks) {
  MechanismEvent e;
  e.kind = MechanismEvent::Kind::TickElapsed;
  e.ticks = ticks;
  return e;
}

MechanismEvent state_event(const std::string& part, const std::string& label) {
  MechanismEvent e;
  e.kind = MechanismEvent::Kind::StateEntered;
  e.part = part;
  e.label = label;
  return e;
}

std::vector<Effect> handle_event(const PartSpec& host, const MechanismConfig& config,
                                 const MechanismEvent& event, const SessionView& view) {
  std::vector<Effect> effects;
  switch (config.kind) {
    case MechanismKind::InnerSpring: {
      if (event.kind != MechanismEvent::Kind::TickElapsed) break;
      const auto& c = config.as<SpringConfig>();
      if (spring_latched(c, view)) break;
      double v = view.joint_value(host.name);
      double rest = host.joint.rest;
      if (v == rest) break;
      double step = spring_step(c, host.joint) * static_cast<double>(event.ticks);
      double next = v > rest ? std::max(rest, v - step) : std::min(rest, v + step);
      if (next != v) {
        effects.push_back({EffectTarget::PartState, host.name, next});
      }
      break;
    }
    case MechanismKind::MagneticAttraction: {
      if (event.kind != MechanismEvent::Kind::ActionApplied) break;
      const AtomicAction& a = event.action;
      if (a.part != host.name || !moves_joint(a.kind)) break;
      const auto& c = config.as<MagnetConfig>();
      if (!eval_predicate(c.hold, view)) break;
      auto target = intended_position(host, a);
      if (target && std::abs(*target - view.joint_value(host.name)) <= 1e-9) break;
      throw GuardViolation(host.name, to_string(config.kind),
                           "part '" + host.name + "' is magnetically held in place");
    }
    case MechanismKind::SafetyLock: {
      if (event.kind != MechanismEvent::Kind::ActionApplied) break;
      const AtomicAction& a = event.action;
      if (a.part != host.name) break;
      const auto& c = config.as<SafetyLockConfig>();
      bool blocked = false;
      for (ActionKind k : c.blocks) blocked = blocked || k == a.kind;
      if (blocked && !eval_predicate(c.unlocked_when, view)) {
        throw GuardViolation(host.name, to_string(config.kind),
                             std::string(to_string(a.kind)) + " on '" + host.name +
                                 "' is blocked by the safety lock");
      }
      break;
    }
    case MechanismKind::ScreenDisplay: {
      const auto& c = config.as<ScreenConfig>();
      for (const auto& field : c.fields) {
        const SettingParameter* param = view.spec().parameter(field);
        if (!param) continue;
        effects.push_back({EffectTarget::ScreenField, field,
                           render_screen_field(c, *param, view.parameter_value(field))});
      }
      break;
    }
    case MechanismKind::TouchSensing: {
      if (event.kind != MechanismEvent::Kind::ActionApplied) break;
      const AtomicAction& a = event.action;
      if (a.kind != ActionKind::Touch || a.part != host.name) break;
      const auto& c = config.as<TouchConfig>();
      for (int64_t i = 0; i < a.times; ++i) {
        effects.insert(effects.end(), c.effects.begin(), c.effects.end());
      }
      break;
    }
    case MechanismKind::Illumination: {
      const auto& c = config.as<IlluminationConfig>();
      effects.push_back({EffectTarget::Light, host.name,
                         std::string(eval_predicate(c.on_when, view) ? "on" : "off")});
      break;
    }
    case MechanismKind::LogoIndicator: {
      const auto& c = config.as<IndicatorConfig>();
      std::string mode = "off";
      for (const auto& m : c.mode_when) {
        if (eval_predicate(m.when, view)) {
          mode = m.mode;
          break;
        }
      }
      effects.push_back({EffectTarget::Indicator, host.name, mode});
      break;
    }
    case MechanismKind::RotaryMotor: {
      const auto& c = config.as<MotorConfig>();
      bool running = eval_predicate(c.on_when, view);
      if (event.kind == MechanismEvent::Kind::TickElapsed && running) {
        const PartSpec* driven = view.spec().part(c.joint);
        if (driven) {
          double v = view.joint_value(c.joint);
          double next = motor_advance(c, driven->joint, v, event.ticks, view);
          if (next != v) {
            effects.push_back({EffectTarget::PartState, c.joint, next});
          }
        }
      }
      effects.push_back({EffectTarget::Motor, host.name,
                         std::string(running ? "running" : "stopped")});
      break;
    }
    case MechanismKind::KnobCountdown:
    case MechanismKind::MechanicalTrigger:
      // Driven by countdown_advance / trigger_propagate, which own the
      // session-held remainder and cascade bookkeeping.
      break;
  }
  return effects;
}

CountdownStep countdown_advance(const CountdownConfig& config, int64_t detent_index,
                                int64_t remainder, int64_t ticks) {
  CountdownStep out;
  if (detent_index <= 0) {
    return out;  // absorbing state
  }
  int64_t total = remainder + ticks;
  int64_t dec = total / config.ticks_per_detent;
  out.detent_index = detent_index - dec;
  out.remainder = total % config.ticks_per_detent;
  if (out.detent_index <= 0) {
    out.detent_index = 0;
    out.remainder = 0;
    out.fired_zero = true;
  }
  return out;
}

std::vector<TriggerFiring> trigger_propagate(const ApplianceSpec& spec,
                                             const std::vector<MechanismEvent>& initial,
                                             const SessionView& view) {
  struct Entry {
    const PartSpec* host;
    const TriggerConfig* config;
  };
  std::vector<Entry> triggers;
  for (const auto& part : spec.parts) {
    if (const MechanismConfig* m = part.mechanism(MechanismKind::MechanicalTrigger)) {
      triggers.push_back({&part, &m->as<TriggerConfig>()});
    }
  }
  std::vector<TriggerFiring> firings;
  if (triggers.empty()) return firings;

  // Labels changed by the cascade so far; downstream matching sees them.
  std::map<std::string, std::string> overlay;
  auto current_label = [&](const std::string& part) {
    auto it = overlay.find(part);
    return it != overlay.end() ? it->second : view.state_label(part);
  };

  size_t cap = triggers.size() + 1;
  std::deque<MechanismEvent> queue(initial.begin(), initial.end());
  while (!queue.empty()) {
    MechanismEvent event = queue.front();
    queue.pop_front();
    for (const auto& [host, config] : triggers) {
      if (!pattern_matches(config->on, event)) continue;
      if (!eval_predicate(config->guard, view)) continue;
      const std::string& label = std::get<std::string>(config->effect.value);
      if (current_label(config->target) == label) continue;  // no-op, nothing fires
      if (firings.size() + 1 > cap) {
        throw CascadeLimitExceeded("trigger cascade exceeded " + std::to_string(cap) +
                                   " firings; trigger graph is cyclic");
      }
      firings.push_back({host->name, config->effect});
      overlay[config->target] = label;
      queue.push_back(state_event(config->target, label));
    }
  }
  return firings;
}

double motor_advance(const MotorConfig& config, const JointSpec& joint, double joint_value,
                     int64_t ticks, const SessionView& view) {
  if (!eval_predicate(config.on_when, view)) return joint_value;
  double v = joint_value + config.rate * static_cast<double>(ticks);
  double span = joint.hi - joint.lo;
  if (joint.kind == JointKind::Revolute && span == 360.0) {
    double wrapped = std::fmod(v - joint.lo, span);
    if (wrapped < 0) wrapped += span;
    return joint.lo + wrapped;
  }
  return std::min(joint.hi, std::max(joint.lo, v));
}

std::string render_screen_field(const ScreenConfig& config, const SettingParameter& param,
                                const ParamValue& value) {
  std::string out = config.format;
  auto replace_all = [&out](const std::string& token, const std::string& text) {
    size_t pos = 0;
    while ((pos = out.find(token, pos)) != std::string::npos) {
      out.replace(pos, token.size(), text);
      pos += text.size();
    }
  };
  replace_all("{name}", param.name);
  replace_all("{value}", param_value_to_text(value));
  replace_all("{unit}", param.unit);
  return out;
}

}  // namespace appsim
