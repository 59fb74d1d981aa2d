#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "appsim/actions.hpp"
#include "appsim/spec.hpp"
#include "appsim/view.hpp"

namespace appsim {

// What mechanisms react to. Exactly one payload is meaningful per kind.
struct MechanismEvent {
  enum class Kind { ActionApplied, TickElapsed, StateEntered };
  Kind kind = Kind::TickElapsed;
  AtomicAction action;   // ActionApplied
  int64_t ticks = 0;     // TickElapsed
  std::string part;      // StateEntered
  std::string label;     // StateEntered
};

MechanismEvent action_event(const AtomicAction& a);
MechanismEvent tick_event(int64_t ticks);
MechanismEvent state_event(const std::string& part, const std::string& label);

// Pure policy dispatch for one mechanism. host is the part carrying the
// mechanism. Throws GuardViolation when a safety lock or magnet refuses the
// event's action; otherwise returns the effects the mechanism wants applied.
std::vector<Effect> handle_event(const PartSpec& host, const MechanismConfig& config,
                                 const MechanismEvent& event, const SessionView& view);

struct CountdownStep {
  int64_t detent_index = 0;
  int64_t remainder = 0;  // ticks accumulated toward the next decrement
  bool fired_zero = false;
};

// Advances a countdown that sits at detent_index with `remainder` ticks
// already accumulated. fired_zero is set exactly when the index reaches 0
// within this call.
CountdownStep countdown_advance(const CountdownConfig& config, int64_t detent_index,
                                int64_t remainder, int64_t ticks);

// Runs the mechanical trigger cascade for an initial batch of events. Fires
// matching triggers in part-declaration order; state changes made by trigger
// effects feed back as further events. The cap (trigger count + 1) guards
// against cycles that slipped past validation.
struct TriggerFiring {
  std::string host;  // part declaring the trigger
  Effect effect;
};
std::vector<TriggerFiring> trigger_propagate(const ApplianceSpec& spec,
                                             const std::vector<MechanismEvent>& initial,
                                             const SessionView& view);

// New joint value after `ticks` of motor drive; identity while on_when is
// false. Full-circle revolute joints wrap modulo their span, others clamp.
double motor_advance(const MotorConfig& config, const JointSpec& joint, double joint_value,
                     int64_t ticks, const SessionView& view);

// Rendered text for one screen field: the format template with {name},
// {value} and {unit} substituted.
std::string render_screen_field(const ScreenConfig& config, const SettingParameter& param,
                                const ParamValue& value);

}  // namespace appsim
