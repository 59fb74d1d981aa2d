#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "appsim/actions.hpp"
#include "appsim/spec.hpp"
#include "appsim/value.hpp"
#include "appsim/view.hpp"
#include "json.hpp"

namespace appsim {

// Full mutable state of one appliance run. Keys are declared names, so the
// canonical JSON form is stable under map ordering.
struct SessionState {
  std::string spec_id;
  int64_t tick = 0;
  uint64_t seed = 0;
  std::map<std::string, double> joints;                  // movable parts
  std::map<std::string, int64_t> pressed;                // prismatic parts
  std::map<std::string, int64_t> countdown_remainders;   // countdown hosts
  std::map<std::string, ParamValue> parameters;
  std::map<std::string, std::string> screen_fields;
  std::map<std::string, std::string> indicators;
  std::map<std::string, std::string> lights;
  std::map<std::string, std::string> motors;
  std::string held_object;  // empty: hand free

  bool operator==(const SessionState&) const = default;
};

nlohmann::ordered_json session_state_to_json(const SessionState& s);
SessionState session_state_from_json(const nlohmann::json& j, const std::string& where);
std::string serialize_session_state(const SessionState& s);

// The part of the state that determines future behavior: everything except
// tick, press counters and seed. State-graph nodes are keyed by this.
std::string dynamics_key(const SessionState& s);

struct PartObservation {
  std::string name;
  double joint_value = 0.0;
  std::string state_label;  // empty between labels and for fixed joints
};

struct Observation {
  int64_t tick = 0;
  std::vector<PartObservation> parts;  // declaration order
  std::string screen_text;
  std::map<std::string, std::string> screen_fields;
  std::map<std::string, std::string> indicators;
  std::map<std::string, std::string> lights;
  std::map<std::string, std::string> motors;
  std::string held_object;
  int64_t panel_width = 0;
  int64_t panel_height = 0;
};

nlohmann::ordered_json observation_to_json(const Observation& o);
std::string observation_to_text(const Observation& o);

struct Perturbation {
  int64_t at_step = 0;  // index into plan execution
  std::vector<Effect> changes;

  bool operator==(const Perturbation&) const = default;
};

nlohmann::ordered_json perturbation_to_json(const Perturbation& p);
Perturbation perturbation_from_json(const nlohmann::json& j, const std::string& where);

struct ActionOutcome {
  enum class Error {
    None,
    UnknownPart,
    IncompatibleAction,
    GuardViolation,
    ParameterOutOfRange,
    ObjectHandError,
  };
  bool ok = false;
  Error error = Error::None;
  std::string message;
  std::vector<Effect> effects_applied;
  Observation observation;
};

const char* to_string(ActionOutcome::Error e);

struct TraceEvent {
  int64_t tick = 0;
  int64_t seq = 0;
  std::string kind;  // action | tick | perturbation | rule_fire | effect
  nlohmann::ordered_json payload;
};

std::string trace_event_to_line(const TraceEvent& e);

class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void emit(const TraceEvent& e) = 0;
};

// Collects trace lines in memory; the CLI flushes them to .trace.jsonl files.
class TraceBuffer final : public TraceSink {
 public:
  void emit(const TraceEvent& e) override { lines_ += trace_event_to_line(e) + "\n"; }
  const std::string& text() const { return lines_; }
  void clear() { lines_.clear(); }

 private:
  std::string lines_;
};

class Session final : public SessionView {
 public:
  // Fresh session: joints at rest, parameters at initials, rules fixpointed.
  Session(const ApplianceSpec& spec, uint64_t seed);
  static Session restore(const ApplianceSpec& spec, const SessionState& state);

  const ApplianceSpec& spec() const override { return *spec_; }
  double joint_value(const std::string& part) const override;
  std::string state_label(const std::string& part) const override;
  ParamValue parameter_value(const std::string& name) const override;

  // Magic manipulation: validation, direct effect, trigger cascade, rule
  // fixpoint and spring rebound all land within the current tick. Atomic:
  // a rejected action leaves the session untouched.
  ActionOutcome execute_action(const AtomicAction& action);

  // Advances time tick by tick: springs relax, countdowns run, motors turn,
  // rules re-fixpoint after each tick.
  Observation step(int64_t n_ticks);

  Observation observe() const;

  // External interference: applies effects directly, bypassing guards and
  // without trigger cascade or spring rebound, then re-runs rules.
  Observation apply_perturbation(const Perturbation& p);

  SessionState snapshot() const { return st_; }
  int64_t tick() const { return st_.tick; }
  const std::string& held_object() const { return st_.held_object; }

  void set_trace_sink(TraceSink* sink) { sink_ = sink; }

  // Pseudo-tick budget for the in-action spring rebound.
  void set_settle_budget(int64_t ticks) { settle_budget_ = ticks; }

 private:
  enum class Cause { Action, Trigger, Rule, Tick, Settle, Perturbation, Refresh };

  Session(const ApplianceSpec& spec);
  void init_registers();
  void reset_countdown_remainder(const std::string& part);
  bool set_joint(const std::string& part, double value, Cause cause,
                 std::vector<Effect>* applied);
  void set_parameter(const std::string& name, const ParamValue& value, Cause cause,
                     std::vector<Effect>* applied);
  bool set_register(std::map<std::string, std::string>& reg, EffectTarget target,
                    const std::string& name, const std::string& value, Cause cause,
                    std::vector<Effect>* applied);
  void apply_effect(const Effect& e, Cause cause, std::vector<Effect>* applied);
  void run_rule_fixpoint(std::vector<Effect>* applied);
  bool settle_springs(std::vector<Effect>* applied);
  // Re-renders mechanism-owned registers. Registers named in `keep` hold
  // their current content; a perturbed screen stays perturbed until the next
  // action or tick refreshes it.
  void refresh_electronics(const std::vector<Effect>* keep = nullptr);
  void emit(const std::string& kind, nlohmann::ordered_json payload);
  void trace_effect(const Effect& e);
  // The event that caused a batch of effects precedes them in the trace, so
  // effects queue in pending_ until the batch header is known.
  void flush_header(const std::string& kind, nlohmann::ordered_json payload);
  void flush_with_head(TraceEvent head);

  const ApplianceSpec* spec_;
  SessionState st_;
  TraceSink* sink_ = nullptr;
  std::vector<TraceEvent> pending_;
  int64_t seq_ = 0;
  int64_t settle_budget_ = 64;
};

}  // namespace appsim
