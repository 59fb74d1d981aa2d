#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "appsim/actions.hpp"
#include "appsim/value.hpp"

namespace appsim {

enum class JointKind { Revolute, Prismatic, Fixed };

const char* to_string(JointKind k);
std::optional<JointKind> joint_kind_from(const std::string& s);

// Revolute limits are degrees, prismatic limits millimeters; fixed joints
// carry no limits, rest or detents.
struct JointSpec {
  JointKind kind = JointKind::Fixed;
  double lo = 0.0;
  double hi = 0.0;
  double rest = 0.0;
  std::vector<double> detents;

  bool movable() const { return kind != JointKind::Fixed; }
  bool operator==(const JointSpec&) const = default;
};

enum class MechanismKind {
  InnerSpring,
  MagneticAttraction,
  MechanicalTrigger,
  KnobCountdown,
  SafetyLock,
  ScreenDisplay,
  TouchSensing,
  Illumination,
  LogoIndicator,
  RotaryMotor,
};

inline constexpr int kMechanismKindCount = 10;

const char* to_string(MechanismKind k);
std::optional<MechanismKind> mechanism_kind_from(const std::string& s);

struct SpringConfig {
  int64_t return_ticks = 1;
  std::string latch_param;  // empty: never latched

  bool operator==(const SpringConfig&) const = default;
};

struct MagnetConfig {
  Predicate hold;

  bool operator==(const MagnetConfig&) const = default;
};

// What a mechanical trigger listens for: a press of a named part, or a named
// part entering a labeled state.
struct EventPattern {
  enum class Kind { Press, StateEntered };
  Kind kind = Kind::Press;
  std::string part;
  std::string state;  // StateEntered only

  bool operator==(const EventPattern&) const = default;
};

struct TriggerConfig {
  EventPattern on;
  std::string target;
  Effect effect;
  Predicate guard;  // fires only while true; empty = always

  bool operator==(const TriggerConfig&) const = default;
};

struct CountdownConfig {
  int64_t ticks_per_detent = 1;
  std::vector<Effect> on_zero;

  bool operator==(const CountdownConfig&) const = default;
};

struct SafetyLockConfig {
  Predicate unlocked_when;
  std::vector<ActionKind> blocks;

  bool operator==(const SafetyLockConfig&) const = default;
};

struct ScreenConfig {
  std::vector<std::string> fields;  // parameter names, display order
  std::string format;               // template with {name} {value} {unit}

  bool operator==(const ScreenConfig&) const = default;
};

struct TouchConfig {
  std::vector<Effect> effects;  // applied once per touch

  bool operator==(const TouchConfig&) const = default;
};

struct IlluminationConfig {
  Predicate on_when;

  bool operator==(const IlluminationConfig&) const = default;
};

struct IndicatorConfig {
  struct Mode {
    Predicate when;
    std::string mode;  // on | off | flash

    bool operator==(const Mode&) const = default;
  };
  std::vector<Mode> mode_when;  // first match wins; default "off"

  bool operator==(const IndicatorConfig&) const = default;
};

struct MotorConfig {
  std::string joint;  // driven part
  double rate = 1.0;  // degrees (or millimeters) per tick
  Predicate on_when;

  bool operator==(const MotorConfig&) const = default;
};

struct MechanismConfig {
  MechanismKind kind = MechanismKind::InnerSpring;
  std::variant<SpringConfig, MagnetConfig, TriggerConfig, CountdownConfig, SafetyLockConfig,
               ScreenConfig, TouchConfig, IlluminationConfig, IndicatorConfig, MotorConfig>
      config;

  template <class T>
  const T& as() const {
    return std::get<T>(config);
  }
  bool operator==(const MechanismConfig&) const = default;
};

struct BoundingBox {
  double x1 = 0.0, y1 = 0.0, x2 = 0.0, y2 = 0.0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }
  bool operator==(const BoundingBox&) const = default;
};

struct PartSpec {
  std::string name;
  JointSpec joint;
  BoundingBox panel_rect;
  // Joint position -> discrete label. Keys are canonical number strings.
  std::vector<std::pair<double, std::string>> state_labels;  // sorted by position
  std::vector<MechanismConfig> mechanisms;

  const MechanismConfig* mechanism(MechanismKind k) const;
  std::optional<std::string> label_at(double position) const;
  std::optional<double> position_of(const std::string& label) const;
  bool operator==(const PartSpec&) const = default;
};

struct IntRange {
  int64_t min = 0;
  int64_t max = 0;
  int64_t step = 1;

  bool contains(int64_t v) const { return v >= min && v <= max && (v - min) % step == 0; }
  bool operator==(const IntRange&) const = default;
};

struct LabelSet {
  std::vector<std::string> labels;

  bool operator==(const LabelSet&) const = default;
};

using ParamDomain = std::variant<IntRange, LabelSet>;

struct SettingParameter {
  std::string name;
  ParamDomain domain;
  ParamValue initial;
  std::string unit;

  bool value_in_domain(const ParamValue& v) const;
  bool operator==(const SettingParameter&) const = default;
};

struct LogicRule {
  std::string id;
  int64_t priority = 0;
  Predicate when;
  std::vector<Effect> then;

  bool operator==(const LogicRule&) const = default;
};

struct PanelSpec {
  int64_t width = 0;
  int64_t height = 0;

  bool operator==(const PanelSpec&) const = default;
};

struct ApplianceSpec {
  std::string id;
  std::string category;
  PanelSpec panel;
  std::vector<PartSpec> parts;
  std::vector<SettingParameter> parameters;
  std::vector<LogicRule> rules;
  std::vector<std::string> objects;

  int part_index(const std::string& name) const;        // -1 if absent
  int parameter_index(const std::string& name) const;   // -1 if absent
  const PartSpec* part(const std::string& name) const;  // nullptr if absent
  const SettingParameter* parameter(const std::string& name) const;
  bool has_object(const std::string& name) const;
  // Rule evaluation order: priority descending, then declaration order.
  std::vector<int> rule_order() const;
  bool operator==(const ApplianceSpec&) const = default;
};

// Best-effort appliance category list; unknown categories are warnings, not
// errors, so corpora can extend it.
const std::vector<std::string>& known_categories();

}  // namespace appsim
