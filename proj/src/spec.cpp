#include "appsim/spec.hpp"

#include <algorithm>

namespace appsim {

const char* to_string(JointKind k) {
  switch (k) {
    case JointKind::Revolute: return "revolute";
    case JointKind::Prismatic: return "prismatic";
    case JointKind::Fixed: return "fixed";
  }
  return "?";
}

std::optional<JointKind> joint_kind_from(const std::string& s) {
  if (s == "revolute") return JointKind::Revolute;
  if (s == "prismatic") return JointKind::Prismatic;
  if (s == "fixed") return JointKind::Fixed;
  return std::nullopt;
}

const char* to_string(MechanismKind k) {
  switch (k) {
    case MechanismKind::InnerSpring: return "inner_spring";
    case MechanismKind::MagneticAttraction: return "magnetic_attraction";
    case MechanismKind::MechanicalTrigger: return "mechanical_trigger";
    case MechanismKind::KnobCountdown: return "knob_countdown";
    case MechanismKind::SafetyLock: return "safety_lock";
    case MechanismKind::ScreenDisplay: return "screen_display";
    case MechanismKind::TouchSensing: return "touch_sensing";
    case MechanismKind::Illumination: return "illumination";
    case MechanismKind::LogoIndicator: return "logo_indicator";
    case MechanismKind::RotaryMotor: return "rotary_motor";
  }
  return "?";
}

std::optional<MechanismKind> mechanism_kind_from(const std::string& s) {
  static const std::pair<const char*, MechanismKind> table[] = {
      {"inner_spring", MechanismKind::InnerSpring},
      {"magnetic_attraction", MechanismKind::MagneticAttraction},
      {"mechanical_trigger", MechanismKind::MechanicalTrigger},
      {"knob_countdown", MechanismKind::KnobCountdown},
      {"safety_lock", MechanismKind::SafetyLock},
      {"screen_display", MechanismKind::ScreenDisplay},
      {"touch_sensing", MechanismKind::TouchSensing},
      {"illumination", MechanismKind::Illumination},
      {"logo_indicator", MechanismKind::LogoIndicator},
      {"rotary_motor", MechanismKind::RotaryMotor},
  };
  for (const auto& [name, kind] : table) {
    if (s == name) return kind;
  }
  return std::nullopt;
}

const MechanismConfig* PartSpec::mechanism(MechanismKind k) const {
  for (const auto& m : mechanisms) {
    if (m.kind == k) return &m;
  }
  return nullptr;
}

std::optional<std::string> PartSpec::label_at(double position) const {
  for (const auto& [pos, label] : state_labels) {
    if (std::abs(pos - position) <= 1e-9) return label;
  }
  return std::nullopt;
}

std::optional<double> PartSpec::position_of(const std::string& label) const {
  for (const auto& [pos, l] : state_labels) {
    if (l == label) return pos;
  }
  return std::nullopt;
}

bool SettingParameter::value_in_domain(const ParamValue& v) const {
  if (std::holds_alternative<IntRange>(domain)) {
    if (!std::holds_alternative<int64_t>(v)) return false;
    return std::get<IntRange>(domain).contains(std::get<int64_t>(v));
  }
  if (!std::holds_alternative<std::string>(v)) return false;
  const auto& labels = std::get<LabelSet>(domain).labels;
  return std::find(labels.begin(), labels.end(), std::get<std::string>(v)) != labels.end();
}

int ApplianceSpec::part_index(const std::string& name) const {
  for (size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

int ApplianceSpec::parameter_index(const std::string& name) const {
  for (size_t i = 0; i < parameters.size(); ++i) {
    if (parameters[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

const PartSpec* ApplianceSpec::part(const std::string& name) const {
  int i = part_index(name);
  return i < 0 ? nullptr : &parts[i];
}

const SettingParameter* ApplianceSpec::parameter(const std::string& name) const {
  int i = parameter_index(name);
  return i < 0 ? nullptr : &parameters[i];
}

bool ApplianceSpec::has_object(const std::string& name) const {
  return std::find(objects.begin(), objects.end(), name) != objects.end();
}

std::vector<int> ApplianceSpec::rule_order() const {
  std::vector<int> order(rules.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(),
                   [this](int a, int b) { return rules[a].priority > rules[b].priority; });
  return order;
}

const std::vector<std::string>& known_categories() {
  static const std::vector<std::string> categories = {
      "microwave_oven",   "toaster",     "air_fryer",  "stand_mixer", "washing_machine",
      "oven",             "coffee_machine", "kettle",  "blender",     "rice_cooker",
      "dishwasher",       "range_hood",  "induction_cooker", "refrigerator",
  };
  return categories;
}

}  // namespace appsim
