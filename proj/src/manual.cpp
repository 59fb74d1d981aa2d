#include "appsim/manual.hpp"

#include <cctype>
#include <random>
#include <string>
#include <vector>

#include "appsim/errors.hpp"
#include "appsim/session.hpp"
#include "appsim/state_graph.hpp"
#include "appsim/util.hpp"

namespace appsim {

namespace {

std::string category_words(const std::string& category) {
  std::string out;
  bool cap = true;
  for (char c : category) {
    if (c == '_') {
      out += ' ';
      cap = true;
    } else {
      out += cap ? static_cast<char>(std::toupper(static_cast<unsigned char>(c))) : c;
      cap = false;
    }
  }
  return out;
}

std::string underline(const std::string& title) {
  return title + "\n" + std::string(title.size(), '=') + "\n";
}

std::string value_text(const ParamValue& v) {
  if (std::holds_alternative<std::string>(v)) return "\"" + std::get<std::string>(v) + "\"";
  return param_value_to_text(v);
}

std::string comparison_text(const Comparison& c) {
  std::string verb;
  switch (c.op) {
    case CompareOp::Eq: verb = "is"; break;
    case CompareOp::Ne: verb = "is not"; break;
    case CompareOp::Lt: verb = "is below"; break;
    case CompareOp::Le: verb = "is at most"; break;
    case CompareOp::Gt: verb = "is above"; break;
    case CompareOp::Ge: verb = "is at least"; break;
  }
  return c.name + " " + verb + " " + value_text(c.value);
}

std::string predicate_text(const Predicate& p) {
  if (p.empty()) return "always";
  std::string out;
  for (const auto& c : p) {
    if (!out.empty()) out += " and ";
    out += comparison_text(c);
  }
  return out;
}

std::string mechanism_note(const MechanismConfig& m) {
  switch (m.kind) {
    case MechanismKind::InnerSpring: {
      const auto& c = m.as<SpringConfig>();
      std::string note = "spring return over " + std::to_string(c.return_ticks) +
                         (c.return_ticks == 1 ? " second" : " seconds");
      if (!c.latch_param.empty()) note += ", latchable via " + c.latch_param;
      return note;
    }
    case MechanismKind::MagneticAttraction:
      return "magnetically held while " + predicate_text(m.as<MagnetConfig>().hold);
    case MechanismKind::MechanicalTrigger:
      return "mechanically linked to " + m.as<TriggerConfig>().target;
    case MechanismKind::KnobCountdown:
      return "runs a countdown, " + std::to_string(m.as<CountdownConfig>().ticks_per_detent) +
             " seconds per stop";
    case MechanismKind::SafetyLock:
      return "interlocked, usable only while " +
             predicate_text(m.as<SafetyLockConfig>().unlocked_when);
    case MechanismKind::ScreenDisplay:
      return "status display";
    case MechanismKind::TouchSensing:
      return "touch sensitive";
    case MechanismKind::Illumination:
      return "lights up while " + predicate_text(m.as<IlluminationConfig>().on_when);
    case MechanismKind::LogoIndicator:
      return "status badge";
    case MechanismKind::RotaryMotor:
      return "motor driven";
  }
  return "";
}

std::string part_line(const PartSpec& part) {
  std::string line = "- " + part.name + ": ";
  switch (part.joint.kind) {
    case JointKind::Revolute:
      line += "rotary control, travel " + canon_num(part.joint.lo) + " to " +
              canon_num(part.joint.hi) + " degrees, rest at " + canon_num(part.joint.rest);
      break;
    case JointKind::Prismatic:
      line += "sliding control, travel " + canon_num(part.joint.lo) + " to " +
              canon_num(part.joint.hi) + " mm, rest at " + canon_num(part.joint.rest);
      break;
    case JointKind::Fixed:
      line += "fixed control";
      break;
  }
  if (!part.joint.detents.empty()) {
    line += ", stops at ";
    for (size_t i = 0; i < part.joint.detents.size(); ++i) {
      if (i) line += ", ";
      line += canon_num(part.joint.detents[i]);
    }
  }
  line += ".";
  if (!part.state_labels.empty()) {
    line += " Positions:";
    for (size_t i = 0; i < part.state_labels.size(); ++i) {
      line += (i ? ", " : " ");
      line += "\"" + part.state_labels[i].second + "\" at " + canon_num(part.state_labels[i].first);
    }
    line += ".";
  }
  if (!part.mechanisms.empty()) {
    line += " Notes:";
    for (size_t i = 0; i < part.mechanisms.size(); ++i) {
      line += (i ? "; " : " ");
      line += mechanism_note(part.mechanisms[i]);
    }
    line += ".";
  }
  return line;
}

std::string parameter_line(const SettingParameter& p) {
  std::string line = "- " + p.name;
  if (!p.unit.empty()) line += " (" + p.unit + ")";
  line += ": ";
  if (const auto* r = std::get_if<IntRange>(&p.domain)) {
    line += std::to_string(r->min) + " to " + std::to_string(r->max);
    if (r->step != 1) line += " in steps of " + std::to_string(r->step);
  } else {
    const auto& labels = std::get<LabelSet>(p.domain).labels;
    line += "one of ";
    for (size_t i = 0; i < labels.size(); ++i) {
      if (i) line += ", ";
      line += "\"" + labels[i] + "\"";
    }
  }
  line += ", initially " + value_text(p.initial) + ".";
  return line;
}

}  // namespace

std::vector<int> ManualDocument::pages_of(const std::string& category) const {
  std::vector<int> out;
  for (const auto& page : pages) {
    if (page.category == category) out.push_back(page.index);
  }
  return out;
}

std::string describe_action(const AtomicAction& a) {
  auto times_suffix = [&]() -> std::string {
    if (a.times > 1) return " " + std::to_string(a.times) + " times";
    return "";
  };
  switch (a.kind) {
    case ActionKind::Press:
      return "Press " + a.part + " to \"" + a.target_state + "\"" + times_suffix();
    case ActionKind::Rotate:
      return "Turn " + a.part + " to \"" + a.target_state + "\"";
    case ActionKind::Open:
      return "Open " + a.part;
    case ActionKind::Close:
      return "Close " + a.part;
    case ActionKind::Touch:
      return "Touch " + a.part + times_suffix();
    case ActionKind::Slide:
      return "Slide " + a.part + " to \"" + a.target_state + "\"";
    case ActionKind::Flip:
      return "Flip " + a.part + " to \"" + a.target_state + "\"";
    case ActionKind::Pull:
      return "Pull " + a.part;
    case ActionKind::Push:
      return "Push " + a.part;
    case ActionKind::Pick:
      return "Pick up " + a.object;
    case ActionKind::Place:
      return "Set down " + a.object;
    case ActionKind::Move:
      return "Move " + a.object + " from " + a.start_pos + " to " + a.end_pos;
    case ActionKind::Pour:
      return "Pour " + a.object + " into " + a.part;
  }
  return "";
}

ManualDocument render_manual(const ApplianceSpec& spec, uint64_t seed,
                             const std::vector<ManualRecipe>& recipes) {
  ManualDocument doc;
  doc.spec_id = spec.id;
  doc.seed = seed;

  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL ^ fnv1a64(spec.id));
  auto pick = [&rng](const std::vector<std::string>& variants) {
    return variants[rng() % variants.size()];
  };

  auto add_page = [&doc](const std::string& category, std::string text) {
    doc.pages.push_back({static_cast<int>(doc.pages.size()) + 1, category, std::move(text)});
  };

  const std::string words = category_words(spec.category);

  {
    std::string text = underline(words + " User Manual");
    text += "Model: " + spec.id + "\n\n";
    text += pick({"Thank you for choosing this appliance.",
                  "Welcome to dependable everyday operation.",
                  "Built for years of reliable service."});
    text += "\nRead this manual fully before first use and keep it for later reference.\n";
    add_page("cover", std::move(text));
  }

  {
    std::string text = underline("Components");
    for (const auto& part : spec.parts) text += part_line(part) + "\n";
    if (!spec.parameters.empty()) {
      text += "\nSettings\n--------\n";
      for (const auto& p : spec.parameters) text += parameter_line(p) + "\n";
    }
    if (!spec.objects.empty()) {
      text += "\nIncluded accessories:";
      for (size_t i = 0; i < spec.objects.size(); ++i) {
        text += (i ? ", " : " ");
        text += spec.objects[i];
      }
      text += ".\n";
    }
    add_page("component_description", std::move(text));
  }

  if (recipes.empty()) {
    std::string text = underline("Basic operation");
    text += "All controls respond immediately. From the ready state the panel accepts:\n";
    Session probe(spec, 0);
    for (const auto& action : candidate_actions(probe)) {
      text += "  - " + format_action(action) + "\n";
    }
    add_page("operating_procedure", std::move(text));
  } else {
    for (const auto& recipe : recipes) {
      std::string text = underline("Operating procedure: " + recipe.title);
      text += "Carry out the steps in the order given.\n";
      for (size_t i = 0; i < recipe.steps.size(); ++i) {
        text += "  " + std::to_string(i + 1) + ". " + describe_action(recipe.steps[i]) + ": " +
                format_action(recipe.steps[i]) + "\n";
      }
      add_page("operating_procedure", std::move(text));
    }
  }

  {
    std::string text;
    for (const auto& part : spec.parts) {
      for (const auto& mech : part.mechanisms) {
        if (mech.kind == MechanismKind::SafetyLock) {
          const auto& c = mech.as<SafetyLockConfig>();
          std::string kinds;
          for (size_t i = 0; i < c.blocks.size(); ++i) {
            if (i) kinds += ", ";
            kinds += to_string(c.blocks[i]);
          }
          text += "- " + part.name + " accepts " + kinds + " input only while " +
                  predicate_text(c.unlocked_when) + "; it stays inert otherwise.\n";
        } else if (mech.kind == MechanismKind::MagneticAttraction) {
          const auto& c = mech.as<MagnetConfig>();
          text += "- " + part.name + " is held in place while " + predicate_text(c.hold) +
                  ". Never force it; wait for the hold to release.\n";
        }
      }
    }
    if (!text.empty()) {
      text += "- Disconnect power before servicing.\n";
      add_page("safety_precaution", underline("Safety precautions") + text);
    }
  }

  {
    std::vector<std::string> movable;
    for (const auto& part : spec.parts) {
      if (part.joint.movable()) movable.push_back(part.name);
    }
    if (!movable.empty() || !spec.objects.empty()) {
      std::string text = underline("Care and maintenance");
      if (!movable.empty()) {
        text += "- Wipe the moving parts (" + join(movable, ", ") + ") with a dry cloth.\n";
      }
      if (!spec.objects.empty()) {
        text += "- Clean " + join(spec.objects, ", ") + " after every use; avoid abrasives.\n";
      }
      text += "- Never immerse the appliance in water.\n";
      add_page("maintenance", std::move(text));
    }
  }

  {
    std::string text = underline("After-sales service");
    text += pick({"Our service network handles repairs and genuine spare parts.",
                  "Support and genuine spare parts are available through authorized dealers.",
                  "For repairs, contact the service desk listed on the warranty card."});
    text += "\nQuote model \"" + spec.id + "\" and your proof of purchase in all correspondence.\n";
    text += "Warranty period: 24 months from the date of purchase.\n";
    add_page("after_sales", std::move(text));
  }

  return doc;
}

std::string page_filename(const ManualPage& page) {
  return "page_" + std::to_string(page.index) + "_" + page.category + ".txt";
}

nlohmann::ordered_json manual_to_json(const ManualDocument& doc) {
  nlohmann::ordered_json pages = nlohmann::ordered_json::array();
  for (const auto& page : doc.pages) {
    pages.push_back({{"index", page.index},
                     {"category", page.category},
                     {"file", page_filename(page)},
                     {"text", page.text}});
  }
  return nlohmann::ordered_json{
      {"spec_id", doc.spec_id}, {"seed", doc.seed}, {"pages", pages}};
}

ManualDocument manual_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("spec_id") || !j.contains("seed") || !j.contains("pages") ||
      !j["spec_id"].is_string() || !j["pages"].is_array()) {
    throw SpecError(SpecError::Code::BadType, "manual must be {spec_id, seed, pages}", where);
  }
  ManualDocument doc;
  doc.spec_id = j["spec_id"].get<std::string>();
  doc.seed = j["seed"].get<uint64_t>();
  int expected = 1;
  for (const auto& p : j["pages"]) {
    if (!p.is_object() || !p.contains("index") || !p.contains("category") || !p.contains("text")) {
      throw SpecError(SpecError::Code::BadType, "page must be {index, category, file, text}",
                      where + ".pages");
    }
    ManualPage page;
    page.index = p["index"].get<int>();
    page.category = p["category"].get<std::string>();
    page.text = p["text"].get<std::string>();
    if (page.index != expected++) {
      throw SpecError(SpecError::Code::BadValue, "page indices must be contiguous from 1",
                      where + ".pages");
    }
    doc.pages.push_back(std::move(page));
  }
  return doc;
}

}  // namespace appsim
