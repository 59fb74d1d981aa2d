#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "appsim/actions.hpp"
#include "appsim/spec.hpp"
#include "json.hpp"

namespace appsim {

struct ManualPage {
  int index = 0;  // 1-based, contiguous
  std::string category;
  std::string text;
};

// A worked procedure shown in the manual, typically taken from a bundled
// episode for the same appliance.
struct ManualRecipe {
  std::string title;
  std::vector<AtomicAction> steps;
};

struct ManualDocument {
  std::string spec_id;
  uint64_t seed = 0;
  std::vector<ManualPage> pages;

  std::vector<int> pages_of(const std::string& category) const;  // page indices
};

// Page layout: cover, one component overview, one procedure page per recipe
// (a generic controls page when none are given), a safety page when a lock or
// magnet exists, a care page when anything moves or objects exist, then the
// after-sales page. The seed varies phrasing only; page count, order and
// categories depend on the spec alone.
ManualDocument render_manual(const ApplianceSpec& spec, uint64_t seed,
                             const std::vector<ManualRecipe>& recipes = {});

// page_<index>_<category>.txt
std::string page_filename(const ManualPage& page);

nlohmann::ordered_json manual_to_json(const ManualDocument& doc);
ManualDocument manual_from_json(const nlohmann::json& j, const std::string& where);

// Imperative sentence for one step, e.g. "Turn timer_knob to \"2\"".
std::string describe_action(const AtomicAction& a);

}  // namespace appsim
