#pragma once

#include <string>

#include "appsim/spec.hpp"

namespace appsim {

// SVG 1.1 line drawing of the control panel: one outlined rectangle plus a
// name label per part, emitted in declaration order.
std::string render_panel_schematic(const ApplianceSpec& spec);

}  // namespace appsim
