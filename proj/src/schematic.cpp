#include "appsim/schematic.hpp"

#include "appsim/util.hpp"

namespace appsim {

std::string render_panel_schematic(const ApplianceSpec& spec) {
  std::string svg = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  const std::string w = std::to_string(spec.panel.width);
  const std::string h = std::to_string(spec.panel.height);
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + w +
         "\" height=\"" + h + "\" viewBox=\"0 0 " + w + " " + h + "\">\n";
  for (const auto& part : spec.parts) {
    const BoundingBox& r = part.panel_rect;
    svg += "  <rect x=\"" + canon_num(r.x1) + "\" y=\"" + canon_num(r.y1) + "\" width=\"" +
           canon_num(r.width()) + "\" height=\"" + canon_num(r.height()) +
           "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
    svg += "  <text x=\"" + canon_num(r.x1 + 2.0) + "\" y=\"" + canon_num(r.y1 + 14.0) +
           "\" font-family=\"monospace\" font-size=\"12\">" + part.name + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace appsim
