#pragma once

#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "bivmap/scene.hpp"
#include "bivmap/techniques.hpp"

namespace bivmap::detail {

inline const Style kRegionStroke{"none", "#666666", 0.5, std::nullopt};

inline Style fill_style(const std::string& color,
                        std::optional<double> opacity = std::nullopt) {
  Style s = kRegionStroke;
  s.fill = color;
  s.fill_opacity = opacity;
  return s;
}

struct Panel {
  double x, y, width, height;  // map drawing area
  double legend_x;
};

inline std::vector<Panel> layout_panels(double width, double height, int count) {
  std::vector<Panel> panels;
  const double slot = width / count;
  for (int i = 0; i < count; ++i) {
    const double x0 = slot * i;
    panels.push_back({x0 + kMargin, kMargin, slot - kLegendColumn - 2 * kMargin,
                      height - 2 * kMargin, x0 + slot - kLegendColumn});
  }
  return panels;
}

inline std::string population_label(double v) {
  if (v >= 1e6) return fmt::format("{:.2f} M", v / 1e6);
  if (v >= 1e3) return fmt::format("{:.0f} k", v / 1e3);
  return fmt::format("{:.0f}", v);
}

inline double legend_bottom(const GroupNode& g) {
  double bottom = 0.0;
  for (const auto& n : g.children)
    if (const auto* r = std::get_if<RectNode>(&n)) bottom = std::max(bottom, r->y + r->height);
  return bottom + 24.0;
}

// Tilted-view geometry shared by the prism renderers: plan viewport that
// leaves room for the tallest extrusion, plus the vertical shift applied to
// projected points.
struct TiltedFrame {
  Viewport plan;
  double shift = 0.0;
  double lift_max = 0.0;

  std::vector<Ring> shifted(std::vector<Ring> rings) const {
    if (shift != 0.0)
      for (auto& ring : rings)
        for (auto& pt : ring) pt.y += shift;
    return rings;
  }
};

TiltedFrame tilted_frame(const BBox& box, const Panel& p, const Camera& cam);

}  // namespace bivmap::detail
