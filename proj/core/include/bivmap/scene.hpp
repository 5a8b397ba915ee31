#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bivmap/classify.hpp"
#include "bivmap/types.hpp"

namespace bivmap {

struct Style {
  std::string fill = "none";
  std::string stroke;  // empty: no stroke attribute
  double stroke_width = 0.0;
  std::optional<double> fill_opacity;
};

struct PathNode {
  std::string id;
  std::vector<Ring> rings;  // each emitted as a closed subpath
  Style style;
};

struct CircleNode {
  std::string id;
  Point center;
  double radius = 0.0;
  Style style;
};

struct RectNode {
  std::string id;
  double x = 0.0, y = 0.0, width = 0.0, height = 0.0;
  Style style;
};

struct TextNode {
  Point at;
  std::string text;
  double size = 12.0;
  std::string anchor = "start";  // start | middle | end
  std::string fill = "#000000";
};

struct GroupNode;
using Node = std::variant<PathNode, CircleNode, RectNode, TextNode, GroupNode>;

struct GroupNode {
  std::string id;
  std::optional<double> opacity;
  std::vector<Node> children;

  template <class N>
  N& add(N node) {
    children.emplace_back(std::move(node));
    return std::get<N>(children.back());
  }
};

// Resolution-independent drawing tree; draw order is node order.
struct Scene {
  double width = 0.0;
  double height = 0.0;
  std::vector<Node> nodes;

  template <class N>
  N& add(N node) {
    nodes.emplace_back(std::move(node));
    return std::get<N>(nodes.back());
  }
};

// SVG 1.1 document with three fractional digits on every coordinate.
// Identical scenes serialize to identical bytes.
std::string write_svg(const Scene& scene);

// Maps planar map units (y up) onto a pixel rectangle (y down), preserving
// aspect ratio and centring the map in the rectangle.
struct Viewport {
  double scale = 1.0;
  double offset_x = 0.0;
  double offset_y = 0.0;

  Point to_pixels(Point p) const {
    return {offset_x + scale * p.x, offset_y - scale * p.y};
  }
  Ring to_pixels(const Ring& ring) const;
  std::vector<Ring> to_pixels(const std::vector<Polygon>& parts) const;
};

Viewport fit_viewport(const BBox& map_box, double x, double y, double width,
                      double height);

struct Camera {
  double pitch_deg = 55.0;  // 90 is a straight plan view
  double height_scale = 120.0;  // pixels for the maximum extruded value
};

void validate(const Camera& camera);

struct PrismFaces {
  std::string id;
  std::vector<Ring> top;
  std::vector<Ring> sides;  // visible (south-facing) quads
  double depth_key = 0.0;
  double z = 0.0;  // extrusion height in pixels before foreshortening
};

// Footprint in plan pixel space (y down, north up). A plan point (x, y) at
// elevation z lands on screen at (x, y*sin(pitch) - z*cos(pitch)), with
// z = height_scale * value / value_max.
PrismFaces project_prism(const std::vector<Ring>& footprint, double value,
                         double value_max, const Camera& camera,
                         std::string id = {});

// Plan footprint tilted onto the ground plane (z = 0).
Ring tilt(const Ring& plan_ring, const Camera& camera);

// sin and cos of the pitch, exact at 90 degrees.
std::pair<double, double> pitch_sin_cos(const Camera& camera);

// Farthest (northernmost) first; equal keys ordered by id.
std::vector<PrismFaces> depth_sort(std::vector<PrismFaces> faces);

struct LegendStyle {
  double x = 0.0;
  double y = 0.0;
  double swatch = 18.0;
  double value_scale = 1.0;  // e.g. 100 to show fractions as percent
  int decimals = 1;
};

// Interval labels for each class: "< b1", "[b1, b2)", ..., ">= bk" (with the
// unit label appended); a single class shows the full data range.
std::vector<std::string> legend_labels(const Breaks& breaks,
                                       const std::string& unit_label,
                                       const LegendStyle& style = {});

GroupNode legend(const Breaks& breaks, const Palette& palette,
                 const std::string& title, const std::string& unit_label,
                 const LegendStyle& style = {});

GroupNode alpha_legend(const AlphaScale& scale, const std::string& color,
                       const std::string& title,
                       const std::vector<std::string>& labels,
                       const LegendStyle& style = {});

// Labelled swatches, for continuous ramps and size keys.
GroupNode swatch_legend(const std::vector<std::string>& colors,
                        const std::vector<std::string>& labels,
                        const std::string& title, const LegendStyle& style = {});

}  // namespace bivmap
