#include "bivmap/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "bivmap/error.hpp"
#include "bivmap/geometry.hpp"

namespace bivmap {
namespace {

std::string num(double v) {
  std::string s = fmt::format("{:.3f}", v);
  if (s == "-0.000") s = "0.000";
  return s;
}

std::string escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void write_id(std::string& out, const std::string& id) {
  if (!id.empty()) out += " id=\"" + escape(id) + "\"";
}

void write_style(std::string& out, const Style& s) {
  out += " fill=\"" + escape(s.fill) + "\"";
  if (s.fill_opacity) out += " fill-opacity=\"" + num(*s.fill_opacity) + "\"";
  if (!s.stroke.empty()) {
    out += " stroke=\"" + escape(s.stroke) + "\"";
    out += " stroke-width=\"" + num(s.stroke_width) + "\"";
    out += " stroke-linejoin=\"round\"";
  }
}

std::string path_data(const std::vector<Ring>& rings) {
  std::string d;
  for (const auto& ring : rings) {
    std::size_t n = ring.size();
    if (n > 1 && ring.front() == ring.back()) --n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!d.empty()) d += ' ';
      d += i == 0 ? "M" : "L";
      d += num(ring[i].x) + ',' + num(ring[i].y);
    }
    if (n > 0) d += " Z";
  }
  return d;
}

void write_node(std::string& out, const Node& node, int depth);

void indent(std::string& out, int depth) { out.append(static_cast<std::size_t>(depth) * 2, ' '); }

struct NodeWriter {
  std::string& out;
  int depth;

  void operator()(const PathNode& p) const {
    indent(out, depth);
    out += "<path";
    write_id(out, p.id);
    out += " d=\"" + path_data(p.rings) + "\"";
    write_style(out, p.style);
    out += " fill-rule=\"evenodd\"/>\n";
  }
  void operator()(const CircleNode& c) const {
    indent(out, depth);
    out += "<circle";
    write_id(out, c.id);
    out += " cx=\"" + num(c.center.x) + "\" cy=\"" + num(c.center.y) + "\" r=\"" +
           num(c.radius) + "\"";
    write_style(out, c.style);
    out += "/>\n";
  }
  void operator()(const RectNode& r) const {
    indent(out, depth);
    out += "<rect";
    write_id(out, r.id);
    out += " x=\"" + num(r.x) + "\" y=\"" + num(r.y) + "\" width=\"" + num(r.width) +
           "\" height=\"" + num(r.height) + "\"";
    write_style(out, r.style);
    out += "/>\n";
  }
  void operator()(const TextNode& t) const {
    indent(out, depth);
    out += "<text x=\"" + num(t.at.x) + "\" y=\"" + num(t.at.y) + "\" font-size=\"" +
           num(t.size) + "\" font-family=\"sans-serif\" text-anchor=\"" + escape(t.anchor) +
           "\" fill=\"" + escape(t.fill) + "\">" + escape(t.text) + "</text>\n";
  }
  void operator()(const GroupNode& g) const {
    indent(out, depth);
    out += "<g";
    write_id(out, g.id);
    if (g.opacity) out += " opacity=\"" + num(*g.opacity) + "\"";
    if (g.children.empty()) {
      out += "/>\n";
      return;
    }
    out += ">\n";
    for (const auto& child : g.children) write_node(out, child, depth + 1);
    indent(out, depth);
    out += "</g>\n";
  }
};

void write_node(std::string& out, const Node& node, int depth) {
  std::visit(NodeWriter{out, depth}, node);
}

}  // namespace

std::string write_svg(const Scene& scene) {
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         num(scene.width) + "\" height=\"" + num(scene.height) + "\" viewBox=\"0 0 " +
         num(scene.width) + ' ' + num(scene.height) + "\">\n";
  for (const auto& node : scene.nodes) write_node(out, node, 1);
  out += "</svg>\n";
  return out;
}

Ring Viewport::to_pixels(const Ring& ring) const {
  Ring out;
  out.reserve(ring.size());
  for (const auto& p : ring) out.push_back(to_pixels(p));
  return out;
}

std::vector<Ring> Viewport::to_pixels(const std::vector<Polygon>& parts) const {
  std::vector<Ring> out;
  for (const auto& part : parts) {
    out.push_back(to_pixels(part.outer));
    for (const auto& h : part.holes) out.push_back(to_pixels(h));
  }
  return out;
}

Viewport fit_viewport(const BBox& box, double x, double y, double width, double height) {
  Viewport v;
  if (box.empty()) return v;
  const double bw = box.width(), bh = box.height();
  if (bw > 0 && bh > 0)
    v.scale = std::min(width / bw, height / bh);
  else if (bw > 0)
    v.scale = width / bw;
  else if (bh > 0)
    v.scale = height / bh;
  v.offset_x = x + (width - v.scale * bw) / 2.0 - v.scale * box.min_x;
  v.offset_y = y + (height - v.scale * bh) / 2.0 + v.scale * box.max_y;
  return v;
}

void validate(const Camera& camera) {
  if (!(camera.pitch_deg > 0.0 && camera.pitch_deg <= 90.0))
    throw ValidationError("camera pitch must lie in (0, 90] degrees");
  if (!(camera.height_scale >= 0.0))
    throw ValidationError("camera height scale must be >= 0");
}

std::pair<double, double> pitch_sin_cos(const Camera& camera) {
  if (camera.pitch_deg == 90.0) return {1.0, 0.0};
  const double t = camera.pitch_deg * std::numbers::pi / 180.0;
  return {std::sin(t), std::cos(t)};
}

Ring tilt(const Ring& plan_ring, const Camera& camera) {
  const auto [s, c] = pitch_sin_cos(camera);
  Ring out;
  out.reserve(plan_ring.size());
  for (const auto& p : plan_ring) out.push_back({p.x, p.y * s});
  return out;
}

PrismFaces project_prism(const std::vector<Ring>& footprint, double value,
                         double value_max, const Camera& camera, std::string id) {
  validate(camera);
  if (!(value >= 0.0)) throw ValidationError("prism height must be >= 0");
  const auto [s, c] = pitch_sin_cos(camera);

  PrismFaces faces;
  faces.id = std::move(id);
  faces.z = value_max > 0.0 ? camera.height_scale * value / value_max : 0.0;
  const double lift = faces.z * c;

  double min_y = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < footprint.size(); ++r) {
    const Ring& ring = footprint[r];
    Ring top;
    top.reserve(ring.size());
    for (const auto& p : ring) {
      top.push_back({p.x, p.y * s - lift});
      min_y = std::min(min_y, p.y);
    }
    faces.top.push_back(std::move(top));
  }
  faces.depth_key = footprint.empty() ? 0.0 : -min_y;
  if (!(lift > 0.0)) return faces;

  // The first ring of each part is its outer ring; later rings with the
  // opposite winding are holes, whose solid lies outside them.
  double outer_sign = 0.0;
  for (const auto& ring : footprint) {
    if (ring.size() < 2) continue;
    const double a = signed_area(ring);
    const double sign = a > 0 ? 1.0 : -1.0;
    const bool hole = outer_sign != 0.0 && sign != outer_sign;
    if (!hole) outer_sign = sign;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
      const Point a0 = ring[i], b0 = ring[i + 1];
      const double dx = b0.x - a0.x;
      // Normal pointing out of the ring's own interior.
      double ny = sign > 0 ? -dx : dx;
      if (hole) ny = -ny;
      if (!(ny > 0.0)) continue;  // not facing the viewer (south, +y on screen)
      faces.sides.push_back({{a0.x, a0.y * s},
                             {b0.x, b0.y * s},
                             {b0.x, b0.y * s - lift},
                             {a0.x, a0.y * s - lift},
                             {a0.x, a0.y * s}});
    }
  }
  return faces;
}

std::vector<PrismFaces> depth_sort(std::vector<PrismFaces> faces) {
  std::stable_sort(faces.begin(), faces.end(), [](const PrismFaces& a, const PrismFaces& b) {
    if (a.depth_key != b.depth_key) return a.depth_key > b.depth_key;
    return a.id < b.id;
  });
  return faces;
}

namespace {

std::string format_value(double v, const LegendStyle& style) {
  std::string s = fmt::format("{:.{}f}", v * style.value_scale, std::max(style.decimals, 0));
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

GroupNode swatch_group(const std::vector<Style>& swatches,
                       const std::vector<std::string>& labels, const std::string& title,
                       const LegendStyle& style) {
  GroupNode g;
  g.add(TextNode{{style.x, style.y + 12.0}, title, 13.0, "start", "#000000"});
  const double row = style.swatch + 6.0;
  for (std::size_t i = 0; i < swatches.size(); ++i) {
    const double top = style.y + 20.0 + row * static_cast<double>(i);
    Style s = swatches[i];
    if (s.stroke.empty()) {
      s.stroke = "#555555";
      s.stroke_width = 0.5;
    }
    g.add(RectNode{"", style.x, top, style.swatch, style.swatch, s});
    g.add(TextNode{{style.x + style.swatch + 8.0, top + style.swatch * 0.75},
                   i < labels.size() ? labels[i] : std::string{}, 11.0, "start",
                   "#000000"});
  }
  return g;
}

}  // namespace

std::vector<std::string> legend_labels(const Breaks& breaks, const std::string& unit_label,
                                       const LegendStyle& style) {
  const std::string unit = unit_label.empty() ? "" : " " + unit_label;
  std::vector<std::string> labels;
  const auto& b = breaks.boundaries;
  if (b.empty()) {
    labels.push_back("[" + format_value(breaks.min_value, style) + ", " +
                     format_value(breaks.max_value, style) + "]" + unit);
    return labels;
  }
  labels.push_back("< " + format_value(b.front(), style) + unit);
  for (std::size_t i = 0; i + 1 < b.size(); ++i)
    labels.push_back("[" + format_value(b[i], style) + ", " + format_value(b[i + 1], style) +
                     ")" + unit);
  labels.push_back("≥ " + format_value(b.back(), style) + unit);
  return labels;
}

GroupNode legend(const Breaks& breaks, const Palette& palette, const std::string& title,
                 const std::string& unit_label, const LegendStyle& style) {
  if (static_cast<int>(palette.size()) != breaks.effective_k)
    throw ValidationError("legend: palette has " + std::to_string(palette.size()) +
                          " colours for " + std::to_string(breaks.effective_k) + " classes");
  std::vector<Style> swatches;
  for (const auto& c : palette.colors) swatches.push_back(Style{c, "", 0.0, std::nullopt});
  return swatch_group(swatches, legend_labels(breaks, unit_label, style), title, style);
}

GroupNode alpha_legend(const AlphaScale& scale, const std::string& color,
                       const std::string& title, const std::vector<std::string>& labels,
                       const LegendStyle& style) {
  std::vector<Style> swatches;
  for (double a : scale.levels) swatches.push_back(Style{color, "", 0.0, a});
  return swatch_group(swatches, labels, title, style);
}

GroupNode swatch_legend(const std::vector<std::string>& colors,
                        const std::vector<std::string>& labels, const std::string& title,
                        const LegendStyle& style) {
  std::vector<Style> swatches;
  for (const auto& c : colors) swatches.push_back(Style{c, "", 0.0, std::nullopt});
  return swatch_group(swatches, labels, title, style);
}

}  // namespace bivmap
