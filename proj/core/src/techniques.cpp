#include "bivmap/techniques.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "bivmap/error.hpp"
#include "bivmap/geometry.hpp"
#include "render_common.hpp"

namespace bivmap {

namespace {

struct TechniqueName {
  Technique technique;
  std::string_view name;
};

constexpr TechniqueName kNames[] = {
    {Technique::choropleth, "choropleth"},   {Technique::juxtaposed, "juxtaposed"},
    {Technique::absolute, "absolute"},       {Technique::value_by_alpha, "value_by_alpha"},
    {Technique::prism3d, "prism3d"},         {Technique::bertillon, "bertillon"},
    {Technique::dotmap, "dotmap"},           {Technique::cartogram, "cartogram"},
    {Technique::noncontiguous, "noncontiguous"},
};

}  // namespace

Technique parse_technique(std::string_view name) {
  for (const auto& n : kNames)
    if (n.name == name) return n.technique;
  throw ValidationError("unknown technique '" + std::string(name) + "'");
}

std::string_view to_string(Technique t) {
  for (const auto& n : kNames)
    if (n.technique == t) return n.name;
  return "?";
}

const std::vector<Technique>& all_techniques() {
  static const std::vector<Technique> all = [] {
    std::vector<Technique> v;
    for (const auto& n : kNames) v.push_back(n.technique);
    return v;
  }();
  return all;
}

std::string region_element_id(const std::string& region_id) { return "r:" + region_id; }
std::string city_element_id(const std::string& city_id) { return "c:" + city_id; }
std::string panel_id(int n) { return "panel:" + std::to_string(n); }

std::pair<double, double> encode_bertillon(double population, double rate, double pop_max,
                                           double w_max, double h_max) {
  if (!(pop_max > 0.0)) throw ValidationError("bertillon: pop_max must be > 0");
  if (!(rate >= 0.0 && rate <= 1.0)) throw ValidationError("bertillon: rate outside [0, 1]");
  return {w_max * population / pop_max, h_max * rate};
}

double encode_dot(double population, double pop_max, double r_max) {
  if (!(pop_max > 0.0)) throw ValidationError("dot: pop_max must be > 0");
  return r_max * std::sqrt(population / pop_max);
}

std::string population_ramp_color(double population, double pop_max) {
  const double t = pop_max > 0.0 ? std::clamp(population / pop_max, 0.0, 1.0) : 0.0;
  const auto g = static_cast<unsigned char>(std::lround(255.0 * (1.0 - t)));
  return to_hex({g, g, g});
}

void validate(const RegionTechniqueSpec& spec, const DataMap& data) {
  if (spec.classes < 1) throw ValidationError("class count must be >= 1");
  if (spec.palette && static_cast<int>(spec.palette->size()) != spec.classes)
    throw ValidationError("palette has " + std::to_string(spec.palette->size()) +
                          " colours but " + std::to_string(spec.classes) +
                          " classes were requested");
  validate(spec.camera);
  make_alpha_scale(spec.alpha.levels);
  for (const auto* cap : {&spec.glyph_width_max, &spec.glyph_height_max, &spec.dot_radius_max})
    if (*cap && !(**cap > 0.0)) throw ValidationError("glyph caps must be > 0");
  if (!(spec.width > 2 * kLegendColumn && spec.height > 4 * kMargin))
    throw ValidationError("scene is too small");
  validate(spec.cartogram);
  if (data.size() == 0) throw ValidationError("data map has no regions");
  for (const auto& id : spec.highlight)
    if (!data.map.find(id)) throw ValidationError("highlight: unknown region '" + id + "'");
}

namespace detail {

TiltedFrame tilted_frame(const BBox& box, const Panel& p, const Camera& cam) {
  const auto [s, c] = pitch_sin_cos(cam);
  TiltedFrame f;
  f.lift_max = cam.height_scale * c;
  if (!(p.height > f.lift_max)) throw ValidationError("height scale exceeds the panel height");
  f.plan = fit_viewport(box, p.x, p.y, p.width, (p.height - f.lift_max) / s);
  f.shift = (p.y + f.lift_max) - p.y * s;
  return f;
}

}  // namespace detail

namespace {

using detail::fill_style;
using detail::layout_panels;
using detail::Panel;
using detail::population_label;

double shorter_side_px(const Region& r, const Viewport& v) {
  const BBox b = region_bbox(r);
  return v.scale * std::min(b.width(), b.height());
}

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

// Indices by descending value, ties by region id.
std::vector<std::size_t> descending(const std::vector<double>& v, const RegionMap& map) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (v[a] != v[b]) return v[a] > v[b];
    return map.regions[a].id < map.regions[b].id;
  });
  return order;
}

class RegionRenderer {
 public:
  RegionRenderer(const DataMap& data, const RegionTechniqueSpec& spec)
      : data_(data), spec_(spec) {
    breaks_ = quantile_breaks(data.rate, spec.classes);
    const Palette base = spec.palette ? *spec.palette : default_palette(spec.classes);
    palette_ = fit_palette(base, breaks_.effective_k);
    pop_max_ = *std::max_element(data.population.begin(), data.population.end());
  }

  RenderResult render() {
    result_.scene.width = spec_.width;
    result_.scene.height = spec_.height;
    result_.scene.add(RectNode{"background", 0, 0, spec_.width, spec_.height,
                               Style{"#ffffff", "", 0.0, std::nullopt}});
    switch (spec_.technique) {
      case Technique::choropleth: choropleth(); break;
      case Technique::juxtaposed: juxtaposed(); break;
      case Technique::absolute: absolute(); break;
      case Technique::value_by_alpha: value_by_alpha(); break;
      case Technique::prism3d: prism3d(); break;
      case Technique::bertillon: bertillon(); break;
      case Technique::dotmap: dotmap(); break;
      case Technique::cartogram: cartogram(); break;
      case Technique::noncontiguous: noncontiguous(); break;
    }
    return std::move(result_);
  }

 private:
  const std::string& class_color(std::size_t i) const {
    return palette_[static_cast<std::size_t>(classify(data_.rate[i], breaks_))];
  }

  LegendStyle legend_at(const Panel& p, double y = kMargin) const {
    LegendStyle s;
    s.x = p.legend_x;
    s.y = y;
    return s;
  }

  void statistic_legend(const Panel& p) {
    LegendStyle s = legend_at(p);
    s.value_scale = 100.0;
    s.decimals = 2;
    last_legend_bottom_ = detail::legend_bottom(
        result_.scene.add(legend(breaks_, palette_, "Statistic", "%", s)));
  }

  // One path per region, in map order.
  void region_paths(GroupNode& panel, const Viewport& v,
                    const std::vector<std::vector<Polygon>>& geometry,
                    const std::vector<Style>& styles) {
    for (std::size_t i = 0; i < data_.size(); ++i)
      panel.add(PathNode{region_element_id(data_.map.regions[i].id), v.to_pixels(geometry[i]),
                         styles[i]});
  }

  void highlights(GroupNode& panel, const Viewport& v,
                  const std::vector<std::vector<Polygon>>& geometry) {
    for (const auto& id : spec_.highlight) {
      const std::size_t i = data_.index_of(id);
      panel.add(PathNode{region_element_id(id) + "/highlight", v.to_pixels(geometry[i]),
                         Style{"none", "#222222", 3.0, std::nullopt}});
    }
  }

  std::vector<std::vector<Polygon>> original_geometry() const {
    std::vector<std::vector<Polygon>> g;
    for (const auto& r : data_.map.regions) g.push_back(r.parts);
    return g;
  }

  std::vector<Style> class_styles() const {
    std::vector<Style> s;
    for (std::size_t i = 0; i < data_.size(); ++i) s.push_back(fill_style(class_color(i)));
    return s;
  }

  // Base statistic choropleth in panel 0; returns its viewport.
  Viewport base_choropleth(GroupNode& panel, const Panel& p) {
    const Viewport v = fit_viewport(data_.map.bbox, p.x, p.y, p.width, p.height);
    region_paths(panel, v, original_geometry(), class_styles());
    return v;
  }

  void choropleth() {
    const Panel p = layout_panels(spec_.width, spec_.height, 1)[0];
    GroupNode panel{panel_id(0), std::nullopt, {}};
    const Viewport v = base_choropleth(panel, p);
    highlights(panel, v, original_geometry());
    result_.scene.add(std::move(panel));
    statistic_legend(p);
  }

  void juxtaposed() {
    const auto panels = layout_panels(spec_.width, spec_.height, 2);
    GroupNode left{panel_id(0), std::nullopt, {}};
    const Viewport v = base_choropleth(left, panels[0]);
    highlights(left, v, original_geometry());
    result_.scene.add(std::move(left));

    GroupNode right{panel_id(1), std::nullopt, {}};
    const Viewport v2 =
        fit_viewport(data_.map.bbox, panels[1].x, panels[1].y, panels[1].width, panels[1].height);
    std::vector<Style> ramp;
    for (std::size_t i = 0; i < data_.size(); ++i)
      ramp.push_back(fill_style(population_ramp_color(data_.population[i], pop_max_)));
    region_paths(right, v2, original_geometry(), ramp);
    highlights(right, v2, original_geometry());
    result_.scene.add(std::move(right));

    statistic_legend(panels[0]);
    std::vector<std::string> colors, labels;
    for (int i = 0; i <= 4; ++i) {
      const double value = pop_max_ * i / 4.0;
      colors.push_back(population_ramp_color(value, pop_max_));
      labels.push_back(population_label(value));
    }
    result_.scene.add(swatch_legend(colors, labels, "Population", legend_at(panels[1])));
  }

  void absolute() {
    std::vector<double> products(data_.size());
    for (std::size_t i = 0; i < data_.size(); ++i)
      products[i] = data_.population[i] * data_.rate[i];
    const Breaks b = quantile_breaks(products, spec_.classes);
    const Palette pal =
        fit_palette(spec_.palette ? *spec_.palette : default_palette(spec_.classes), b.effective_k);

    const Panel p = layout_panels(spec_.width, spec_.height, 1)[0];
    GroupNode panel{panel_id(0), std::nullopt, {}};
    const Viewport v = fit_viewport(data_.map.bbox, p.x, p.y, p.width, p.height);
    std::vector<Style> styles;
    for (std::size_t i = 0; i < data_.size(); ++i)
      styles.push_back(fill_style(pal[static_cast<std::size_t>(classify(products[i], b))]));
    region_paths(panel, v, original_geometry(), styles);
    highlights(panel, v, original_geometry());
    result_.scene.add(std::move(panel));

    LegendStyle s = legend_at(p);
    s.decimals = 0;
    result_.scene.add(legend(b, pal, "Absolute count", "persons", s));
  }

  void value_by_alpha() {
    const Panel p = layout_panels(spec_.width, spec_.height, 1)[0];
    GroupNode panel{panel_id(0), std::nullopt, {}};
    const Viewport v = fit_viewport(data_.map.bbox, p.x, p.y, p.width, p.height);
    const Breaks pop_breaks = quantile_breaks(data_.population, spec_.alpha.k_alpha());
    std::vector<Style> styles;
    for (std::size_t i = 0; i < data_.size(); ++i) {
      const double a = alpha_for_class(classify(data_.population[i], pop_breaks),
                                       pop_breaks.effective_k, spec_.alpha);
      styles.push_back(fill_style(class_color(i), a));
    }
    region_paths(panel, v, original_geometry(), styles);
    highlights(panel, v, original_geometry());
    result_.scene.add(std::move(panel));

    statistic_legend(p);
    AlphaScale used;
    for (int c = 0; c < pop_breaks.effective_k; ++c)
      used.levels.push_back(alpha_for_class(c, pop_breaks.effective_k, spec_.alpha));
    LegendStyle s = legend_at(p, last_legend_bottom_);
    s.decimals = 0;
    result_.scene.add(alpha_legend(used, "#444444", "Population (opacity)",
                                   legend_labels(pop_breaks, "", s), s));
  }

  void prism3d() {
    const Panel p = layout_panels(spec_.width, spec_.height, 1)[0];
    const Camera& cam = spec_.camera;
    const detail::TiltedFrame frame = detail::tilted_frame(data_.map.bbox, p, cam);
    const Viewport& v = frame.plan;
    const double lift_max = frame.lift_max;
    auto shifted = [&frame](std::vector<Ring> rings) { return frame.shifted(std::move(rings)); };

    std::vector<PrismFaces> faces;
    for (std::size_t i = 0; i < data_.size(); ++i) {
      const auto& r = data_.map.regions[i];
      faces.push_back(project_prism(v.to_pixels(r.parts), data_.population[i], pop_max_, cam, r.id));
    }

    GroupNode panel{panel_id(0), std::nullopt, {}};
    for (const auto& f : depth_sort(std::move(faces))) {
      const std::size_t i = data_.index_of(f.id);
      const std::string& color = class_color(i);
      if (!f.sides.empty())
        panel.add(PathNode{region_element_id(f.id) + "/side", shifted(f.sides),
                           fill_style(to_hex(scale_rgb(parse_hex_color(color), 0.7)))});
      panel.add(PathNode{region_element_id(f.id), shifted(f.top), fill_style(color)});
    }
    for (const auto& id : spec_.highlight) {
      const std::size_t i = data_.index_of(id);
      const auto f = project_prism(v.to_pixels(data_.map.regions[i].parts), data_.population[i],
                                   pop_max_, cam, id);
      panel.add(PathNode{region_element_id(id) + "/highlight", shifted(f.top),
                         Style{"none", "#222222", 3.0, std::nullopt}});
    }
    result_.scene.add(std::move(panel));

    statistic_legend(p);
    GroupNode key;
    const double x = p.legend_x, y = last_legend_bottom_;
    key.add(TextNode{{x, y + 12.0}, "Population (height)", 13.0, "start", "#000000"});
    key.add(RectNode{"", x, y + 20.0, 10.0, lift_max, Style{"#888888", "", 0.0, std::nullopt}});
    key.add(TextNode{{x + 16.0, y + 30.0}, population_label(pop_max_), 11.0, "start", "#000000"});
    result_.scene.add(std::move(key));
  }

  double default_cap(const Viewport& v, std::size_t host) const {
    return 0.6 * shorter_side_px(data_.map.regions[host], v);
  }

  void bertillon() {
    const Panel p = layout_panels(spec_.width, spec_.height, 1)[0];
    GroupNode panel{panel_id(0), std::nullopt, {}};
    const Viewport v = base_choropleth(panel, p);
    const std::size_t pop_host = argmax(data_.population);
    const std::size_t rate_host = argmax(data_.rate);
    const double max_rate = data_.rate[rate_host];
    const double w_max = spec_.glyph_width_max.value_or(default_cap(v, pop_host));
    const double h_max = spec_.glyph_height_max.value_or(
        max_rate > 0.0 ? default_cap(v, rate_host) / max_rate : default_cap(v, rate_host));

    for (std::size_t i : descending(data_.population, data_.map)) {
      const auto& r = data_.map.regions[i];
      const auto [w, h] = encode_bertillon(data_.population[i], data_.rate[i], pop_max_, w_max, h_max);
      const Point a = v.to_pixels(label_anchor(r));
      Style s{class_color(i), "#000000", 1.0, std::nullopt};
      panel.add(RectNode{region_element_id(r.id) + "/glyph", a.x - w / 2.0, a.y - h / 2.0, w, h, s});
    }
    highlights(panel, v, original_geometry());
    result_.scene.add(std::move(panel));

    statistic_legend(p);
    GroupNode key;
    const double x = p.legend_x, y = last_legend_bottom_;
    key.add(TextNode{{x, y + 12.0}, "Glyph", 13.0, "start", "#000000"});
    key.add(TextNode{{x, y + 30.0}, "width: population", 11.0, "start", "#000000"});
    key.add(TextNode{{x, y + 46.0}, "height: statistic", 11.0, "start", "#000000"});
    key.add(TextNode{{x, y + 62.0}, "area: absolute count", 11.0, "start", "#000000"});
    result_.scene.add(std::move(key));
  }

  void dotmap() {
    const Panel p = layout_panels(spec_.width, spec_.height, 1)[0];
    GroupNode panel{panel_id(0), std::nullopt, {}};
    const Viewport v = base_choropleth(panel, p);
    const double r_max =
        spec_.dot_radius_max.value_or(default_cap(v, argmax(data_.population)));
    for (std::size_t i : descending(data_.population, data_.map)) {
      const auto& r = data_.map.regions[i];
      const Point a = v.to_pixels(label_anchor(r));
      panel.add(CircleNode{region_element_id(r.id) + "/dot", a,
                           encode_dot(data_.population[i], pop_max_, r_max),
                           Style{"#000000", "#ffffff", 0.75, 0.45}});
    }
    highlights(panel, v, original_geometry());
    result_.scene.add(std::move(panel));

    statistic_legend(p);
    size_key(p.legend_x, last_legend_bottom_, r_max);
  }

  // Key circles at true size for a quarter and a sixteenth of the maximum.
  void size_key(double x, double y, double r_max) {
    GroupNode key;
    key.add(TextNode{{x, y + 12.0}, "Population (area)", 13.0, "start", "#000000"});
    double top = y + 22.0;
    for (double f : {0.25, 0.0625}) {
      const double r = encode_dot(pop_max_ * f, pop_max_, r_max);
      key.add(CircleNode{"", {x + r_max / 2.0, top + r}, r,
                         Style{"#000000", "#ffffff", 0.75, 0.45}});
      key.add(TextNode{{x + r_max + 8.0, top + r + 4.0}, population_label(pop_max_ * f), 11.0,
                       "start", "#000000"});
      top += 2 * r + 8.0;
    }
    result_.scene.add(std::move(key));
  }

  void cartogram() {
    ContiguousResult solved = contiguous_cartogram(data_, spec_.cartogram);
    const Panel p = layout_panels(spec_.width, spec_.height, 1)[0];
    GroupNode panel{panel_id(0), std::nullopt, {}};
    const Viewport v = fit_viewport(solved.map.bbox, p.x, p.y, p.width, p.height);
    std::vector<std::vector<Polygon>> geometry;
    for (const auto& r : solved.map.regions) geometry.push_back(r.parts);
    region_paths(panel, v, geometry, class_styles());
    highlights(panel, v, geometry);
    result_.scene.add(std::move(panel));
    statistic_legend(p);
    result_.cartogram = std::move(solved.diagnostics);
  }

  void noncontiguous() {
    NonContiguousLayout layout = noncontiguous_layout(data_);
    std::vector<std::vector<Polygon>> geometry;
    BBox box;
    for (std::size_t i = 0; i < data_.size(); ++i) {
      geometry.push_back(apply_placement(data_.map.regions[i].parts, layout.placements[i]));
      for (const auto& part : geometry.back()) box.expand(ring_bbox(part.outer));
    }
    const Panel p = layout_panels(spec_.width, spec_.height, 1)[0];
    GroupNode panel{panel_id(0), std::nullopt, {}};
    const Viewport v = fit_viewport(box, p.x, p.y, p.width, p.height);
    region_paths(panel, v, geometry, class_styles());
    highlights(panel, v, geometry);
    result_.scene.add(std::move(panel));
    statistic_legend(p);
    result_.layout = std::move(layout);
  }

  const DataMap& data_;
  const RegionTechniqueSpec& spec_;
  Breaks breaks_;
  Palette palette_;
  double pop_max_ = 0.0;
  double last_legend_bottom_ = kMargin;
  RenderResult result_;
};

}  // namespace

RenderResult render_region_map_detailed(const DataMap& data, const RegionTechniqueSpec& spec) {
  validate(spec, data);
  return RegionRenderer(data, spec).render();
}

Scene render_region_map(const DataMap& data, const RegionTechniqueSpec& spec) {
  return render_region_map_detailed(data, spec).scene;
}

}  // namespace bivmap
