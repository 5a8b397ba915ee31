#include "bivmap/popchart.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "bivmap/error.hpp"
#include "bivmap/geometry.hpp"
#include "bivmap/techniques.hpp"
#include "render_common.hpp"

namespace bivmap {

double DensityGrid::total() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

DensityGrid kde_grid(const CityLayer& cities, double bandwidth, std::size_t resolution,
                     const BBox& extent) {
  if (!(bandwidth > 0.0)) throw ValidationError("kde: bandwidth must be > 0");
  if (resolution < 1) throw ValidationError("kde: resolution must be >= 1");
  if (!(extent.width() > 0.0 && extent.height() > 0.0))
    throw ValidationError("kde: extent must have positive width and height");

  DensityGrid g;
  g.origin = {extent.min_x, extent.min_y};
  g.nx = g.ny = resolution;
  g.cell_width = extent.width() / static_cast<double>(g.nx);
  g.cell_height = extent.height() / static_cast<double>(g.ny);
  g.weights.assign(g.nx * g.ny, 0.0);
  if (cities.cities.empty()) {
    g.warnings.push_back("empty city layer: density grid is all zero");
    return g;
  }

  const double cutoff = 4.0 * bandwidth;
  const double cutoff2 = cutoff * cutoff;
  const double norm = g.cell_width * g.cell_height / (2.0 * std::numbers::pi * bandwidth * bandwidth);
  const double inv2b2 = 1.0 / (2.0 * bandwidth * bandwidth);
  auto cell_range = [](double lo, double hi, double origin, double size, std::size_t n) {
    const double a = std::floor((lo - origin) / size);
    const double b = std::floor((hi - origin) / size);
    const auto first = static_cast<std::ptrdiff_t>(std::max(a, 0.0));
    const auto last = static_cast<std::ptrdiff_t>(std::min(b, static_cast<double>(n) - 1.0));
    return std::pair{first, last};
  };

  for (const auto& c : cities.cities) {
    if (!(c.population > 0.0)) continue;
    const auto [x0, x1] = cell_range(c.location.x - cutoff, c.location.x + cutoff, g.origin.x,
                                     g.cell_width, g.nx);
    const auto [y0, y1] = cell_range(c.location.y - cutoff, c.location.y + cutoff, g.origin.y,
                                     g.cell_height, g.ny);
    for (auto iy = y0; iy <= y1; ++iy) {
      for (auto ix = x0; ix <= x1; ++ix) {
        const Point center = g.cell_center(static_cast<std::size_t>(ix), static_cast<std::size_t>(iy));
        const double dx = center.x - c.location.x, dy = center.y - c.location.y;
        const double d2 = dx * dx + dy * dy;
        if (d2 > cutoff2) continue;
        g.weights[static_cast<std::size_t>(iy) * g.nx + static_cast<std::size_t>(ix)] +=
            c.population * norm * std::exp(-d2 * inv2b2);
      }
    }
  }
  return g;
}

std::vector<HeatCell> heatmap_cells(const DensityGrid& grid) {
  std::vector<double> nonzero;
  for (double w : grid.weights)
    if (w > 0.0) nonzero.push_back(w);
  if (nonzero.empty()) return {};
  std::sort(nonzero.begin(), nonzero.end());
  // Nearest-rank 99th percentile.
  const auto rank = static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(nonzero.size())));
  const double p99 = nonzero[std::max<std::size_t>(rank, 1) - 1];

  std::vector<HeatCell> cells;
  for (std::size_t iy = 0; iy < grid.ny; ++iy) {
    for (std::size_t ix = 0; ix < grid.nx; ++ix) {
      const double w = grid.at(ix, iy);
      if (!(w > 0.0)) continue;
      const double opacity = std::min(1.0, w / p99);
      if (opacity < 1.0 / 255.0) continue;
      HeatCell c;
      c.ix = ix;
      c.iy = iy;
      c.rect.expand(Point{grid.origin.x + ix * grid.cell_width, grid.origin.y + iy * grid.cell_height});
      c.rect.expand(Point{grid.origin.x + (ix + 1) * grid.cell_width,
                          grid.origin.y + (iy + 1) * grid.cell_height});
      c.opacity = opacity;
      cells.push_back(c);
    }
  }
  return cells;
}

PopchartVariant parse_popchart_variant(std::string_view name) {
  if (name == "dasymetric") return PopchartVariant::dasymetric;
  if (name == "dot") return PopchartVariant::dot;
  if (name == "heatmap") return PopchartVariant::heatmap;
  if (name == "prism") return PopchartVariant::prism;
  throw ValidationError("unknown popchart variant '" + std::string(name) + "'");
}

std::string_view to_string(PopchartVariant v) {
  switch (v) {
    case PopchartVariant::dasymetric: return "dasymetric";
    case PopchartVariant::dot: return "dot";
    case PopchartVariant::heatmap: return "heatmap";
    case PopchartVariant::prism: return "prism";
  }
  return "?";
}

void validate(const PopchartSpec& spec) {
  if (spec.classes < 1) throw ValidationError("class count must be >= 1");
  if (spec.palette && static_cast<int>(spec.palette->size()) != spec.classes)
    throw ValidationError("palette has " + std::to_string(spec.palette->size()) +
                          " colours but " + std::to_string(spec.classes) +
                          " classes were requested");
  if (spec.bandwidth && !(*spec.bandwidth > 0.0))
    throw ValidationError("bandwidth must be > 0");
  if (spec.resolution < 16) throw ValidationError("grid resolution must be >= 16");
  validate(spec.camera);
  if (!(spec.dot_radius_max > 0.0)) throw ValidationError("dot radius cap must be > 0");
  make_alpha_scale(spec.overlay_alpha.levels);
  if (spec.reference_density && !(*spec.reference_density > 0.0))
    throw ValidationError("reference density must be > 0");
  if (!(spec.width > 2 * kLegendColumn && spec.height > 4 * kMargin))
    throw ValidationError("scene is too small");
}

double default_reference_density(const DataMap& data) {
  double pop = 0.0, area = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    pop += data.population[i];
    area += region_area(data.map.regions[i]);
  }
  if (!(pop > 0.0 && area > 0.0)) throw ValidationError("cannot derive a reference density");
  return 10.0 * pop / area;
}

Polygon city_footprint(const City& city, double reference_density) {
  if (city.footprint) return *city.footprint;
  if (!(reference_density > 0.0)) throw ValidationError("reference density must be > 0");
  const double half = std::sqrt(city.population / reference_density) / 2.0;
  const Point c = city.location;
  Polygon p;
  p.outer = {{c.x - half, c.y - half}, {c.x + half, c.y - half}, {c.x + half, c.y + half},
             {c.x - half, c.y + half}, {c.x - half, c.y - half}};
  return p;
}

namespace {

using detail::fill_style;
using detail::Panel;

class PopchartRenderer {
 public:
  PopchartRenderer(const DataMap& data, const CityLayer& cities, const PopchartSpec& spec)
      : data_(data), cities_(cities), spec_(spec) {
    breaks_ = quantile_breaks(data.rate, spec.classes);
    palette_ = fit_palette(spec.palette ? *spec.palette : default_palette(spec.classes),
                           breaks_.effective_k);
    for (const auto& c : cities.cities) {
      city_region_.push_back(data.index_of(c.region_id));
      city_pop_max_ = std::max(city_pop_max_, c.population);
    }
    panel_ = detail::layout_panels(spec.width, spec.height, 1)[0];
  }

  Scene render() {
    scene_.width = spec_.width;
    scene_.height = spec_.height;
    scene_.add(RectNode{"background", 0, 0, spec_.width, spec_.height,
                        Style{"#ffffff", "", 0.0, std::nullopt}});
    if (spec_.variant == PopchartVariant::prism) {
      prism();
    } else {
      flat();
    }
    return std::move(scene_);
  }

 private:
  const std::string& region_color(std::size_t region) const {
    return palette_[static_cast<std::size_t>(classify(data_.rate[region], breaks_))];
  }

  // Cities by descending population, ties by id.
  std::vector<std::size_t> city_order() const {
    std::vector<std::size_t> order(cities_.cities.size());
    std::iota(order.begin(), order.end(), 0);
    const auto& c = cities_.cities;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (c[a].population != c[b].population) return c[a].population > c[b].population;
      return c[a].id < c[b].id;
    });
    return order;
  }

  double reference_density() const {
    return spec_.reference_density.value_or(default_reference_density(data_));
  }

  double statistic_legend() {
    LegendStyle s;
    s.x = panel_.legend_x;
    s.y = kMargin;
    s.value_scale = 100.0;
    s.decimals = 2;
    return detail::legend_bottom(scene_.add(legend(breaks_, palette_, "Statistic", "%", s)));
  }

  void flat() {
    const Viewport v = fit_viewport(data_.map.bbox, panel_.x, panel_.y, panel_.width, panel_.height);
    GroupNode panel{panel_id(0), std::nullopt, {}};
    for (std::size_t i = 0; i < data_.size(); ++i) {
      const auto& r = data_.map.regions[i];
      panel.add(PathNode{region_element_id(r.id), v.to_pixels(r.parts), fill_style(region_color(i))});
    }
    GroupNode overlay{"overlay", std::nullopt, {}};
    switch (spec_.variant) {
      case PopchartVariant::dasymetric: dasymetric(overlay, v); break;
      case PopchartVariant::dot: dots(overlay, v); break;
      case PopchartVariant::heatmap: heatmap(overlay, v); break;
      case PopchartVariant::prism: break;
    }
    panel.add(std::move(overlay));
    for (const auto& id : spec_.highlight)
      panel.add(PathNode{region_element_id(id) + "/highlight",
                         v.to_pixels(data_.map.at(id).parts),
                         Style{"none", "#222222", 3.0, std::nullopt}});
    scene_.add(std::move(panel));
    overlay_legend(statistic_legend());
  }

  void dasymetric(GroupNode& overlay, const Viewport& v) {
    std::vector<double> pops;
    for (const auto& c : cities_.cities) pops.push_back(c.population);
    if (pops.empty()) return;
    const Breaks b = quantile_breaks(pops, spec_.overlay_alpha.k_alpha());
    const double rho = reference_density();
    for (std::size_t i : city_order()) {
      const City& c = cities_.cities[i];
      const double a = alpha_for_class(classify(c.population, b), b.effective_k, spec_.overlay_alpha);
      const Polygon fp = city_footprint(c, rho);
      overlay.add(PathNode{city_element_id(c.id), v.to_pixels(std::vector<Polygon>{fp}),
                           Style{"#000000", "", 0.0, a}});
    }
    overlay_breaks_ = b;
  }

  void dots(GroupNode& overlay, const Viewport& v) {
    if (!(city_pop_max_ > 0.0)) return;
    for (std::size_t i : city_order()) {
      const City& c = cities_.cities[i];
      overlay.add(CircleNode{city_element_id(c.id), v.to_pixels(c.location),
                             encode_dot(c.population, city_pop_max_, spec_.dot_radius_max),
                             Style{"#000000", "#ffffff", 0.5, 0.5}});
    }
  }

  void heatmap(GroupNode& overlay, const Viewport& v) {
    const double bandwidth = spec_.bandwidth.value_or(0.015 * data_.map.bbox.diagonal());
    const DensityGrid grid = kde_grid(cities_, bandwidth, spec_.resolution, data_.map.bbox);
    for (const auto& cell : heatmap_cells(grid)) {
      const Point tl = v.to_pixels(Point{cell.rect.min_x, cell.rect.max_y});
      const Point br = v.to_pixels(Point{cell.rect.max_x, cell.rect.min_y});
      overlay.add(RectNode{"", tl.x, tl.y, br.x - tl.x, br.y - tl.y,
                           Style{"#000000", "", 0.0, cell.opacity}});
    }
  }

  void prism() {
    const Camera& cam = spec_.camera;
    const detail::TiltedFrame frame = detail::tilted_frame(data_.map.bbox, panel_, cam);
    const double rho = reference_density();

    GroupNode panel{panel_id(0), std::nullopt, {}};
    for (std::size_t i = 0; i < data_.size(); ++i) {
      const auto& r = data_.map.regions[i];
      const auto ground = project_prism(frame.plan.to_pixels(r.parts), 0.0, 1.0, cam, r.id);
      panel.add(PathNode{region_element_id(r.id), frame.shifted(ground.top),
                         fill_style(region_color(i))});
    }
    for (const auto& id : spec_.highlight) {
      const auto ground = project_prism(frame.plan.to_pixels(data_.map.at(id).parts), 0.0, 1.0, cam, id);
      panel.add(PathNode{region_element_id(id) + "/highlight", frame.shifted(ground.top),
                         Style{"none", "#222222", 3.0, std::nullopt}});
    }

    std::vector<PrismFaces> faces;
    for (std::size_t i : city_order()) {
      const City& c = cities_.cities[i];
      const Polygon fp = city_footprint(c, rho);
      faces.push_back(project_prism(frame.plan.to_pixels(std::vector<Polygon>{fp}), c.population,
                                    city_pop_max_, cam, c.id));
    }
    GroupNode overlay{"overlay", std::nullopt, {}};
    for (const auto& f : depth_sort(std::move(faces))) {
      const std::size_t ci = city_index(f.id);
      const std::string& color = region_color(city_region_[ci]);
      if (!f.sides.empty())
        overlay.add(PathNode{city_element_id(f.id) + "/side", frame.shifted(f.sides),
                             Style{to_hex(scale_rgb(parse_hex_color(color), 0.7)), "#333333", 0.3,
                                   std::nullopt}});
      overlay.add(PathNode{city_element_id(f.id), frame.shifted(f.top),
                           Style{color, "#333333", 0.3, std::nullopt}});
    }
    panel.add(std::move(overlay));
    scene_.add(std::move(panel));
    lift_max_ = frame.lift_max;
    overlay_legend(statistic_legend());
  }

  std::size_t city_index(const std::string& id) const {
    for (std::size_t i = 0; i < cities_.cities.size(); ++i)
      if (cities_.cities[i].id == id) return i;
    throw ValidationError("unknown city '" + id + "'");
  }

  void overlay_legend(double y) {
    LegendStyle s;
    s.x = panel_.legend_x;
    s.y = y;
    s.decimals = 0;
    const double x = s.x;
    GroupNode key;
    switch (spec_.variant) {
      case PopchartVariant::dasymetric: {
        if (!overlay_breaks_) return;
        AlphaScale used;
        for (int c = 0; c < overlay_breaks_->effective_k; ++c)
          used.levels.push_back(alpha_for_class(c, overlay_breaks_->effective_k, spec_.overlay_alpha));
        scene_.add(alpha_legend(used, "#000000", "City population (opacity)",
                                legend_labels(*overlay_breaks_, "", s), s));
        return;
      }
      case PopchartVariant::dot: {
        key.add(TextNode{{x, y + 12.0}, "City population (area)", 13.0, "start", "#000000"});
        double top = y + 22.0;
        for (double f : {1.0, 0.25}) {
          const double r = spec_.dot_radius_max * std::sqrt(f);
          key.add(CircleNode{"", {x + spec_.dot_radius_max, top + r}, r,
                             Style{"#000000", "#ffffff", 0.5, 0.5}});
          key.add(TextNode{{x + 2 * spec_.dot_radius_max + 8.0, top + r + 4.0},
                           detail::population_label(city_pop_max_ * f), 11.0, "start", "#000000"});
          top += 2 * r + 8.0;
        }
        break;
      }
      case PopchartVariant::heatmap: {
        std::vector<std::string> labels{"low density", "", "", "", "high density"};
        AlphaScale ramp{{0.2, 0.4, 0.6, 0.8, 1.0}};
        scene_.add(alpha_legend(ramp, "#000000", "Population density", labels, s));
        return;
      }
      case PopchartVariant::prism: {
        key.add(TextNode{{x, y + 12.0}, "City population (height)", 13.0, "start", "#000000"});
        key.add(RectNode{"", x, y + 20.0, 10.0, lift_max_, Style{"#888888", "", 0.0, std::nullopt}});
        key.add(TextNode{{x + 16.0, y + 30.0}, detail::population_label(city_pop_max_), 11.0,
                         "start", "#000000"});
        break;
      }
    }
    scene_.add(std::move(key));
  }

  const DataMap& data_;
  const CityLayer& cities_;
  const PopchartSpec& spec_;
  Breaks breaks_;
  Palette palette_;
  std::vector<std::size_t> city_region_;
  double city_pop_max_ = 0.0;
  Panel panel_{};
  std::optional<Breaks> overlay_breaks_;
  double lift_max_ = 0.0;
  Scene scene_;
};

}  // namespace

Scene render_popchart(const DataMap& data, const CityLayer& cities, const PopchartSpec& spec) {
  validate(spec);
  if (data.size() == 0) throw ValidationError("data map has no regions");
  for (const auto& id : spec.highlight)
    if (!data.map.find(id)) throw ValidationError("highlight: unknown region '" + id + "'");
  for (const auto& c : cities.cities)
    if (!data.map.find(c.region_id))
      throw ValidationError("city '" + c.id + "': unknown region '" + c.region_id + "'");
  return PopchartRenderer(data, cities, spec).render();
}

}  // namespace bivmap
