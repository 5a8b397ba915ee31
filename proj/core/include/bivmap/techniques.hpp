#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bivmap/cartogram.hpp"
#include "bivmap/classify.hpp"
#include "bivmap/scene.hpp"
#include "bivmap/types.hpp"

namespace bivmap {

enum class Technique {
  choropleth,
  juxtaposed,
  absolute,
  value_by_alpha,
  prism3d,
  bertillon,
  dotmap,
  cartogram,
  noncontiguous,
};

Technique parse_technique(std::string_view name);
std::string_view to_string(Technique t);
const std::vector<Technique>& all_techniques();

struct RegionTechniqueSpec {
  Technique technique = Technique::choropleth;
  int classes = 5;
  std::optional<Palette> palette;  // default_palette(classes) when absent
  AlphaScale alpha = default_alpha_scale();
  Camera camera;
  // Glyph caps in pixels; when absent they default to 60% of the shorter
  // bbox side of the region holding the maximum value.
  std::optional<double> glyph_width_max;
  std::optional<double> glyph_height_max;
  std::optional<double> dot_radius_max;
  std::vector<std::string> highlight;
  double width = 960.0;
  double height = 640.0;
  ContiguousParams cartogram;
};

void validate(const RegionTechniqueSpec& spec, const DataMap& data);

// Bertillon glyph: width encodes population, height the rate, so the area
// encodes their product.
std::pair<double, double> encode_bertillon(double population, double rate,
                                           double pop_max, double w_max,
                                           double h_max);

// Area-proportional symbol radius.
double encode_dot(double population, double pop_max, double r_max);

// Grey level for the unclassed population panel: white at 0, black at pop_max.
std::string population_ramp_color(double population, double pop_max);

// Scene element ids.
std::string region_element_id(const std::string& region_id);
std::string city_element_id(const std::string& city_id);
std::string panel_id(int n);

struct RenderResult {
  Scene scene;
  // Set for the cartogram technique.
  std::optional<ContiguousDiagnostics> cartogram;
  // Set for the noncontiguous technique.
  std::optional<NonContiguousLayout> layout;
};

RenderResult render_region_map_detailed(const DataMap& data,
                                        const RegionTechniqueSpec& spec);
Scene render_region_map(const DataMap& data, const RegionTechniqueSpec& spec);

// Legend column width reserved on the right of every panel layout.
inline constexpr double kLegendColumn = 200.0;
inline constexpr double kMargin = 16.0;

}  // namespace bivmap
