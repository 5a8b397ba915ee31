#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bivmap/classify.hpp"
#include "bivmap/scene.hpp"
#include "bivmap/types.hpp"

namespace bivmap {

struct DensityGrid {
  Point origin;  // lower-left corner in map units
  double cell_width = 0.0;
  double cell_height = 0.0;
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<double> weights;  // row-major, row 0 at origin.y
  std::vector<std::string> warnings;

  double at(std::size_t ix, std::size_t iy) const { return weights[iy * nx + ix]; }
  double total() const;
  Point cell_center(std::size_t ix, std::size_t iy) const {
    return {origin.x + (ix + 0.5) * cell_width, origin.y + (iy + 0.5) * cell_height};
  }
};

// Gaussian kernel density of city populations, truncated at four bandwidths.
// Each cell holds persons: sum of pop * K(d / bandwidth) * cell area.
DensityGrid kde_grid(const CityLayer& cities, double bandwidth,
                     std::size_t resolution, const BBox& extent);

struct HeatCell {
  std::size_t ix = 0;
  std::size_t iy = 0;
  BBox rect;  // map units
  double opacity = 0.0;
};

// Opacity = min(1, weight / p99 of the non-zero weights); cells below 1/255
// are dropped.
std::vector<HeatCell> heatmap_cells(const DensityGrid& grid);

enum class PopchartVariant { dasymetric, dot, heatmap, prism };

PopchartVariant parse_popchart_variant(std::string_view name);
std::string_view to_string(PopchartVariant v);

struct PopchartSpec {
  PopchartVariant variant = PopchartVariant::dot;
  int classes = 5;
  std::optional<Palette> palette;
  std::optional<double> bandwidth;  // map units; 1.5% of bbox diagonal
  std::size_t resolution = 256;
  Camera camera;
  double dot_radius_max = 24.0;  // px
  AlphaScale overlay_alpha = make_alpha_scale({0.2, 0.4, 0.6, 0.8, 1.0});
  // Persons per square map unit for substituted footprints; by default ten
  // times the national average density.
  std::optional<double> reference_density;
  std::vector<std::string> highlight;
  double width = 960.0;
  double height = 640.0;
};

void validate(const PopchartSpec& spec);

// Footprint given in the city record, or a square centred on the city with
// area population / reference_density.
Polygon city_footprint(const City& city, double reference_density);
double default_reference_density(const DataMap& data);

Scene render_popchart(const DataMap& data, const CityLayer& cities,
                      const PopchartSpec& spec);

}  // namespace bivmap
