#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bivmap/geometry.hpp"
#include "bivmap/types.hpp"

namespace bivmap {

// Regions with zero population are treated as holding this fraction of the
// largest regional population.
inline constexpr double kPopulationFloorFraction = 1e-3;

// Populations with zero entries replaced by the floor.
std::vector<double> floored_populations(const DataMap& data);

// sqrt(density / max_density), density = population / area.
double shrink_factor(double population, double area, double max_density);

// Same, with a zero population mapped to `floor_density`.
double shrink_factor(double population, double area, double max_density,
                     double floor_density);

struct NonContiguousLayout {
  std::vector<AffinePlacement> placements;  // aligned with data.map.regions
  std::vector<double> shrink_factors;
  double zoom = 1.0;
  int separation_sweeps = 0;
};

// Per-region scaling about the centroid by shrinkFactor * Z, with Z chosen
// so that the displayed total area equals the original total. Regions that
// end up larger than their true size are pushed apart in descending scale
// order until their scaled bounding boxes no longer overlap; all other
// regions stay centred.
NonContiguousLayout noncontiguous_layout(const DataMap& data);

struct ContiguousParams {
  int max_iterations = 128;
  double target_mean_error = 0.02;
  double force_damping = 0.25;
};

void validate(const ContiguousParams& params);

struct ContiguousDiagnostics {
  int iterations = 0;
  bool converged = false;
  // Mean relative area error before the first step and after each step.
  std::vector<double> mean_error_history;
  double final_mean_error = 0.0;
  double final_max_error = 0.0;
  double max_displacement = 0.0;
  std::size_t fold_count = 0;
  std::vector<double> region_areas;  // aligned with map.regions
};

struct ContiguousResult {
  RegionMap map;
  ContiguousDiagnostics diagnostics;
};

// Rubber-sheet density equalization: every region pushes or pulls all
// vertices radially from its centroid in proportion to the gap between its
// desired and actual radius. Displacement depends only on vertex position,
// so vertices shared by neighbouring regions stay shared.
ContiguousResult contiguous_cartogram(const DataMap& data,
                                      const ContiguousParams& params = {});

// Per-region |area share - population share| / population share.
std::vector<double> relative_area_errors(const RegionMap& map,
                                         const std::vector<double>& population);

std::string diagnostics_json(const ContiguousDiagnostics& d);
std::string diagnostics_json(const NonContiguousLayout& layout,
                             const DataMap& data);

}  // namespace bivmap
