#include "bivmap/cartogram.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <numbers>
#include <numeric>

#include <json.hpp>

#include "bivmap/error.hpp"

namespace bivmap {

std::vector<double> floored_populations(const DataMap& data) {
  std::vector<double> pops = data.population;
  const double max_pop = pops.empty() ? 0.0 : *std::max_element(pops.begin(), pops.end());
  if (!(max_pop > 0.0)) throw ValidationError("every region has zero population");
  const double floor = kPopulationFloorFraction * max_pop;
  for (auto& p : pops)
    if (p <= 0.0) p = floor;
  return pops;
}

double shrink_factor(double population, double area, double max_density) {
  if (!(area > 0.0)) throw ValidationError("shrink_factor: area must be > 0");
  if (!(population > 0.0)) throw ValidationError("shrink_factor: population must be > 0");
  if (!(max_density > 0.0)) throw ValidationError("shrink_factor: max density must be > 0");
  return std::sqrt((population / area) / max_density);
}

double shrink_factor(double population, double area, double max_density,
                     double floor_density) {
  if (population <= 0.0) {
    if (!(area > 0.0)) throw ValidationError("shrink_factor: area must be > 0");
    if (!(floor_density > 0.0) || !(max_density > 0.0))
      throw ValidationError("shrink_factor: floor and max density must be > 0");
    return std::sqrt(floor_density / max_density);
  }
  return shrink_factor(population, area, max_density);
}

namespace {

BBox placed_bbox(const Region& r, const AffinePlacement& p) {
  const BBox b = outer_bbox(r);
  const Point lo = p.apply({b.min_x, b.min_y});
  const Point hi = p.apply({b.max_x, b.max_y});
  BBox out;
  out.expand(lo);
  out.expand(hi);
  return out;
}

}  // namespace

NonContiguousLayout noncontiguous_layout(const DataMap& data) {
  const auto& regions = data.map.regions;
  const std::size_t n = regions.size();
  NonContiguousLayout layout;
  if (n == 0) return layout;

  const std::vector<double> pops = floored_populations(data);
  std::vector<double> areas(n);
  std::vector<Point> centroids(n);
  double max_density = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    areas[i] = region_area(regions[i]);
    if (!(areas[i] > 0.0))
      throw ValidationError("region '" + regions[i].id + "' has zero area");
    centroids[i] = region_centroid(regions[i]);
    max_density = std::max(max_density, pops[i] / areas[i]);
  }

  double total_area = 0.0, shrunk_area = 0.0;
  layout.shrink_factors.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    layout.shrink_factors[i] = shrink_factor(pops[i], areas[i], max_density);
    total_area += areas[i];
    shrunk_area += layout.shrink_factors[i] * layout.shrink_factors[i] * areas[i];
  }
  layout.zoom = std::sqrt(total_area / shrunk_area);

  layout.placements.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    layout.placements[i].anchor = centroids[i];
    layout.placements[i].scale = layout.shrink_factors[i] * layout.zoom;
  }

  std::vector<std::size_t> enlarged;
  for (std::size_t i = 0; i < n; ++i)
    if (layout.placements[i].scale > 1.0) enlarged.push_back(i);
  std::sort(enlarged.begin(), enlarged.end(), [&](std::size_t a, std::size_t b) {
    const double sa = layout.placements[a].scale, sb = layout.placements[b].scale;
    return sa > sb || (sa == sb && regions[a].id < regions[b].id);
  });

  constexpr int kMaxSweeps = 1000;
  const double step = 0.02 * data.map.bbox.diagonal();
  std::vector<std::size_t> placed;
  for (std::size_t r : enlarged) {
    auto& pr = layout.placements[r];
    int sweeps = 0;
    // The direction is fixed at the first overlap: a straight path always
    // leaves the finite set of placed boxes, re-aiming each step can cycle.
    std::optional<Point> dir;
    for (;;) {
      const BBox box = placed_bbox(regions[r], pr);
      const Point here = pr.anchor + pr.translation;
      Point away_sum{0.0, 0.0};
      bool overlapping = false;
      for (std::size_t q : placed) {
        const auto& pq = layout.placements[q];
        if (!box.overlaps(placed_bbox(regions[q], pq))) continue;
        overlapping = true;
        const Point away = here - (pq.anchor + pq.translation);
        const double len = std::hypot(away.x, away.y);
        if (len > 0.0) away_sum = away_sum + (1.0 / len) * away;
      }
      if (!overlapping) break;
      if (++sweeps > kMaxSweeps)
        throw ValidationError("noncontiguous layout: region '" + regions[r].id +
                              "' still overlaps after 1000 sweeps");
      if (!dir) {
        Point d = away_sum;
        if (std::hypot(d.x, d.y) < 1e-9) d = here - data.map.bbox.center();
        if (std::hypot(d.x, d.y) < 1e-9) d = {1.0, 0.0};
        dir = (1.0 / std::hypot(d.x, d.y)) * d;
      }
      pr.translation = pr.translation + step * *dir;
    }
    layout.separation_sweeps += sweeps;
    placed.push_back(r);
  }
  return layout;
}

void validate(const ContiguousParams& params) {
  if (params.max_iterations < 1)
    throw ValidationError("cartogram: max_iterations must be >= 1");
  if (!(params.target_mean_error > 0.0 && params.target_mean_error < 1.0))
    throw ValidationError("cartogram: target_mean_error must lie in (0, 1)");
  if (!(params.force_damping > 0.0 && params.force_damping <= 1.0))
    throw ValidationError("cartogram: force_damping must lie in (0, 1]");
}

std::vector<double> relative_area_errors(const RegionMap& map,
                                         const std::vector<double>& population) {
  const std::size_t n = map.regions.size();
  std::vector<double> areas(n);
  for (std::size_t i = 0; i < n; ++i) areas[i] = region_area(map.regions[i]);
  const double total_area = std::accumulate(areas.begin(), areas.end(), 0.0);
  const double total_pop = std::accumulate(population.begin(), population.end(), 0.0);
  std::vector<double> err(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double want = population[i] / total_pop;
    err[i] = std::abs(areas[i] / total_area - want) / want;
  }
  return err;
}

namespace {

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

struct RegionForce {
  Point center;
  double radius = 0.0;
  double mass = 0.0;
};

Point displaced(Point v, const std::vector<RegionForce>& forces, double damping) {
  double dx = 0.0, dy = 0.0;
  for (const auto& f : forces) {
    const double ex = v.x - f.center.x;
    const double ey = v.y - f.center.y;
    const double d = std::hypot(ex, ey);
    if (d == 0.0) continue;
    double force;
    if (d > f.radius) {
      force = f.mass * f.radius / d;
    } else {
      const double q = d / f.radius;
      force = f.mass * q * q * (4.0 - 3.0 * q);
    }
    dx += force * ex / d;
    dy += force * ey / d;
  }
  return {v.x + damping * dx, v.y + damping * dy};
}

void move_ring(Ring& ring, const std::vector<RegionForce>& forces, double damping,
               double& max_step) {
  for (auto& v : ring) {
    const Point w = displaced(v, forces, damping);
    max_step = std::max(max_step, std::hypot(w.x - v.x, w.y - v.y));
    v = w;
  }
}

}  // namespace

ContiguousResult contiguous_cartogram(const DataMap& data, const ContiguousParams& params) {
  validate(params);
  const std::vector<double> pops = floored_populations(data);
  const double total_pop = std::accumulate(pops.begin(), pops.end(), 0.0);
  const std::size_t n = data.map.regions.size();

  RegionMap current = data.map;
  ContiguousDiagnostics diag;

  std::vector<double> errors = relative_area_errors(current, pops);
  double current_error = mean(errors);
  diag.mean_error_history.push_back(current_error);

  RegionMap best = current;
  double best_error = current_error;

  for (int iter = 0; iter < params.max_iterations && current_error >= params.target_mean_error;
       ++iter) {
    std::vector<double> areas(n);
    std::vector<RegionForce> forces(n);
    for (std::size_t j = 0; j < n; ++j) areas[j] = region_area(current.regions[j]);
    const double total_area = std::accumulate(areas.begin(), areas.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const double desired = total_area * pops[j] / total_pop;
      forces[j].center = region_centroid(current.regions[j]);
      forces[j].radius = std::sqrt(areas[j] / std::numbers::pi);
      forces[j].mass = std::sqrt(desired / std::numbers::pi) - forces[j].radius;
    }

    double step = 0.0;
    for (auto& region : current.regions) {
      for (auto& part : region.parts) {
        move_ring(part.outer, forces, params.force_damping, step);
        for (auto& h : part.holes) move_ring(h, forces, params.force_damping, step);
      }
    }
    diag.iterations = iter + 1;

    errors = relative_area_errors(current, pops);
    current_error = mean(errors);
    diag.mean_error_history.push_back(current_error);
    if (current_error < best_error) {
      best = current;
      best_error = current_error;
    }
  }

  diag.converged = best_error < params.target_mean_error;
  errors = relative_area_errors(best, pops);
  diag.final_mean_error = mean(errors);
  diag.final_max_error = errors.empty() ? 0.0 : *std::max_element(errors.begin(), errors.end());

  for (std::size_t i = 0; i < n; ++i) {
    const auto& before = data.map.regions[i];
    const auto& after = best.regions[i];
    diag.region_areas.push_back(region_area(after));
    for (std::size_t p = 0; p < before.parts.size(); ++p) {
      auto track = [&](const Ring& a, const Ring& b) {
        for (std::size_t v = 0; v < a.size(); ++v)
          diag.max_displacement =
              std::max(diag.max_displacement, std::hypot(b[v].x - a[v].x, b[v].y - a[v].y));
        diag.fold_count += self_intersections(b);
      };
      track(before.parts[p].outer, after.parts[p].outer);
      for (std::size_t h = 0; h < before.parts[p].holes.size(); ++h)
        track(before.parts[p].holes[h], after.parts[p].holes[h]);
    }
  }

  best.reindex();
  best.recompute_bbox();
  return {std::move(best), std::move(diag)};
}

std::string diagnostics_json(const ContiguousDiagnostics& d) {
  nlohmann::json j = {
      {"solver", "rubber-sheet"},
      {"iterations", d.iterations},
      {"converged", d.converged},
      {"final_mean_error", d.final_mean_error},
      {"final_max_error", d.final_max_error},
      {"max_displacement", d.max_displacement},
      {"fold_count", d.fold_count},
      {"mean_error_history", d.mean_error_history},
      {"region_areas", d.region_areas},
  };
  return j.dump(2);
}

std::string diagnostics_json(const NonContiguousLayout& layout, const DataMap& data) {
  nlohmann::json regions = nlohmann::json::array();
  for (std::size_t i = 0; i < layout.placements.size(); ++i) {
    const auto& p = layout.placements[i];
    regions.push_back({{"id", data.map.regions[i].id},
                       {"shrink_factor", layout.shrink_factors[i]},
                       {"scale", p.scale},
                       {"translation", {p.translation.x, p.translation.y}}});
  }
  nlohmann::json j = {{"solver", "noncontiguous"},
                      {"zoom", layout.zoom},
                      {"separation_sweeps", layout.separation_sweeps},
                      {"regions", regions}};
  return j.dump(2);
}

}  // namespace bivmap
