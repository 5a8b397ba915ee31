#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "bivmap/csv.hpp"
#include "bivmap/model_io.hpp"
#include "bivmap/types.hpp"

namespace testkit {

using bivmap::CityLayer;
using bivmap::DataMap;
using bivmap::Point;
using bivmap::RegionMap;

inline std::string fixture_path(const std::string& name) {
  return std::string(BIVMAP_FIXTURE_DIR) + "/" + name;
}

inline std::string grid_id(int i) { return fmt::format("R{:03d}", i); }

// nx * ny cells of side `cell`; interior lattice vertices move by up to
// jitter * cell so neighbouring cells keep sharing their edges exactly.
struct Grid {
  int nx = 3;
  int ny = 3;
  double cell = 10.0;
  double jitter = 0.0;
  std::uint64_t seed = 1;
};

inline std::string grid_geojson(const Grid& g) {
  std::mt19937_64 rng(g.seed);
  std::uniform_real_distribution<double> u(-g.jitter, g.jitter);
  std::map<std::pair<int, int>, Point> v;
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) {
      const double dx = (i > 0 && i < g.nx) ? u(rng) : 0.0;
      const double dy = (j > 0 && j < g.ny) ? u(rng) : 0.0;
      v[{i, j}] = {(i + dx) * g.cell, (j + dy) * g.cell};
    }
  std::string out = R"({"type":"FeatureCollection","features":[)";
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int k = j * g.nx + i;
      const Point ring[] = {v[{i, j}], v[{i + 1, j}], v[{i + 1, j + 1}], v[{i, j + 1}], v[{i, j}]};
      if (k > 0) out += ',';
      out += fmt::format(R"({{"type":"Feature","properties":{{"id":"{}","name":"Cell {}"}},)",
                         grid_id(k), k);
      out += R"("geometry":{"type":"Polygon","coordinates":[[)";
      for (int p = 0; p < 5; ++p)
        out += fmt::format("{}[{},{}]", p ? "," : "", bivmap::format_number(ring[p].x),
                           bivmap::format_number(ring[p].y));
      out += "]]}}";
    }
  return out + "]}";
}

inline RegionMap grid_map(const Grid& g) { return bivmap::parse_geometry(grid_geojson(g)); }

inline DataMap make_data(const RegionMap& map, const std::vector<double>& pops,
                         const std::vector<double>& rates) {
  std::vector<bivmap::DataRow> rows;
  for (std::size_t i = 0; i < map.regions.size(); ++i)
    rows.push_back({map.regions[i].id, map.regions[i].name, pops.at(i), rates.at(i)});
  return bivmap::join_data(map, rows, bivmap::StatisticUnit::fraction);
}

// Region data CSV with the statistic as a fraction.
inline std::string data_csv(const DataMap& d) {
  std::string out = "id,name,population,statistic\n";
  for (std::size_t i = 0; i < d.size(); ++i)
    out += d.map.regions[i].id + "," + d.map.regions[i].name + "," +
           bivmap::format_number(d.population[i]) + "," + bivmap::format_number(d.rate[i]) + "\n";
  return out;
}

inline DataMap random_grid_data(std::mt19937_64& rng, const Grid& g) {
  const RegionMap map = grid_map(g);
  std::uniform_real_distribution<double> logpop(std::log(1e3), std::log(1e6));
  std::uniform_real_distribution<double> rate(0.01, 0.25);
  std::vector<double> pops, rates;
  for (std::size_t i = 0; i < map.regions.size(); ++i) {
    pops.push_back(std::round(std::exp(logpop(rng))));
    rates.push_back(std::round(rate(rng) * 1000.0) / 1000.0);
  }
  return make_data(map, pops, rates);
}

// Cities placed well inside their (possibly jittered) grid cell; jitter must
// stay below 0.2.
inline CityLayer random_cities(std::mt19937_64& rng, const Grid& g, int n,
                               bool footprints = false) {
  std::uniform_int_distribution<int> cell(0, g.nx * g.ny - 1);
  std::uniform_real_distribution<double> inside(0.3, 0.7);
  std::uniform_real_distribution<double> logpop(std::log(1e2), std::log(5e5));
  CityLayer layer;
  for (int c = 0; c < n; ++c) {
    const int k = cell(rng);
    const int i = k % g.nx, j = k / g.nx;
    bivmap::City city;
    city.id = fmt::format("C{:03d}", c);
    city.region_id = grid_id(k);
    city.name = "City " + std::to_string(c);
    city.location = {(i + inside(rng)) * g.cell, (j + inside(rng)) * g.cell};
    city.population = std::round(std::exp(logpop(rng)));
    if (footprints && c % 3 == 0) {
      const double h = 0.05 * g.cell;
      const Point p = city.location;
      city.footprint = bivmap::Polygon{
          {{p.x - h, p.y - h}, {p.x + h, p.y - h}, {p.x + h, p.y + h}, {p.x - h, p.y + h},
           {p.x - h, p.y - h}},
          {}};
    }
    layer.cities.push_back(city);
  }
  return layer;
}

inline std::string cities_csv(const CityLayer& layer) {
  using bivmap::format_number;
  std::string out = "id,region_id,name,x,y,population,footprint\n";
  for (const auto& c : layer.cities) {
    out += c.id + "," + c.region_id + "," + c.name + "," + format_number(c.location.x) + "," +
           format_number(c.location.y) + "," + format_number(c.population) + ",";
    if (c.footprint) {
      out += "\"POLYGON((";
      for (std::size_t i = 0; i < c.footprint->outer.size(); ++i)
        out += (i ? "," : "") + format_number(c.footprint->outer[i].x) + " " +
               format_number(c.footprint->outer[i].y);
      out += "))\"";
    }
    out += "\n";
  }
  return out;
}

}  // namespace testkit
