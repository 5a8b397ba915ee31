#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bivmap/error.hpp"
#include "bivmap/popchart.hpp"
#include "encoding_checks.hpp"
#include "fixtures.hpp"
#include "svg.hpp"

using namespace bivmap;

namespace {

const testkit::EncodingFixture& fixture() {
  static const testkit::EncodingFixture f = testkit::encoding_fixture();
  return f;
}

BBox extent(double w, double h) {
  BBox b;
  b.expand(Point{0, 0});
  b.expand(Point{w, h});
  return b;
}

City city(std::string id, Point at, double pop) {
  City c;
  c.id = std::move(id);
  c.region_id = "R000";
  c.location = at;
  c.population = pop;
  return c;
}

// Cities at least five bandwidths from every edge.
CityLayer interior_cities(std::mt19937_64& rng, int n, double size, double bandwidth) {
  std::uniform_real_distribution<double> pos(5 * bandwidth, size - 5 * bandwidth);
  std::uniform_real_distribution<double> logpop(std::log(1e2), std::log(1e6));
  CityLayer layer;
  for (int i = 0; i < n; ++i)
    layer.cities.push_back(
        city("C" + std::to_string(i), {pos(rng), pos(rng)}, std::round(std::exp(logpop(rng)))));
  return layer;
}

double total_population(const CityLayer& l) {
  double t = 0;
  for (const auto& c : l.cities) t += c.population;
  return t;
}

}  // namespace

TEST_SUITE("popchart") {
  TEST_CASE("kde conserves a single city's population") {
    CityLayer l;
    l.cities.push_back(city("C", {41.3, 57.9}, 250000));
    const auto g = kde_grid(l, 1.5, 256, extent(100, 100));
    CHECK(g.nx == 256);
    CHECK(std::abs(g.total() / 250000 - 1.0) < 0.01);
  }

  TEST_CASE("kde conserves 100 random interior cities") {
    std::mt19937_64 rng(5);
    const auto l = interior_cities(rng, 100, 100.0, 1.5);
    const auto g = kde_grid(l, 1.5, 256, extent(100, 100));
    CHECK(std::abs(g.total() / total_population(l) - 1.0) < 0.01);
  }

  TEST_CASE("kde cell weight matches the gaussian closed form") {
    CityLayer l;
    l.cities.push_back(city("C", {50.0, 50.0}, 1000));
    const double b = 2.0;
    const auto g = kde_grid(l, b, 100, extent(100, 100));
    for (std::size_t ix : {48u, 49u, 50u, 53u}) {
      const Point c = g.cell_center(ix, 51);
      const double d2 = (c.x - 50) * (c.x - 50) + (c.y - 50) * (c.y - 50);
      const double want = 1000 * 1.0 / (2 * std::numbers::pi * b * b) * std::exp(-d2 / (2 * b * b));
      CHECK(g.at(ix, 51) == doctest::Approx(want).epsilon(1e-12));
    }
    // Truncated beyond four bandwidths.
    CHECK(g.at(50, 60) == 0.0);
  }

  TEST_CASE("kde of a centred city is mirror symmetric") {
    CityLayer l;
    l.cities.push_back(city("C", {50.0, 50.0}, 1000));
    const auto g = kde_grid(l, 3.0, 64, extent(100, 100));
    for (std::size_t iy = 0; iy < 64; iy += 7)
      for (std::size_t ix = 0; ix < 64; ix += 5) {
        CHECK(g.at(ix, iy) == doctest::Approx(g.at(63 - ix, iy)).epsilon(1e-12));
        CHECK(g.at(ix, iy) == doctest::Approx(g.at(iy, ix)).epsilon(1e-12));
      }
  }

  TEST_CASE("kde with no cities is all zero with a warning") {
    const auto g = kde_grid(CityLayer{}, 1.0, 32, extent(10, 10));
    CHECK(g.total() == 0.0);
    CHECK(g.warnings.size() == 1);
    CHECK(heatmap_cells(g).empty());
  }

  TEST_CASE("kde rejects bad parameters") {
    CHECK_THROWS_AS(kde_grid(CityLayer{}, 0.0, 32, extent(10, 10)), ValidationError);
    CHECK_THROWS_AS(kde_grid(CityLayer{}, 1.0, 0, extent(10, 10)), ValidationError);
    CHECK_THROWS_AS(kde_grid(CityLayer{}, 1.0, 32, BBox{}), ValidationError);
  }

  TEST_CASE("heatmap opacity saturates at the 99th percentile") {
    DensityGrid g;
    g.nx = 10;
    g.ny = 10;
    g.cell_width = g.cell_height = 1.0;
    g.weights.assign(100, 0.0);
    for (std::size_t i = 0; i < 100; ++i) g.weights[i] = static_cast<double>(i + 1);
    const auto cells = heatmap_cells(g);
    // Nearest rank: ceil(0.99 * 100) = 99th smallest = 99.
    REQUIRE(cells.size() == 100);
    CHECK(cells[0].opacity == doctest::Approx(1.0 / 99.0));
    CHECK(cells[97].opacity == doctest::Approx(98.0 / 99.0));
    CHECK(cells[98].opacity == 1.0);
    CHECK(cells[99].opacity == 1.0);
    CHECK(cells[0].rect.min_x == 0.0);
    CHECK(cells[99].rect.max_y == 10.0);
  }

  TEST_CASE("heatmap drops cells below one grey level") {
    DensityGrid g;
    g.nx = 3;
    g.ny = 1;
    g.cell_width = g.cell_height = 1.0;
    g.weights = {1000.0, 1.0, 0.0};
    const auto cells = heatmap_cells(g);
    REQUIRE(cells.size() == 1);
    CHECK(cells[0].ix == 0);
  }

  TEST_CASE("variant names round trip") {
    for (auto v : {PopchartVariant::dasymetric, PopchartVariant::dot, PopchartVariant::heatmap,
                   PopchartVariant::prism})
      CHECK(parse_popchart_variant(to_string(v)) == v);
    CHECK_THROWS_AS(parse_popchart_variant("hexbin"), ValidationError);
  }

  TEST_CASE("spec validation") {
    PopchartSpec s;
    s.resolution = 8;
    CHECK_THROWS_AS(validate(s), ValidationError);
    s = {};
    s.bandwidth = -1;
    CHECK_THROWS_AS(validate(s), ValidationError);
    s = {};
    s.dot_radius_max = 0;
    CHECK_THROWS_AS(validate(s), ValidationError);
    s = {};
    CHECK_NOTHROW(validate(s));
  }

  TEST_CASE("substituted footprint holds the city at the reference density") {
    const City c = city("C", {10, 20}, 400);
    const Polygon p = city_footprint(c, 100.0);
    CHECK(polygon_area(p) == doctest::Approx(4.0));
    CHECK(centroid(p).x == doctest::Approx(10));
    CHECK(centroid(p).y == doctest::Approx(20));
  }

  TEST_CASE("default reference density is ten times the average") {
    const auto& d = fixture().data;
    double pop = 0, area = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      pop += d.population[i];
      area += region_area(d.map.regions[i]);
    }
    CHECK(default_reference_density(d) == doctest::Approx(10 * pop / area));
  }

  TEST_CASE("parse-back of every variant") {
    for (auto v : {PopchartVariant::dasymetric, PopchartVariant::dot, PopchartVariant::heatmap,
                   PopchartVariant::prism}) {
      CAPTURE(to_string(v));
      const auto problems = testkit::check_popchart(fixture(), v);
      for (const auto& p : problems) MESSAGE(p);
      CHECK(problems.empty());
    }
  }

  TEST_CASE("dot radii of P and P/4 are 2:1") {
    const auto map = testkit::grid_map({2, 1});
    const auto data = testkit::make_data(map, {100, 100}, {0.1, 0.2});
    CityLayer l;
    l.cities.push_back(city("A", {5, 5}, 4000));
    l.cities.push_back(city("B", {15, 5}, 1000));
    l.cities[1].region_id = "R001";
    PopchartSpec s;
    s.variant = PopchartVariant::dot;
    const auto doc = testkit::parse_svg(write_svg(render_popchart(data, l, s)));
    CHECK(doc.at("c:A").attr("r") == "24.000");
    CHECK(doc.at("c:B").attr("r") == "12.000");
    CHECK(doc.index_of("c:A") < doc.index_of("c:B"));
  }

  TEST_CASE("prism city tops take the enclosing region's class colour") {
    const auto map = testkit::grid_map({2, 1});
    const auto data = testkit::make_data(map, {100, 100}, {0.1, 0.2});
    CityLayer l;
    l.cities.push_back(city("A", {5, 5}, 4000));
    l.cities.push_back(city("B", {15, 5}, 1000));
    l.cities[1].region_id = "R001";
    PopchartSpec s;
    s.variant = PopchartVariant::prism;
    s.classes = 2;
    const auto doc = testkit::parse_svg(write_svg(render_popchart(data, l, s)));
    const auto pal = default_palette(2);
    CHECK(doc.at("c:A").attr("fill") == pal[0]);
    CHECK(doc.at("c:B").attr("fill") == pal[1]);
    CHECK(doc.at("r:R001").attr("fill") == pal[1]);
  }

  TEST_CASE("unknown city region is rejected") {
    const auto map = testkit::grid_map({2, 1});
    const auto data = testkit::make_data(map, {100, 100}, {0.1, 0.2});
    CityLayer l;
    l.cities.push_back(city("A", {5, 5}, 4000));
    l.cities[0].region_id = "nowhere";
    CHECK_THROWS_AS(render_popchart(data, l, PopchartSpec{}), ValidationError);
  }
}
