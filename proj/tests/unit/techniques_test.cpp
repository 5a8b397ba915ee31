#include <doctest.h>

#include <cmath>
#include <string>

#include "bivmap/error.hpp"
#include "bivmap/techniques.hpp"
#include "encoding_checks.hpp"
#include "fixtures.hpp"
#include "svg.hpp"

using namespace bivmap;

namespace {

const testkit::EncodingFixture& fixture() {
  static const testkit::EncodingFixture f = testkit::encoding_fixture();
  return f;
}

void expect_clean(const std::vector<std::string>& problems) {
  for (const auto& p : problems) MESSAGE(p);
  CHECK(problems.empty());
}

}  // namespace

TEST_SUITE("techniques") {
  TEST_CASE("technique names round trip") {
    CHECK(all_techniques().size() == 9);
    for (Technique t : all_techniques()) CHECK(parse_technique(to_string(t)) == t);
    CHECK_THROWS_AS(parse_technique("pie"), ValidationError);
  }

  TEST_CASE("bertillon encoding") {
    const auto [w, h] = encode_bertillon(500, 0.2, 1000, 40, 100);
    CHECK(w == doctest::Approx(20).epsilon(1e-12));
    CHECK(h == doctest::Approx(20).epsilon(1e-12));
    const auto [w2, h2] = encode_bertillon(1000, 0.1, 1000, 40, 100);
    CHECK(w2 / w == doctest::Approx(2.0));
    CHECK(w2 * h2 / (w * h) == doctest::Approx(1000 * 0.1 / (500 * 0.2)));
    CHECK_THROWS_AS(encode_bertillon(1, 1.5, 1, 1, 1), ValidationError);
  }

  TEST_CASE("dot radius follows the square-root law") {
    CHECK(encode_dot(1000, 1000, 24) == 24.0);
    CHECK(encode_dot(250, 1000, 24) == doctest::Approx(12.0).epsilon(1e-15));
    CHECK(encode_dot(0, 1000, 24) == 0.0);
  }

  TEST_CASE("population ramp runs from white to black") {
    CHECK(population_ramp_color(0, 10) == "#ffffff");
    CHECK(population_ramp_color(10, 10) == "#000000");
    CHECK(population_ramp_color(5, 10) == "#808080");
  }

  TEST_CASE("spec validation") {
    const DataMap& d = fixture().data;
    RegionTechniqueSpec s;
    s.classes = 0;
    CHECK_THROWS_AS(validate(s, d), ValidationError);
    s = {};
    s.palette = parse_palette("#000000,#ffffff");
    CHECK_THROWS_WITH_AS(validate(s, d), doctest::Contains("palette"), ValidationError);
    s = {};
    s.highlight = {"nope"};
    CHECK_THROWS_AS(validate(s, d), ValidationError);
    s = {};
    s.camera.pitch_deg = 0;
    CHECK_THROWS_AS(validate(s, d), ValidationError);
  }

  TEST_CASE("parse-back of every technique") {
    for (Technique t : all_techniques()) {
      CAPTURE(to_string(t));
      expect_clean(testkit::check_technique(fixture(), t));
    }
  }

  TEST_CASE("juxtaposed has two complete panels") {
    const auto doc = testkit::parse_svg(testkit::render_technique_svg(fixture(), Technique::juxtaposed));
    for (const auto& r : fixture().data.map.regions) {
      CHECK_NOTHROW(doc.at("panel:0", "r:" + r.id));
      CHECK_NOTHROW(doc.at("panel:1", "r:" + r.id));
    }
  }

  TEST_CASE("largest prism rises height_scale * cos(pitch)") {
    const auto& d = fixture().data;
    std::size_t m = 0;
    for (std::size_t i = 0; i < d.size(); ++i)
      if (d.population[i] > d.population[m]) m = i;
    const auto doc = testkit::parse_svg(testkit::render_technique_svg(fixture(), Technique::prism3d));
    const double want = 120.0 * std::cos(55.0 * std::acos(-1.0) / 180.0);
    CHECK(std::abs(testkit::side_lift(doc.at("r:" + d.map.regions[m].id + "/side")) - want) <=
          1e-3);
  }

  TEST_CASE("highlights outline the chosen regions") {
    RegionTechniqueSpec s;
    s.highlight = {"R003", "R010"};
    const auto doc = testkit::parse_svg(write_svg(render_region_map(fixture().data, s)));
    CHECK(doc.at("r:R003/highlight").attr("fill") == "none");
    CHECK(doc.at("r:R010/highlight").attr("stroke") == "#222222");
    CHECK(doc.index_of("r:R003/highlight") > doc.index_of("r:R019"));
  }

  TEST_CASE("every technique draws a legend and a background") {
    for (Technique t : all_techniques()) {
      CAPTURE(to_string(t));
      const auto doc = testkit::parse_svg(testkit::render_technique_svg(fixture(), t));
      CHECK(doc.at("background").attr("fill") == "#ffffff");
      CHECK(doc.count("text") >= 3);
    }
  }

  TEST_CASE("cartogram diagnostics travel with the render") {
    RegionTechniqueSpec s;
    s.technique = Technique::cartogram;
    const auto r = render_region_map_detailed(fixture().data, s);
    REQUIRE(r.cartogram.has_value());
    CHECK(r.cartogram->region_areas.size() == fixture().data.size());
    CHECK_FALSE(r.layout.has_value());
  }
}
