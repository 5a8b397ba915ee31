#include "bivmap/model_io.hpp"

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "bivmap/csv.hpp"
#include "bivmap/error.hpp"
#include "bivmap/geometry.hpp"

namespace bivmap {

using json = nlohmann::json;

std::optional<std::size_t> RegionMap::find(const std::string& id) const {
  if (index_.size() != regions.size()) {
    for (std::size_t i = 0; i < regions.size(); ++i)
      if (regions[i].id == id) return i;
    return std::nullopt;
  }
  const auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const Region& RegionMap::at(const std::string& id) const {
  const auto i = find(id);
  if (!i) throw ValidationError("unknown region '" + id + "'");
  return regions[*i];
}

void RegionMap::reindex() {
  index_.clear();
  for (std::size_t i = 0; i < regions.size(); ++i) index_.emplace(regions[i].id, i);
}

void RegionMap::recompute_bbox() {
  bbox = BBox{};
  for (const auto& r : regions) bbox.expand(region_bbox(r));
}

std::size_t DataMap::index_of(const std::string& id) const {
  const auto i = map.find(id);
  if (!i) throw ValidationError("unknown region '" + id + "'");
  return *i;
}

StatisticUnit parse_statistic_unit(std::string_view text) {
  if (text == "percent") return StatisticUnit::percent;
  if (text == "fraction") return StatisticUnit::fraction;
  throw ValidationError("statistic unit must be 'percent' or 'fraction', got '" +
                        std::string(text) + "'");
}

std::string_view to_string(StatisticUnit unit) {
  return unit == StatisticUnit::percent ? "percent" : "fraction";
}

namespace {

std::string ring_context(const std::string& region, std::size_t ring) {
  return "region '" + region + "' ring " + std::to_string(ring);
}

// Checks closure, vertex count and area; returns the signed area.
double check_ring(const Ring& ring, const std::string& region, std::size_t index) {
  if (ring.size() < 4) {
    throw ParseError(ring_context(region, index) + ": degenerate ring (" +
                     std::to_string(ring.size()) + " vertices, need >= 4)");
  }
  if (ring.front() != ring.back()) {
    throw ParseError(ring_context(region, index) + ": ring is not closed");
  }
  const double a = signed_area(ring);
  if (!(std::abs(a) > 0.0)) {
    throw ParseError(ring_context(region, index) + ": degenerate ring (zero area)");
  }
  return a;
}

void orient(Ring& ring, bool ccw) {
  if ((signed_area(ring) > 0) != ccw) std::reverse(ring.begin(), ring.end());
}

void normalize(Polygon& p) {
  orient(p.outer, true);
  for (auto& h : p.holes) orient(h, false);
}

Ring ring_from_json(const json& coords, const std::string& region, std::size_t index) {
  if (!coords.is_array())
    throw ParseError(ring_context(region, index) + ": coordinates must be an array");
  Ring ring;
  ring.reserve(coords.size());
  for (const auto& c : coords) {
    if (!c.is_array() || c.size() < 2 || !c[0].is_number() || !c[1].is_number())
      throw ParseError(ring_context(region, index) + ": malformed position");
    ring.push_back({c[0].get<double>(), c[1].get<double>()});
  }
  return ring;
}

Polygon polygon_from_json(const json& rings, const std::string& region,
                          std::size_t& ring_index) {
  if (!rings.is_array() || rings.empty())
    throw ParseError("region '" + region + "': polygon without rings");
  Polygon p;
  for (std::size_t i = 0; i < rings.size(); ++i) {
    Ring r = ring_from_json(rings[i], region, ring_index);
    check_ring(r, region, ring_index);
    ++ring_index;
    if (i == 0)
      p.outer = std::move(r);
    else
      p.holes.push_back(std::move(r));
  }
  normalize(p);
  return p;
}

std::string id_from_json(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  return {};
}

void hole_warnings(const Region& r, std::vector<std::string>& out) {
  std::size_t ring_index = 0;
  for (const auto& part : r.parts) {
    ++ring_index;  // outer
    for (const auto& hole : part.holes) {
      const bool inside = std::all_of(hole.begin(), hole.end(), [&](Point v) {
        return point_in_ring(v, part.outer);
      });
      if (!inside)
        out.push_back(ring_context(r.id, ring_index) +
                      ": hole is not inside its outer ring");
      ++ring_index;
    }
  }
}

}  // namespace

RegionMap parse_geometry(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("geometry: malformed JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("features") || !doc["features"].is_array())
    throw ParseError("geometry: expected a FeatureCollection with a 'features' array");

  RegionMap map;
  if (doc.contains("crs_note") && doc["crs_note"].is_string())
    map.crs_note = doc["crs_note"].get<std::string>();

  std::unordered_set<std::string> seen;
  std::size_t feature_no = 0;
  for (const auto& f : doc["features"]) {
    ++feature_no;
    const std::string where = "geometry feature " + std::to_string(feature_no);
    if (!f.is_object()) throw ParseError(where + ": not an object");
    const json props = f.value("properties", json::object());
    const std::string id = props.is_object() && props.contains("id")
                               ? id_from_json(props["id"])
                               : std::string{};
    if (id.empty()) throw ParseError(where + ": missing or empty properties.id");
    if (!seen.insert(id).second) throw ParseError("duplicate region id '" + id + "'");

    Region region;
    region.id = id;
    if (props.contains("name") && props["name"].is_string())
      region.name = props["name"].get<std::string>();

    if (!f.contains("geometry") || !f["geometry"].is_object())
      throw ParseError("region '" + id + "': missing geometry");
    const json& g = f["geometry"];
    const std::string type = g.value("type", "");
    if (!g.contains("coordinates"))
      throw ParseError("region '" + id + "': geometry without coordinates");
    std::size_t ring_index = 0;
    if (type == "Polygon") {
      region.parts.push_back(polygon_from_json(g["coordinates"], id, ring_index));
    } else if (type == "MultiPolygon") {
      if (!g["coordinates"].is_array() || g["coordinates"].empty())
        throw ParseError("region '" + id + "': empty MultiPolygon");
      for (const auto& poly : g["coordinates"])
        region.parts.push_back(polygon_from_json(poly, id, ring_index));
    } else {
      throw ParseError("region '" + id + "': unsupported geometry type '" + type + "'");
    }
    if (!(region_area(region) > 0.0))
      throw ParseError("region '" + id + "': zero area");
    hole_warnings(region, map.warnings);
    map.regions.push_back(std::move(region));
  }
  map.reindex();
  map.recompute_bbox();
  return map;
}

std::string serialize_geometry(const RegionMap& map) {
  auto ring_json = [](const Ring& r) {
    json a = json::array();
    for (const auto& p : r) a.push_back({p.x, p.y});
    return a;
  };
  auto poly_json = [&](const Polygon& p) {
    json a = json::array();
    a.push_back(ring_json(p.outer));
    for (const auto& h : p.holes) a.push_back(ring_json(h));
    return a;
  };
  json features = json::array();
  for (const auto& r : map.regions) {
    json geom;
    if (r.parts.size() == 1) {
      geom = {{"type", "Polygon"}, {"coordinates", poly_json(r.parts[0])}};
    } else {
      json parts = json::array();
      for (const auto& p : r.parts) parts.push_back(poly_json(p));
      geom = {{"type", "MultiPolygon"}, {"coordinates", parts}};
    }
    features.push_back({{"type", "Feature"},
                        {"properties", {{"id", r.id}, {"name", r.name}}},
                        {"geometry", geom}});
  }
  json doc = {{"type", "FeatureCollection"}, {"features", features}};
  if (!map.crs_note.empty()) doc["crs_note"] = map.crs_note;
  return doc.dump();
}

std::vector<DataRow> parse_data_rows(std::string_view text) {
  const auto table = CsvTable::parse(text, "region data");
  const auto c_id = table.column("id");
  const auto c_name = table.column("name");
  const auto c_pop = table.column("population");
  const auto c_stat = table.column("statistic");
  std::vector<DataRow> rows;
  rows.reserve(table.rows().size());
  for (const auto& row : table.rows()) {
    rows.push_back({table.text(row, c_id), table.text(row, c_name),
                    table.number(row, c_pop), table.number(row, c_stat)});
  }
  return rows;
}

DataMap join_data(const RegionMap& map, const std::vector<DataRow>& rows,
                  StatisticUnit unit) {
  DataMap data;
  data.map = map;
  data.map.reindex();
  const std::size_t n = map.regions.size();
  data.population.assign(n, 0.0);
  data.rate.assign(n, 0.0);
  std::vector<bool> filled(n, false);

  for (const auto& row : rows) {
    const auto i = data.map.find(row.id);
    if (!i) throw ValidationError("data row for unknown region '" + row.id + "'");
    if (filled[*i]) throw ValidationError("duplicate data row for region '" + row.id + "'");
    if (!(row.population >= 0.0))
      throw ValidationError("region '" + row.id + "': negative population");
    const double rate = unit == StatisticUnit::percent ? row.statistic / 100.0 : row.statistic;
    if (!(rate >= 0.0 && rate <= 1.0))
      throw ValidationError("region '" + row.id + "': statistic out of range (" +
                            format_number(rate) + " not in [0, 1])");
    data.population[*i] = row.population;
    data.rate[*i] = rate;
    filled[*i] = true;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!filled[i])
      throw ValidationError("missing data row for region '" + map.regions[i].id + "'");
  }
  return data;
}

namespace {

namespace bg = boost::geometry;
using BgPoint = bg::model::d2::point_xy<double>;
using BgPolygon = bg::model::polygon<BgPoint>;

Ring ring_from_bg(const auto& bg_ring) {
  Ring r;
  for (const auto& p : bg_ring) r.push_back({p.x(), p.y()});
  return r;
}

Polygon footprint_from_wkt(const std::string& wkt, const std::string& city,
                           std::size_t line) {
  BgPolygon poly;
  try {
    bg::read_wkt(wkt, poly);
  } catch (const std::exception& e) {
    throw ParseError("cities line " + std::to_string(line) + ": city '" + city +
                     "': bad footprint WKT: " + e.what());
  }
  Polygon p;
  p.outer = ring_from_bg(poly.outer());
  for (const auto& h : poly.inners()) p.holes.push_back(ring_from_bg(h));
  const std::string who = "city '" + city + "' footprint";
  check_ring(p.outer, who, 0);
  for (std::size_t i = 0; i < p.holes.size(); ++i) check_ring(p.holes[i], who, i + 1);
  normalize(p);
  return p;
}

}  // namespace

CityLayer parse_cities(std::string_view text, const DataMap& data) {
  const auto table = CsvTable::parse(text, "cities");
  const auto c_id = table.column("id");
  const auto c_region = table.column("region_id");
  const auto c_name = table.column("name");
  const auto c_x = table.column("x");
  const auto c_y = table.column("y");
  const auto c_pop = table.column("population");
  const bool has_fp = table.has_column("footprint");
  const auto c_fp = has_fp ? table.column("footprint") : 0;

  CityLayer layer;
  std::unordered_set<std::string> seen;
  for (const auto& row : table.rows()) {
    const std::string at = "cities line " + std::to_string(row.line) + ": ";
    City c;
    c.id = table.text(row, c_id);
    c.region_id = table.text(row, c_region);
    c.name = table.text(row, c_name);
    c.location = {table.number(row, c_x), table.number(row, c_y)};
    c.population = table.number(row, c_pop);
    if (c.id.empty()) throw ParseError(at + "empty city id");
    if (!seen.insert(c.id).second) throw ValidationError(at + "duplicate city id '" + c.id + "'");
    if (c.population < 0.0)
      throw ValidationError(at + "city '" + c.id + "': negative population");
    const auto region = data.map.find(c.region_id);
    if (!region)
      throw ValidationError(at + "city '" + c.id + "': unknown region_id '" + c.region_id + "'");
    if (has_fp && !table.text(row, c_fp).empty())
      c.footprint = footprint_from_wkt(table.text(row, c_fp), c.id, row.line);
    if (!point_in_region(c.location, data.map.regions[*region]))
      layer.warnings.push_back("city '" + c.id + "' lies outside its region '" +
                               c.region_id + "'");
    layer.cities.push_back(std::move(c));
  }
  return layer;
}

namespace {

void check_rankings(const std::vector<RankingRecord>& rankings,
                    const std::vector<std::size_t>& lines) {
  if (rankings.empty()) return;
  std::set<std::string> techniques;
  for (const auto& r : rankings) techniques.insert(r.technique);
  const int t = static_cast<int>(techniques.size());

  std::map<std::string, std::map<std::string, int>> by_participant;
  std::map<std::string, std::size_t> first_line;
  for (std::size_t i = 0; i < rankings.size(); ++i) {
    const auto& r = rankings[i];
    first_line.emplace(r.participant_id, lines[i]);
    if (!by_participant[r.participant_id].emplace(r.technique, r.rank).second) {
      throw ValidationError("rankings line " + std::to_string(lines[i]) +
                            ": participant '" + r.participant_id +
                            "' ranks technique '" + r.technique + "' twice");
    }
  }
  for (const auto& [participant, ranks] : by_participant) {
    const std::string at = "rankings line " + std::to_string(first_line[participant]) +
                           ": participant '" + participant + "': ";
    if (static_cast<int>(ranks.size()) != t)
      throw ValidationError(at + "ranks " + std::to_string(ranks.size()) + " of " +
                            std::to_string(t) + " techniques");
    std::vector<bool> used(t + 1, false);
    for (const auto& [technique, rank] : ranks) {
      if (rank < 1 || rank > t || used[rank])
        throw ValidationError(at + "ranks are not a permutation of 1.." + std::to_string(t));
      used[rank] = true;
    }
  }
}

}  // namespace

TrialSet parse_trials(std::string_view trials_csv, std::string_view rankings_csv) {
  TrialSet set;
  const auto table = CsvTable::parse(trials_csv, "trials");
  const auto c_part = table.column("participant_id");
  const auto c_tech = table.column("technique");
  const auto c_q = table.column("question");
  const auto c_qs = table.column("question_set");
  const auto c_correct = table.column("correct");
  const auto c_time = table.column("time_ms");
  for (const auto& row : table.rows()) {
    const std::string at = "trials line " + std::to_string(row.line) + ": ";
    TrialRecord r;
    r.participant_id = table.text(row, c_part);
    r.technique = table.text(row, c_tech);
    r.question = table.text(row, c_q);
    r.question_set = table.text(row, c_qs);
    const auto& correct = table.text(row, c_correct);
    if (correct != "0" && correct != "1")
      throw ValidationError(at + "correct must be 0 or 1, got '" + correct + "'");
    r.correct = correct == "1" ? 1 : 0;
    r.time_ms = table.number(row, c_time);
    if (!(r.time_ms > 0.0))
      throw ValidationError(at + "time_ms must be positive, got " + table.text(row, c_time));
    set.records.push_back(std::move(r));
  }

  bool blank = rankings_csv.find_first_not_of(" \t\r\n") == std::string_view::npos;
  if (!blank) {
    const auto ranks = CsvTable::parse(rankings_csv, "rankings");
    const auto r_part = ranks.column("participant_id");
    const auto r_tech = ranks.column("technique");
    const auto r_rank = ranks.column("rank");
    std::vector<std::size_t> lines;
    for (const auto& row : ranks.rows()) {
      set.rankings.push_back({ranks.text(row, r_part), ranks.text(row, r_tech),
                              static_cast<int>(ranks.integer(row, r_rank))});
      lines.push_back(row.line);
    }
    check_rankings(set.rankings, lines);
  }
  return set;
}

ValidationReport validate(const RegionMap& map) {
  ValidationReport report;
  std::unordered_set<std::string> ids;
  for (const auto& r : map.regions) {
    if (r.id.empty()) report.errors.push_back("region with empty id");
    if (!ids.insert(r.id).second) report.errors.push_back("duplicate region id '" + r.id + "'");
    if (r.parts.empty()) report.errors.push_back("region '" + r.id + "': no outer ring");
    std::size_t ring_index = 0;
    for (const auto& part : r.parts) {
      std::vector<const Ring*> rings{&part.outer};
      for (const auto& h : part.holes) rings.push_back(&h);
      for (const Ring* ring : rings) {
        try {
          check_ring(*ring, r.id, ring_index);
        } catch (const Error& e) {
          report.errors.emplace_back(e.what());
        }
        ++ring_index;
      }
    }
    if (report.errors.empty() && !(region_area(r) > 0.0))
      report.errors.push_back("region '" + r.id + "': zero area");
    hole_warnings(r, report.warnings);
  }
  return report;
}

ValidationReport validate(const DataMap& data) {
  ValidationReport report = validate(data.map);
  const std::size_t n = data.map.regions.size();
  if (data.population.size() != n || data.rate.size() != n) {
    report.errors.push_back("data columns do not match the region count");
    return report;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& id = data.map.regions[i].id;
    if (!(data.population[i] >= 0.0))
      report.errors.push_back("region '" + id + "': negative population");
    if (!(data.rate[i] >= 0.0 && data.rate[i] <= 1.0))
      report.errors.push_back("region '" + id + "': rate outside [0, 1]");
  }
  return report;
}

ValidationReport validate(const CityLayer& cities, const DataMap& data) {
  ValidationReport report;
  std::unordered_set<std::string> ids;
  for (const auto& c : cities.cities) {
    if (!ids.insert(c.id).second) report.errors.push_back("duplicate city id '" + c.id + "'");
    if (!(c.population >= 0.0))
      report.errors.push_back("city '" + c.id + "': negative population");
    const auto region = data.map.find(c.region_id);
    if (!region) {
      report.errors.push_back("city '" + c.id + "': unknown region_id '" + c.region_id + "'");
    } else if (!point_in_region(c.location, data.map.regions[*region])) {
      report.warnings.push_back("city '" + c.id + "' lies outside its region '" +
                                c.region_id + "'");
    }
  }
  return report;
}

ValidationReport validate(const TrialSet& trials) {
  ValidationReport report;
  for (std::size_t i = 0; i < trials.records.size(); ++i) {
    const auto& r = trials.records[i];
    const std::string at = "record " + std::to_string(i + 1) + ": ";
    if (r.correct != 0 && r.correct != 1) report.errors.push_back(at + "correct not in {0,1}");
    if (!(r.time_ms > 0.0)) report.errors.push_back(at + "non-positive time_ms");
  }
  try {
    std::vector<std::size_t> lines(trials.rankings.size());
    for (std::size_t i = 0; i < lines.size(); ++i) lines[i] = i + 2;
    check_rankings(trials.rankings, lines);
  } catch (const Error& e) {
    report.errors.emplace_back(e.what());
  }
  return report;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace bivmap
