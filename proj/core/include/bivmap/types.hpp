#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace bivmap {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }
};

// Closed ring: first vertex repeated as the last one.
using Ring = std::vector<Point>;

// One connected part of a region: an outer ring and zero or more holes.
struct Polygon {
  Ring outer;
  std::vector<Ring> holes;
};

struct BBox {
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = std::numeric_limits<double>::infinity();
  double max_x = -std::numeric_limits<double>::infinity();
  double max_y = -std::numeric_limits<double>::infinity();

  bool empty() const { return min_x > max_x || min_y > max_y; }
  double width() const { return empty() ? 0.0 : max_x - min_x; }
  double height() const { return empty() ? 0.0 : max_y - min_y; }
  double diagonal() const { return std::hypot(width(), height()); }
  Point center() const { return {(min_x + max_x) / 2, (min_y + max_y) / 2}; }

  void expand(Point p) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
  void expand(const BBox& o) {
    if (o.empty()) return;
    expand(Point{o.min_x, o.min_y});
    expand(Point{o.max_x, o.max_y});
  }
  bool overlaps(const BBox& o) const {
    return min_x < o.max_x && o.min_x < max_x && min_y < o.max_y &&
           o.min_y < max_y;
  }
};

struct Region {
  std::string id;
  std::string name;
  std::vector<Polygon> parts;
};

struct RegionMap {
  std::vector<Region> regions;
  BBox bbox;
  std::string crs_note;
  std::vector<std::string> warnings;

  // Index of the region with `id`, or nullopt.
  std::optional<std::size_t> find(const std::string& id) const;
  const Region& at(const std::string& id) const;
  void reindex();
  void recompute_bbox();

 private:
  std::unordered_map<std::string, std::size_t> index_;
};

// RegionMap joined with one row per region. population and rate are aligned
// with map.regions; rate is always a fraction in [0, 1].
struct DataMap {
  RegionMap map;
  std::vector<double> population;
  std::vector<double> rate;

  std::size_t size() const { return map.regions.size(); }
  std::size_t index_of(const std::string& id) const;
};

struct City {
  std::string id;
  std::string region_id;
  std::string name;
  Point location;
  double population = 0.0;
  std::optional<Polygon> footprint;
};

struct CityLayer {
  std::vector<City> cities;
  std::vector<std::string> warnings;
};

struct TrialRecord {
  std::string participant_id;
  std::string technique;
  std::string question;
  std::string question_set;
  int correct = 0;
  double time_ms = 0.0;
};

struct RankingRecord {
  std::string participant_id;
  std::string technique;
  int rank = 0;
};

struct TrialSet {
  std::vector<TrialRecord> records;
  std::vector<RankingRecord> rankings;
};

}  // namespace bivmap
