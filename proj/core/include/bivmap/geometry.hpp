#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "bivmap/types.hpp"

namespace bivmap {

// Shoelace signed area; positive for counter-clockwise rings (y up).
// Throws ValidationError for an open ring.
double signed_area(const Ring& ring);

// |outer| minus the sum of |holes|.
double polygon_area(const Polygon& polygon);
double polygon_area(std::span<const Polygon> parts);
inline double region_area(const Region& r) { return polygon_area(r.parts); }

// Area-weighted centroid of the outer ring(s) minus holes.
// Throws ValidationError when the area is zero.
Point centroid(const Polygon& polygon);
Point centroid(std::span<const Polygon> parts);
inline Point region_centroid(const Region& r) { return centroid(r.parts); }

double perimeter(const Ring& ring);

bool point_in_ring(Point p, const Ring& ring);
bool point_in_polygon(Point p, const Polygon& polygon);
bool point_in_region(Point p, const Region& region);

BBox ring_bbox(const Ring& ring);
BBox region_bbox(const Region& region);
// Bounding box of the outer rings only.
BBox outer_bbox(const Region& region);

// Symmetric, irreflexive neighbour sets indexed like the RegionMap.
class AdjacencyGraph {
 public:
  AdjacencyGraph() = default;
  explicit AdjacencyGraph(std::vector<std::string> ids);

  void connect(std::size_t a, std::size_t b);

  std::size_t size() const { return ids_.size(); }
  const std::string& id(std::size_t i) const { return ids_[i]; }
  const std::vector<std::string>& ids() const { return ids_; }
  // Sorted neighbour indices.
  const std::vector<std::size_t>& neighbors(std::size_t i) const {
    return neighbors_[i];
  }
  std::vector<std::string> neighbor_ids(const std::string& id) const;
  bool adjacent(std::size_t a, std::size_t b) const;
  bool adjacent(const std::string& a, const std::string& b) const;
  std::size_t index_of(const std::string& id) const;

  friend bool operator==(const AdjacencyGraph&, const AdjacencyGraph&) = default;

 private:
  std::vector<std::string> ids_;
  std::vector<std::vector<std::size_t>> neighbors_;
};

// Default matching tolerance: 1e-9 of the map's bbox diagonal.
double default_adjacency_eps(const RegionMap& map);

// Two regions are adjacent when they share at least one boundary segment
// whose endpoints coincide pairwise within eps. Touching at a single corner
// does not count.
AdjacencyGraph adjacency(const RegionMap& map, double eps);
AdjacencyGraph adjacency(const RegionMap& map);

// Point for glyphs and labels. Uses the centroid of the largest part when it
// falls inside that part's outer ring, otherwise the midpoint of the longest
// horizontal interior chord through the ring's vertical midpoint.
Point label_anchor(const Region& region);

struct AffinePlacement {
  double scale = 1.0;
  Point translation;
  Point anchor;

  Point apply(Point v) const {
    return {anchor.x + scale * (v.x - anchor.x) + translation.x,
            anchor.y + scale * (v.y - anchor.y) + translation.y};
  }
};

Ring apply_placement(const Ring& ring, const AffinePlacement& p);
Polygon apply_placement(const Polygon& polygon, const AffinePlacement& p);
std::vector<Polygon> apply_placement(std::span<const Polygon> parts,
                                     const AffinePlacement& p);

// Proper crossings between non-adjacent segments of one ring.
std::size_t self_intersections(const Ring& ring);

}  // namespace bivmap
