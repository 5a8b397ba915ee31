#include "bivmap/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "bivmap/error.hpp"

namespace bivmap {
namespace {

void require_closed(const Ring& ring) {
  if (ring.size() < 2 || ring.front() != ring.back())
    throw ValidationError("open ring: first and last vertex differ");
}

// Returns (2 * signed area, sum terms for the centroid numerator).
struct RingMoments {
  double twice_area = 0.0;
  double cx = 0.0;
  double cy = 0.0;
};

RingMoments moments(const Ring& ring) {
  require_closed(ring);
  RingMoments m;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    const Point a = ring[i];
    const Point b = ring[i + 1];
    const double cross = a.x * b.y - b.x * a.y;
    m.twice_area += cross;
    m.cx += (a.x + b.x) * cross;
    m.cy += (a.y + b.y) * cross;
  }
  return m;
}

double orientation(Point a, Point b, Point c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

}  // namespace

double signed_area(const Ring& ring) { return moments(ring).twice_area / 2.0; }

double polygon_area(const Polygon& polygon) {
  double a = std::abs(signed_area(polygon.outer));
  for (const auto& h : polygon.holes) a -= std::abs(signed_area(h));
  return std::max(a, 0.0);
}

double polygon_area(std::span<const Polygon> parts) {
  double a = 0.0;
  for (const auto& p : parts) a += polygon_area(p);
  return a;
}

namespace {

// Area-weighted first moment (sum of area * centroid) and area of a polygon.
struct Weighted {
  double area = 0.0;
  double mx = 0.0;
  double my = 0.0;
};

Weighted weighted(const Polygon& polygon) {
  Weighted w;
  auto add = [&](const Ring& ring, double sign) {
    const RingMoments m = moments(ring);
    if (m.twice_area == 0.0) return;
    const double area = std::abs(m.twice_area) / 2.0;
    // Ring centroid = (cx, cy) / (3 * twice_area); sign-independent.
    const double gx = m.cx / (3.0 * m.twice_area);
    const double gy = m.cy / (3.0 * m.twice_area);
    w.area += sign * area;
    w.mx += sign * area * gx;
    w.my += sign * area * gy;
  };
  add(polygon.outer, 1.0);
  for (const auto& h : polygon.holes) add(h, -1.0);
  return w;
}

}  // namespace

Point centroid(const Polygon& polygon) {
  const Weighted w = weighted(polygon);
  if (!(w.area > 0.0)) throw ValidationError("centroid of a zero-area polygon");
  return {w.mx / w.area, w.my / w.area};
}

Point centroid(std::span<const Polygon> parts) {
  Weighted total;
  for (const auto& p : parts) {
    const Weighted w = weighted(p);
    total.area += w.area;
    total.mx += w.mx;
    total.my += w.my;
  }
  if (!(total.area > 0.0)) throw ValidationError("centroid of a zero-area polygon");
  return {total.mx / total.area, total.my / total.area};
}

double perimeter(const Ring& ring) {
  double p = 0.0;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i)
    p += std::hypot(ring[i + 1].x - ring[i].x, ring[i + 1].y - ring[i].y);
  return p;
}

bool point_in_ring(Point p, const Ring& ring) {
  bool inside = false;
  for (std::size_t i = 0, n = ring.size(); i + 1 < n; ++i) {
    const Point a = ring[i];
    const Point b = ring[i + 1];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

bool point_in_polygon(Point p, const Polygon& polygon) {
  if (!point_in_ring(p, polygon.outer)) return false;
  for (const auto& h : polygon.holes)
    if (point_in_ring(p, h)) return false;
  return true;
}

bool point_in_region(Point p, const Region& region) {
  return std::any_of(region.parts.begin(), region.parts.end(),
                     [&](const Polygon& poly) { return point_in_polygon(p, poly); });
}

BBox ring_bbox(const Ring& ring) {
  BBox b;
  for (const auto& p : ring) b.expand(p);
  return b;
}

BBox region_bbox(const Region& region) {
  BBox b;
  for (const auto& part : region.parts) {
    b.expand(ring_bbox(part.outer));
    for (const auto& h : part.holes) b.expand(ring_bbox(h));
  }
  return b;
}

BBox outer_bbox(const Region& region) {
  BBox b;
  for (const auto& part : region.parts) b.expand(ring_bbox(part.outer));
  return b;
}

AdjacencyGraph::AdjacencyGraph(std::vector<std::string> ids)
    : ids_(std::move(ids)), neighbors_(ids_.size()) {}

void AdjacencyGraph::connect(std::size_t a, std::size_t b) {
  if (a == b) return;
  auto insert = [](std::vector<std::size_t>& v, std::size_t x) {
    const auto it = std::lower_bound(v.begin(), v.end(), x);
    if (it == v.end() || *it != x) v.insert(it, x);
  };
  insert(neighbors_[a], b);
  insert(neighbors_[b], a);
}

bool AdjacencyGraph::adjacent(std::size_t a, std::size_t b) const {
  return std::binary_search(neighbors_[a].begin(), neighbors_[a].end(), b);
}

std::size_t AdjacencyGraph::index_of(const std::string& id) const {
  const auto it = std::find(ids_.begin(), ids_.end(), id);
  if (it == ids_.end()) throw ValidationError("unknown region '" + id + "'");
  return static_cast<std::size_t>(it - ids_.begin());
}

bool AdjacencyGraph::adjacent(const std::string& a, const std::string& b) const {
  return adjacent(index_of(a), index_of(b));
}

std::vector<std::string> AdjacencyGraph::neighbor_ids(const std::string& id) const {
  std::vector<std::string> out;
  for (std::size_t j : neighbors_[index_of(id)]) out.push_back(ids_[j]);
  return out;
}

double default_adjacency_eps(const RegionMap& map) {
  BBox b = map.bbox;
  if (b.empty())
    for (const auto& r : map.regions) b.expand(region_bbox(r));
  return 1e-9 * b.diagonal();
}

AdjacencyGraph adjacency(const RegionMap& map, double eps) {
  if (!(eps >= 0.0)) throw ValidationError("adjacency tolerance must be >= 0");
  std::vector<std::string> ids;
  for (const auto& r : map.regions) ids.push_back(r.id);
  AdjacencyGraph graph(std::move(ids));

  struct Edge {
    double key;  // min x of the endpoints
    Point a, b;
    std::size_t region;
  };
  std::vector<Edge> edges;
  for (std::size_t ri = 0; ri < map.regions.size(); ++ri) {
    for (const auto& part : map.regions[ri].parts) {
      auto add_ring = [&](const Ring& ring) {
        for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
          const Point a = ring[i], b = ring[i + 1];
          edges.push_back({std::min(a.x, b.x), a, b, ri});
        }
      };
      add_ring(part.outer);
      for (const auto& h : part.holes) add_ring(h);
    }
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& l, const Edge& r) {
    return l.key < r.key || (l.key == r.key && l.region < r.region);
  });

  auto close = [eps](Point p, Point q) {
    return std::abs(p.x - q.x) <= eps && std::abs(p.y - q.y) <= eps;
  };
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = edges[i];
    for (std::size_t j = i + 1; j < edges.size() && edges[j].key - e.key <= eps; ++j) {
      const Edge& f = edges[j];
      if (f.region == e.region || graph.adjacent(e.region, f.region)) continue;
      if ((close(e.a, f.a) && close(e.b, f.b)) || (close(e.a, f.b) && close(e.b, f.a)))
        graph.connect(e.region, f.region);
    }
  }
  return graph;
}

AdjacencyGraph adjacency(const RegionMap& map) {
  return adjacency(map, default_adjacency_eps(map));
}

Point label_anchor(const Region& region) {
  if (region.parts.empty()) return {};
  const Polygon* largest = &region.parts.front();
  double best = -1.0;
  for (const auto& p : region.parts) {
    const double a = polygon_area(p);
    if (a > best) {
      best = a;
      largest = &p;
    }
  }
  const Point c = centroid(*largest);
  if (point_in_ring(c, largest->outer)) return c;

  const Ring& ring = largest->outer;
  const BBox b = ring_bbox(ring);
  const double y = (b.min_y + b.max_y) / 2.0;
  std::vector<double> xs;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    const Point p = ring[i], q = ring[i + 1];
    if ((p.y > y) != (q.y > y)) xs.push_back(p.x + (y - p.y) * (q.x - p.x) / (q.y - p.y));
  }
  std::sort(xs.begin(), xs.end());
  double best_len = -1.0;
  Point anchor = c;
  for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
    const double len = xs[i + 1] - xs[i];
    if (len > best_len) {
      best_len = len;
      anchor = {(xs[i] + xs[i + 1]) / 2.0, y};
    }
  }
  return anchor;
}

Ring apply_placement(const Ring& ring, const AffinePlacement& p) {
  if (!(p.scale > 0.0)) throw ValidationError("placement scale must be > 0");
  Ring out;
  out.reserve(ring.size());
  for (const auto& v : ring) out.push_back(p.apply(v));
  return out;
}

Polygon apply_placement(const Polygon& polygon, const AffinePlacement& p) {
  Polygon out;
  out.outer = apply_placement(polygon.outer, p);
  for (const auto& h : polygon.holes) out.holes.push_back(apply_placement(h, p));
  return out;
}

std::vector<Polygon> apply_placement(std::span<const Polygon> parts,
                                     const AffinePlacement& p) {
  std::vector<Polygon> out;
  out.reserve(parts.size());
  for (const auto& part : parts) out.push_back(apply_placement(part, p));
  return out;
}

std::size_t self_intersections(const Ring& ring) {
  const std::size_t n = ring.size() < 2 ? 0 : ring.size() - 1;  // segments
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = ring[i], b = ring[i + 1];
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // share the closing vertex
      const Point c = ring[j], d = ring[j + 1];
      const double o1 = orientation(a, b, c), o2 = orientation(a, b, d);
      const double o3 = orientation(c, d, a), o4 = orientation(c, d, b);
      if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) &&
          ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0)))
        ++count;
    }
  }
  return count;
}

}  // namespace bivmap
