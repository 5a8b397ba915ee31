#pragma once

// Brute-force enumeration oracles for the task oracles, shared by the unit
// tests and the acceptance binary.

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "bivmap/error.hpp"
#include "bivmap/geometry.hpp"
#include "bivmap/taskoracle.hpp"
#include "bivmap/types.hpp"

namespace testkit {

struct OracleInstance {
  bivmap::DataMap data;
  bivmap::AdjacencyGraph adj;
  bivmap::CityLayer cities;
};

// Random regions (unit squares, geometry is irrelevant here), a random
// neighbour graph and random cities. Values come from small sets so that
// ties are common.
inline OracleInstance random_oracle_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n_regions(2, 200), n_cities(0, 500);
  OracleInstance inst;
  const int n = n_regions(rng);
  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i) {
    bivmap::Region r;
    r.id = fmt::format("X{:03d}", (i * 37) % 1000);
    r.name = r.id;
    r.parts.push_back(
        {{{0.0 + i, 0.0}, {1.0 + i, 0.0}, {1.0 + i, 1.0}, {0.0 + i, 1.0}, {0.0 + i, 0.0}}, {}});
    ids.push_back(r.id);
    inst.data.map.regions.push_back(r);
  }
  inst.data.map.reindex();
  inst.data.map.recompute_bbox();
  std::uniform_int_distribution<int> pop(1, 40), rate(0, 20);
  for (int i = 0; i < n; ++i) {
    inst.data.population.push_back(250.0 * pop(rng));
    inst.data.rate.push_back(rate(rng) / 20.0);
  }
  inst.adj = bivmap::AdjacencyGraph(ids);
  std::uniform_int_distribution<int> pick(0, n - 1);
  const int edges = n * 2;
  for (int e = 0; e < edges; ++e) {
    const int a = pick(rng), b = pick(rng);
    if (a != b) inst.adj.connect(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
  }
  std::uniform_int_distribution<int> city_pop(1, 60);
  const int m = n_cities(rng);
  for (int c = 0; c < m; ++c) {
    bivmap::City city;
    city.id = fmt::format("K{:03d}", (c * 113) % 1000);
    city.region_id = ids[static_cast<std::size_t>(pick(rng))];
    city.population = 1000.0 * city_pop(rng);
    inst.cities.cities.push_back(city);
  }
  return inst;
}

inline double brute_metric(const bivmap::DataMap& d, std::size_t i, bivmap::Metric m) {
  switch (m) {
    case bivmap::Metric::population: return d.population[i];
    case bivmap::Metric::rate: return d.rate[i];
    case bivmap::Metric::absolute: return d.population[i] * d.rate[i];
  }
  return 0.0;
}

inline std::size_t brute_index(const bivmap::DataMap& d, const std::string& id) {
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d.map.regions[i].id == id) return i;
  throw std::runtime_error("unknown id " + id);
}

// True when candidate x should come before y: larger value, then smaller id.
inline bool brute_before(double vx, const std::string& x, double vy, const std::string& y) {
  return vx > vy || (vx == vy && x < y);
}

// Selection sort by repeated maximum scan.
inline std::vector<std::string> brute_rank(const bivmap::DataMap& d, bivmap::Metric m,
                                           std::vector<std::string> pool) {
  std::vector<std::string> out;
  while (!pool.empty()) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < pool.size(); ++j)
      if (brute_before(brute_metric(d, brute_index(d, pool[j]), m), pool[j],
                       brute_metric(d, brute_index(d, pool[best]), m), pool[best]))
        best = j;
    out.push_back(pool[best]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return out;
}

// Compares the oracles against enumeration on `count` random instances.
inline std::vector<std::string> check_oracles(std::uint64_t seed, int count) {
  using namespace bivmap;
  std::vector<std::string> problems;
  auto fail = [&](std::string msg) {
    if (problems.size() < 20) problems.push_back(std::move(msg));
  };
  std::mt19937_64 rng(seed);
  const Metric metrics[] = {Metric::population, Metric::rate, Metric::absolute};
  for (int k = 0; k < count; ++k) {
    const OracleInstance inst = random_oracle_instance(rng);
    const DataMap& d = inst.data;
    const std::size_t n = d.size();
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    const Metric metric = metrics[k % 3];

    // rank_regions over a random candidate subset.
    std::vector<std::string> cand;
    for (std::size_t i = 0; i < n; ++i)
      if (rng() % 2 == 0) cand.push_back(d.map.regions[i].id);
    if (cand.empty()) cand.push_back(d.map.regions[0].id);
    if (rank_regions(d, metric, cand) != brute_rank(d, metric, cand))
      fail(fmt::format("instance {}: rank_regions differs", k));

    // neighbor_argmax: scan every region for adjacency.
    const std::size_t q = pick(rng);
    const std::string& qid = d.map.regions[q].id;
    std::string want;
    for (std::size_t j = 0; j < n; ++j) {
      if (!inst.adj.adjacent(q, j)) continue;
      const std::string& jid = d.map.regions[j].id;
      if (want.empty() ||
          brute_before(brute_metric(d, j, metric), jid,
                       brute_metric(d, brute_index(d, want), metric), want))
        want = jid;
    }
    if (want.empty()) {
      bool threw = false;
      try {
        neighbor_argmax(qid, d, inst.adj, metric);
      } catch (const ValidationError&) {
        threw = true;
      }
      if (!threw) fail(fmt::format("instance {}: isolated region did not throw", k));
    } else {
      const std::string got = neighbor_argmax(qid, d, inst.adj, metric);
      if (got != want) fail(fmt::format("instance {}: neighbor_argmax {} != {}", k, got, want));
      if (!inst.adj.adjacent(qid, got)) fail(fmt::format("instance {}: answer not adjacent", k));
    }

    // summarize_compare on two random sets.
    std::vector<std::string> a, b;
    const std::size_t na = 1 + pick(rng) % 5, nb = 1 + pick(rng) % 5;
    for (std::size_t i = 0; i < na; ++i) a.push_back(d.map.regions[pick(rng)].id);
    for (std::size_t i = 0; i < nb; ++i) b.push_back(d.map.regions[pick(rng)].id);
    if (k % 7 == 0) b = a;
    const Metric cm = k % 2 ? Metric::absolute : Metric::population;
    double sa = 0, sb = 0;
    for (const auto& id : a) sa += brute_metric(d, brute_index(d, id), cm);
    for (const auto& id : b) sb += brute_metric(d, brute_index(d, id), cm);
    const double ma = sa / static_cast<double>(a.size()), mb = sb / static_cast<double>(b.size());
    const Verdict expected = std::abs(ma - mb) < 1e-12 * std::max(std::abs(ma), std::abs(mb)) ||
                                     (ma == 0 && mb == 0)
                                 ? Verdict::tie
                                 : (ma > mb ? Verdict::A : Verdict::B);
    const Comparison got = summarize_compare(a, b, d, cm);
    if (got.verdict != expected)
      fail(fmt::format("instance {}: compare {} != {}", k, to_string(got.verdict),
                       to_string(expected)));
    // A common positive rescaling leaves the verdict unchanged.
    DataMap scaled = d;
    for (auto& p : scaled.population) p *= 3.5;
    if (summarize_compare(a, b, scaled, cm).verdict != got.verdict)
      fail(fmt::format("instance {}: compare not scale invariant", k));

    // biggest_city over a random region subset.
    std::set<std::string> scope;
    std::vector<std::string> scope_list;
    for (std::size_t i = 0; i < n; ++i)
      if (rng() % 3 == 0) {
        scope.insert(d.map.regions[i].id);
        scope_list.push_back(d.map.regions[i].id);
      }
    const City* best = nullptr;
    for (const auto& c : inst.cities.cities)
      if (scope.count(c.region_id) &&
          (!best || brute_before(c.population, c.id, best->population, best->id)))
        best = &c;
    if (!best) {
      bool threw = false;
      try {
        biggest_city(scope_list, inst.cities);
      } catch (const ValidationError&) {
        threw = true;
      }
      if (!threw) fail(fmt::format("instance {}: empty city scope did not throw", k));
    } else {
      const CityAnswer ans = biggest_city(scope_list, inst.cities);
      if (ans.city_id != best->id || ans.region_id != best->region_id)
        fail(fmt::format("instance {}: biggest_city {} != {}", k, ans.city_id, best->id));
    }
  }
  return problems;
}

}  // namespace testkit
