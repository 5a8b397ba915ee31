#include "bivmap/taskoracle.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "bivmap/error.hpp"

namespace bivmap {

Metric parse_metric(std::string_view name) {
  if (name == "population") return Metric::population;
  if (name == "rate") return Metric::rate;
  if (name == "absolute") return Metric::absolute;
  throw ValidationError("unknown metric '" + std::string(name) + "'");
}

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::population: return "population";
    case Metric::rate: return "rate";
    case Metric::absolute: return "absolute";
  }
  return "?";
}

double absolute_count(const std::string& region, const DataMap& data) {
  const std::size_t i = data.index_of(region);
  return data.population[i] * data.rate[i];
}

double metric_value(const DataMap& data, std::size_t region, Metric metric) {
  switch (metric) {
    case Metric::population: return data.population.at(region);
    case Metric::rate: return data.rate.at(region);
    case Metric::absolute: return data.population.at(region) * data.rate.at(region);
  }
  return 0.0;
}

namespace {

struct Scored {
  double value;
  const std::string* id;
};

bool ranks_before(const Scored& a, const Scored& b) {
  if (a.value != b.value) return a.value > b.value;
  return *a.id < *b.id;
}

}  // namespace

std::vector<std::string> rank_regions(const DataMap& data, Metric metric,
                                      const std::vector<std::string>& candidates) {
  if (candidates.empty()) throw ValidationError("rank: no candidate regions");
  std::vector<Scored> scored;
  for (const auto& id : candidates) scored.push_back({metric_value(data, data.index_of(id), metric), &id});
  std::sort(scored.begin(), scored.end(), ranks_before);
  std::vector<std::string> out;
  for (const auto& s : scored) out.push_back(*s.id);
  return out;
}

std::string neighbor_argmax(const std::string& region, const DataMap& data,
                            const AdjacencyGraph& adj, Metric metric) {
  const auto neighbors = adj.neighbor_ids(region);
  if (neighbors.empty()) throw ValidationError("region '" + region + "' has no neighbours");
  std::optional<Scored> best;
  for (const auto& id : neighbors) {
    const Scored s{metric_value(data, data.index_of(id), metric), &id};
    if (!best || ranks_before(s, *best)) best = s;
  }
  return *best->id;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::A: return "A";
    case Verdict::B: return "B";
    case Verdict::tie: return "tie";
  }
  return "?";
}

Comparison summarize_compare(const std::vector<std::string>& set_a,
                             const std::vector<std::string>& set_b, const DataMap& data,
                             Metric metric) {
  if (set_a.empty() || set_b.empty()) throw ValidationError("compare: both sets must be non-empty");
  auto mean = [&](const std::vector<std::string>& ids) {
    double sum = 0.0;
    for (const auto& id : ids) sum += metric_value(data, data.index_of(id), metric);
    return sum / static_cast<double>(ids.size());
  };
  Comparison c;
  c.mean_a = mean(set_a);
  c.mean_b = mean(set_b);
  const double scale = std::max(std::abs(c.mean_a), std::abs(c.mean_b));
  if (scale == 0.0 || std::abs(c.mean_a - c.mean_b) < 1e-12 * scale)
    c.verdict = Verdict::tie;
  else
    c.verdict = c.mean_a > c.mean_b ? Verdict::A : Verdict::B;
  return c;
}

CityAnswer biggest_city(const std::vector<std::string>& regions, const CityLayer& cities) {
  const City* best = nullptr;
  for (const auto& c : cities.cities) {
    if (std::find(regions.begin(), regions.end(), c.region_id) == regions.end()) continue;
    if (!best || c.population > best->population ||
        (c.population == best->population && c.id < best->id))
      best = &c;
  }
  if (!best) throw ValidationError("no cities in the given regions");
  return {best->id, best->region_id, best->population};
}

double region_population_from_cities(const std::string& region, const CityLayer& cities) {
  double sum = 0.0;
  for (const auto& c : cities.cities)
    if (c.region_id == region) sum += c.population;
  return sum;
}

std::size_t williams_rows(std::size_t n) { return n % 2 == 0 ? n : 2 * n; }

std::vector<std::size_t> williams_row(std::size_t n, std::size_t r) {
  if (n == 0) throw ValidationError("williams: no conditions");
  // First row 0, 1, n-1, 2, n-2, ...
  std::vector<std::size_t> first;
  for (std::size_t lo = 1, hi = n - 1, j = 0; j < n; ++j) {
    if (j == 0)
      first.push_back(0);
    else if (j % 2 == 1)
      first.push_back(lo++);
    else
      first.push_back(hi--);
  }
  r %= williams_rows(n);
  const bool mirrored = r >= n;
  std::vector<std::size_t> row;
  for (std::size_t j = 0; j < n; ++j) row.push_back((first[j] + r % n) % n);
  if (mirrored) std::reverse(row.begin(), row.end());
  return row;
}

StudyDesign generate_design(const std::vector<std::string>& techniques,
                            const std::vector<std::string>& question_sets, int participants) {
  if (techniques.empty()) throw ValidationError("design: no techniques");
  if (question_sets.size() < techniques.size())
    throw ValidationError("design: need at least as many question sets as techniques");
  if (participants < 1) throw ValidationError("design: participants must be >= 1");
  StudyDesign d;
  d.techniques = techniques;
  d.question_sets = question_sets;
  const std::size_t t = techniques.size(), s = question_sets.size();
  for (int p = 0; p < participants; ++p) {
    const auto order = williams_row(t, static_cast<std::size_t>(p));
    for (std::size_t j = 0; j < t; ++j)
      d.entries.push_back({p + 1, static_cast<int>(j) + 1, techniques[order[j]],
                           question_sets[(static_cast<std::size_t>(p) + j) % s]});
    d.orders.push_back(order);
  }
  return d;
}

std::string design_csv(const StudyDesign& design) {
  std::ostringstream out;
  out << "participant_id,position,technique,question_set\n";
  for (const auto& e : design.entries)
    out << e.participant << ',' << e.position << ',' << e.technique << ',' << e.question_set << '\n';
  return out.str();
}

}  // namespace bivmap
