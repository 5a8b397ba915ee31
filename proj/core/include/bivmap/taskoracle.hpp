#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "bivmap/geometry.hpp"
#include "bivmap/types.hpp"

namespace bivmap {

enum class Metric { population, rate, absolute };

Metric parse_metric(std::string_view name);
std::string_view to_string(Metric m);

// Number of people counted by the statistic: population * rate.
double absolute_count(const std::string& region, const DataMap& data);
double metric_value(const DataMap& data, std::size_t region, Metric metric);

// Descending by metric, ties by id.
std::vector<std::string> rank_regions(const DataMap& data, Metric metric,
                                      const std::vector<std::string>& candidates);

std::string neighbor_argmax(const std::string& region, const DataMap& data,
                            const AdjacencyGraph& adj, Metric metric);

enum class Verdict { A, B, tie };
std::string_view to_string(Verdict v);

struct Comparison {
  Verdict verdict = Verdict::tie;
  double mean_a = 0.0;
  double mean_b = 0.0;
};

Comparison summarize_compare(const std::vector<std::string>& set_a,
                             const std::vector<std::string>& set_b,
                             const DataMap& data, Metric metric);

struct CityAnswer {
  std::string city_id;
  std::string region_id;
  double population = 0.0;
};

CityAnswer biggest_city(const std::vector<std::string>& regions,
                        const CityLayer& cities);

double region_population_from_cities(const std::string& region,
                                     const CityLayer& cities);

struct StudyDesign {
  struct Entry {
    int participant = 0;
    int position = 0;
    std::string technique;
    std::string question_set;
  };
  std::vector<std::string> techniques;
  std::vector<std::string> question_sets;
  std::vector<std::vector<std::size_t>> orders;  // technique indices per participant
  std::vector<Entry> entries;  // participant-major, position-minor
};

// Row r of a balanced (Williams) Latin square over n conditions. Even n needs
// n rows; odd n uses 2n rows (the square followed by its mirror).
std::vector<std::size_t> williams_row(std::size_t n, std::size_t r);
std::size_t williams_rows(std::size_t n);

StudyDesign generate_design(const std::vector<std::string>& techniques,
                            const std::vector<std::string>& question_sets,
                            int participants);

std::string design_csv(const StudyDesign& design);

}  // namespace bivmap
