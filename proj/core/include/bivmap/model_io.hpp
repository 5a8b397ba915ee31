#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "bivmap/types.hpp"

namespace bivmap {

enum class StatisticUnit { percent, fraction };

StatisticUnit parse_statistic_unit(std::string_view text);
std::string_view to_string(StatisticUnit unit);

// GeoJSON FeatureCollection subset: Polygon / MultiPolygon features with
// properties {id, name}. Ring orientation is normalized (outer CCW, holes CW).
RegionMap parse_geometry(std::string_view json);
std::string serialize_geometry(const RegionMap& map);

struct DataRow {
  std::string id;
  std::string name;
  double population = 0.0;
  double statistic = 0.0;
};

// Region data CSV: id,name,population,statistic
std::vector<DataRow> parse_data_rows(std::string_view csv);

DataMap join_data(const RegionMap& map, const std::vector<DataRow>& rows,
                  StatisticUnit unit);

// Cities CSV: id,region_id,name,x,y,population[,footprint]
// footprint holds a WKT POLYGON.
CityLayer parse_cities(std::string_view csv, const DataMap& data);

// Trial log CSV: participant_id,technique,question,question_set,correct,time_ms
// Rankings CSV: participant_id,technique,rank (may be empty).
TrialSet parse_trials(std::string_view trials_csv,
                      std::string_view rankings_csv = {});

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;

  bool ok() const { return errors.empty(); }
};

ValidationReport validate(const RegionMap& map);
ValidationReport validate(const DataMap& data);
ValidationReport validate(const CityLayer& cities, const DataMap& data);
ValidationReport validate(const TrialSet& trials);

std::string read_file(const std::string& path);

}  // namespace bivmap
