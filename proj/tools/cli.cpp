#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bivmap/cartogram.hpp"
#include "bivmap/csv.hpp"
#include "bivmap/error.hpp"
#include "bivmap/geometry.hpp"
#include "bivmap/model_io.hpp"
#include "bivmap/popchart.hpp"
#include "bivmap/stats.hpp"
#include "bivmap/taskoracle.hpp"
#include "bivmap/techniques.hpp"
#include "bivmap/version.hpp"

namespace bivmap::cli {

namespace {

using json = nlohmann::ordered_json;

struct Options {
  std::string geometry, data, cities, out, palette;
  std::string statistic_unit = "percent";
  std::string technique, variant, diagnostics;
  std::string trials, rankings;
  std::string task, metric = "absolute", region;
  std::string from_meta;
  int classes = 5;
  std::uint64_t seed = 0;
  std::vector<std::string> highlight, candidates, set_a, set_b, techniques, question_sets;
  double width = 960.0, height = 640.0, pitch = 55.0, bandwidth = 0.0;
  std::size_t resolution = 256;
  int resamples = kDefaultResamples;
  int participants = 0;
};

std::string strip_trailing_slash(std::string path) {
  while (path.size() > 1 && path.back() == '/') path.pop_back();
  return path;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << content;
  if (!f) throw Error("failed writing '" + path + "'");
}

std::string join(const std::vector<std::string>& items) {
  std::string s;
  for (const auto& i : items) s += (s.empty() ? "" : ",") + i;
  return s;
}

// Parse a file, prefixing any input error with its path.
template <class Parse>
auto load(const std::string& path, Parse&& parse) {
  const std::string text = read_file(path);
  try {
    return parse(text);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

DataMap load_data(const Options& o) {
  RegionMap map = load(o.geometry, [](const std::string& t) { return parse_geometry(t); });
  const StatisticUnit unit = parse_statistic_unit(o.statistic_unit);
  return load(o.data, [&](const std::string& t) { return join_data(map, parse_data_rows(t), unit); });
}

CityLayer load_cities(const Options& o, const DataMap& data) {
  return load(o.cities, [&](const std::string& t) { return parse_cities(t, data); });
}

Palette resolved_palette(const Options& o) {
  return o.palette.empty() ? default_palette(o.classes) : parse_palette(o.palette);
}

void write_meta(const std::string& out, const std::string& subcommand, const json& config,
                const std::vector<std::string>& outputs) {
  json meta;
  meta["tool"] = "bivmap";
  meta["version"] = std::string(kVersion);
  meta["subcommand"] = subcommand;
  meta["config"] = config;
  meta["outputs"] = outputs;
  write_file(strip_trailing_slash(out) + ".meta.json", meta.dump(2) + "\n");
}

void report_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
  for (const auto& w : warnings) err << "warning: " << w << '\n';
}

int cmd_render(const Options& o, std::ostream& err) {
  const DataMap data = load_data(o);
  report_warnings(data.map.warnings, err);
  RegionTechniqueSpec spec;
  spec.technique = parse_technique(o.technique);
  spec.classes = o.classes;
  spec.palette = resolved_palette(o);
  spec.camera.pitch_deg = o.pitch;
  spec.highlight = o.highlight;
  spec.width = o.width;
  spec.height = o.height;
  const RenderResult result = render_region_map_detailed(data, spec);

  std::vector<std::string> outputs{o.out};
  write_file(o.out, write_svg(result.scene));
  if (!o.diagnostics.empty()) {
    if (result.cartogram)
      write_file(o.diagnostics, diagnostics_json(*result.cartogram));
    else if (result.layout)
      write_file(o.diagnostics, diagnostics_json(*result.layout, data));
    else
      throw ValidationError("--diagnostics applies only to the cartogram and noncontiguous techniques");
    outputs.push_back(o.diagnostics);
  }

  json config;
  config["technique"] = o.technique;
  config["geometry"] = o.geometry;
  config["data"] = o.data;
  config["statistic-unit"] = o.statistic_unit;
  config["classes"] = o.classes;
  config["palette"] = join(spec.palette->colors);
  config["pitch"] = o.pitch;
  config["width"] = o.width;
  config["height"] = o.height;
  config["highlight"] = o.highlight;
  config["seed"] = o.seed;
  config["out"] = o.out;
  if (!o.diagnostics.empty()) config["diagnostics"] = o.diagnostics;
  write_meta(o.out, "render", config, outputs);
  return 0;
}

int cmd_popchart(const Options& o, std::ostream& err) {
  const DataMap data = load_data(o);
  const CityLayer cities = load_cities(o, data);
  report_warnings(data.map.warnings, err);
  report_warnings(cities.warnings, err);
  PopchartSpec spec;
  spec.variant = parse_popchart_variant(o.variant);
  spec.classes = o.classes;
  spec.palette = resolved_palette(o);
  spec.bandwidth = o.bandwidth > 0.0 ? o.bandwidth : 0.015 * data.map.bbox.diagonal();
  spec.resolution = o.resolution;
  spec.camera.pitch_deg = o.pitch;
  spec.highlight = o.highlight;
  spec.width = o.width;
  spec.height = o.height;
  write_file(o.out, write_svg(render_popchart(data, cities, spec)));

  json config;
  config["variant"] = o.variant;
  config["geometry"] = o.geometry;
  config["data"] = o.data;
  config["cities"] = o.cities;
  config["statistic-unit"] = o.statistic_unit;
  config["classes"] = o.classes;
  config["palette"] = join(spec.palette->colors);
  config["bandwidth"] = *spec.bandwidth;
  config["resolution"] = o.resolution;
  config["pitch"] = o.pitch;
  config["width"] = o.width;
  config["height"] = o.height;
  config["highlight"] = o.highlight;
  config["seed"] = o.seed;
  config["out"] = o.out;
  write_meta(o.out, "popchart", config, {o.out});
  return 0;
}

int cmd_oracle(const Options& o, std::ostream& out) {
  const DataMap data = load_data(o);
  const Metric metric = parse_metric(o.metric);
  std::vector<std::string> candidates = o.candidates;
  if (candidates.empty())
    for (const auto& r : data.map.regions) candidates.push_back(r.id);
  auto need = [&](const std::string& value, const char* flag) {
    if (value.empty()) throw ValidationError("task '" + o.task + "' requires " + flag);
  };

  json result;
  result["task"] = o.task;
  json support = json::object();
  if (o.task == "rank") {
    const auto order = rank_regions(data, metric, candidates);
    result["answer"] = order.front();
    support["metric"] = o.metric;
    support["order"] = order;
    json values = json::object();
    for (const auto& id : order) values[id] = metric_value(data, data.index_of(id), metric);
    support["values"] = values;
  } else if (o.task == "neighbor_argmax") {
    need(o.region, "--region");
    const AdjacencyGraph adj = adjacency(data.map);
    result["answer"] = neighbor_argmax(o.region, data, adj, metric);
    support["metric"] = o.metric;
    json values = json::object();
    for (const auto& id : adj.neighbor_ids(o.region))
      values[id] = metric_value(data, data.index_of(id), metric);
    support["neighbors"] = values;
  } else if (o.task == "compare") {
    if (o.set_a.empty() || o.set_b.empty())
      throw ValidationError("task 'compare' requires --set-a and --set-b");
    const Comparison c = summarize_compare(o.set_a, o.set_b, data, metric);
    result["answer"] = std::string(to_string(c.verdict));
    support["metric"] = o.metric;
    support["mean_a"] = c.mean_a;
    support["mean_b"] = c.mean_b;
  } else if (o.task == "biggest_city") {
    need(o.cities, "--cities");
    const CityAnswer a = biggest_city(candidates, load_cities(o, data));
    result["answer"] = a.region_id;
    support["city"] = a.city_id;
    support["population"] = a.population;
  } else if (o.task == "region_population") {
    need(o.region, "--region");
    need(o.cities, "--cities");
    data.index_of(o.region);
    result["answer"] = region_population_from_cities(o.region, load_cities(o, data));
    support["region"] = o.region;
  } else if (o.task == "absolute_count") {
    need(o.region, "--region");
    result["answer"] = absolute_count(o.region, data);
    const std::size_t i = data.index_of(o.region);
    support["population"] = data.population[i];
    support["rate"] = data.rate[i];
  } else {
    throw ValidationError("unknown oracle task '" + o.task +
                          "' (rank, neighbor_argmax, compare, biggest_city, "
                          "region_population, absolute_count)");
  }
  result["support"] = support;
  const std::string text = result.dump(2) + "\n";

  if (o.out.empty()) {
    out << text;
    return 0;
  }
  write_file(o.out, text);
  json config;
  config["task"] = o.task;
  config["geometry"] = o.geometry;
  config["data"] = o.data;
  if (!o.cities.empty()) config["cities"] = o.cities;
  config["statistic-unit"] = o.statistic_unit;
  config["metric"] = o.metric;
  if (!o.region.empty()) config["region"] = o.region;
  config["candidates"] = candidates;
  config["set-a"] = o.set_a;
  config["set-b"] = o.set_b;
  config["out"] = o.out;
  write_meta(o.out, "oracle", config, {o.out});
  return 0;
}

int cmd_design(const Options& o) {
  std::vector<std::string> sets = o.question_sets;
  if (sets.empty())
    for (std::size_t i = 1; i <= o.techniques.size(); ++i) sets.push_back("S" + std::to_string(i));
  write_file(o.out, design_csv(generate_design(o.techniques, sets, o.participants)));
  json config;
  config["techniques"] = o.techniques;
  config["question-sets"] = sets;
  config["participants"] = o.participants;
  config["out"] = o.out;
  write_meta(o.out, "design", config, {o.out});
  return 0;
}

int cmd_analyze(const Options& o, std::ostream& err) {
  const std::string trials_text = read_file(o.trials);
  const std::string rankings_text = o.rankings.empty() ? std::string() : read_file(o.rankings);
  TrialSet trials;
  try {
    trials = parse_trials(trials_text, rankings_text);
  } catch (const ParseError& e) {
    throw ParseError(o.trials + ": " + e.what());
  }
  const ValidationReport report = validate(trials);
  report_warnings(report.warnings, err);
  if (!report.ok()) throw ValidationError(o.trials + ": " + report.errors.front());

  const std::string dir = strip_trailing_slash(o.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory '" + dir + "': " + ec.message());

  AnalysisOptions options;
  options.resamples = o.resamples;
  options.seed = o.seed;
  const auto rows = analyze(trials, options);
  std::vector<std::string> outputs{dir + "/estimates.csv"};
  write_file(outputs.back(), analysis_csv(rows));
  for (const char* measure : {"accuracy", "accuracy_diff", "time", "time_ratio"}) {
    const bool present = std::any_of(rows.begin(), rows.end(),
                                     [&](const AnalysisRow& r) { return r.measure == measure; });
    if (!present) continue;
    outputs.push_back(dir + "/" + measure + ".svg");
    write_file(outputs.back(), write_svg(estimate_chart(rows, measure)));
  }
  if (!trials.rankings.empty()) {
    outputs.push_back(dir + "/rankings.csv");
    write_file(outputs.back(), rank_summary_csv(rank_summary(trials.rankings)));
  }

  json config;
  config["trials"] = o.trials;
  if (!o.rankings.empty()) config["rankings"] = o.rankings;
  config["resamples"] = o.resamples;
  config["seed"] = o.seed;
  config["sd-convention"] = "population";
  config["out"] = o.out;
  write_meta(o.out, "analyze", config, outputs);
  return 0;
}

int cmd_validate(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.geometry.empty() && o.trials.empty())
    throw ValidationError("validate needs --geometry or --trials");
  std::vector<std::string> errors, warnings;
  auto collect = [&](const std::string& what, const ValidationReport& r) {
    for (const auto& e : r.errors) errors.push_back(what + ": " + e);
    for (const auto& w : r.warnings) warnings.push_back(what + ": " + w);
  };
  if (!o.geometry.empty()) {
    const RegionMap map = load(o.geometry, [](const std::string& t) { return parse_geometry(t); });
    collect(o.geometry, validate(map));
    if (!o.data.empty()) {
      const DataMap data = load_data(o);
      collect(o.data, validate(data));
      if (!o.cities.empty()) collect(o.cities, validate(load_cities(o, data), data));
    }
  }
  if (!o.trials.empty()) {
    const std::string rankings = o.rankings.empty() ? std::string() : read_file(o.rankings);
    const std::string text = read_file(o.trials);
    TrialSet trials;
    try {
      trials = parse_trials(text, rankings);
    } catch (const ParseError& e) {
      throw ParseError(o.trials + ": " + e.what());
    }
    collect(o.trials, validate(trials));
  }
  for (const auto& w : warnings) err << "warning: " << w << '\n';
  for (const auto& e : errors) err << "error: " << e << '\n';
  out << (errors.empty() ? "ok" : "invalid") << " (" << errors.size() << " errors, "
      << warnings.size() << " warnings)\n";
  return errors.empty() ? 0 : 1;
}

// Flags to re-run a recorded invocation: arrays are joined with commas and
// floating-point values use their shortest round-trip form.
std::vector<std::string> args_from_meta(const std::string& path) {
  json meta;
  try {
    meta = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  if (!meta.contains("subcommand") || !meta.contains("config") || !meta["config"].is_object())
    throw ParseError(path + ": not a bivmap metadata file");
  std::vector<std::string> args{meta["subcommand"].get<std::string>()};
  for (const auto& [key, value] : meta["config"].items()) {
    if (key == "sd-convention") continue;
    std::string text;
    if (value.is_array()) {
      std::vector<std::string> items;
      for (const auto& v : value) items.push_back(v.get<std::string>());
      text = join(items);
    } else if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_number_unsigned()) {
      text = std::to_string(value.get<std::uint64_t>());
    } else if (value.is_number_integer()) {
      text = std::to_string(value.get<std::int64_t>());
    } else if (value.is_number_float()) {
      text = format_number(value.get<double>());
    } else {
      throw ParseError(path + ": unsupported value for '" + key + "'");
    }
    if (text.empty()) continue;
    args.push_back("--" + key);
    args.push_back(text);
  }
  return args;
}

void add_map_inputs(CLI::App* app, Options& o, bool required) {
  app->add_option("--geometry", o.geometry, "Region geometry (GeoJSON)")->required(required);
  app->add_option("--data", o.data, "Region data CSV: id,name,population,statistic")
      ->required(required);
  app->add_option("--statistic-unit", o.statistic_unit, "percent | fraction")
      ->capture_default_str();
}

void add_style(CLI::App* app, Options& o) {
  app->add_option("--classes", o.classes, "Quantile classes")->capture_default_str();
  app->add_option("--palette", o.palette, "Comma-separated hex colours, one per class");
  app->add_option("--pitch", o.pitch, "Camera pitch in degrees (90 = plan view)")
      ->capture_default_str();
  app->add_option("--width", o.width, "Scene width in px")->capture_default_str();
  app->add_option("--height", o.height, "Scene height in px")->capture_default_str();
  app->add_option("--highlight", o.highlight, "Region ids to outline")->delimiter(',');
  app->add_option("--seed", o.seed, "Recorded in the metadata")->capture_default_str();
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
             int depth) {
  Options o;
  CLI::App app{"Bivariate population maps: rendering, task oracles and study statistics",
               "bivmap"};
  app.set_version_flag("--version", std::string(kVersion));
  app.add_option("--from-meta", o.from_meta, "Re-run the invocation recorded in a .meta.json");
  app.require_subcommand(0, 1);

  auto* render = app.add_subcommand("render", "Render one of the region techniques to SVG");
  render->add_option("--technique", o.technique, "choropleth, juxtaposed, absolute, "
                     "value_by_alpha, prism3d, bertillon, dotmap, cartogram, noncontiguous")
      ->required();
  add_map_inputs(render, o, true);
  add_style(render, o);
  render->add_option("--out", o.out, "SVG output path")->required();
  render->add_option("--diagnostics", o.diagnostics, "Cartogram diagnostics JSON output path");

  auto* popchart = app.add_subcommand("popchart", "Render a city-level population overlay to SVG");
  popchart->add_option("--variant", o.variant, "dasymetric, dot, heatmap, prism")->required();
  add_map_inputs(popchart, o, true);
  popchart->add_option("--cities", o.cities, "Cities CSV")->required();
  add_style(popchart, o);
  popchart->add_option("--bandwidth", o.bandwidth, "KDE bandwidth in map units");
  popchart->add_option("--resolution", o.resolution, "KDE grid cells per side")
      ->capture_default_str();
  popchart->add_option("--out", o.out, "SVG output path")->required();

  auto* oracle = app.add_subcommand("oracle", "Compute the ground-truth answer of a map task");
  oracle->add_option("--task", o.task, "rank, neighbor_argmax, compare, biggest_city, "
                     "region_population, absolute_count")
      ->required();
  add_map_inputs(oracle, o, true);
  oracle->add_option("--cities", o.cities, "Cities CSV");
  oracle->add_option("--metric", o.metric, "population, rate, absolute")->capture_default_str();
  oracle->add_option("--region", o.region, "Query region id");
  oracle->add_option("--candidates", o.candidates, "Candidate region ids (default: all)")
      ->delimiter(',');
  oracle->add_option("--set-a", o.set_a, "Region ids of set A")->delimiter(',');
  oracle->add_option("--set-b", o.set_b, "Region ids of set B")->delimiter(',');
  oracle->add_option("--out", o.out, "JSON output path (default: stdout)");

  auto* design = app.add_subcommand("design", "Generate a counterbalanced study design CSV");
  design->add_option("--techniques", o.techniques, "Technique labels")
      ->delimiter(',')
      ->required();
  design->add_option("--question-sets", o.question_sets, "Question set labels (default S1..ST)")
      ->delimiter(',');
  design->add_option("--participants", o.participants, "Participant count")->required();
  design->add_option("--out", o.out, "CSV output path")->required();

  auto* analyze_cmd = app.add_subcommand("analyze", "Bootstrap estimates from a trial log");
  analyze_cmd->add_option("--trials", o.trials, "Trial log CSV")->required();
  analyze_cmd->add_option("--rankings", o.rankings, "Rankings CSV");
  analyze_cmd->add_option("--resamples", o.resamples, "Bootstrap resamples")
      ->capture_default_str();
  analyze_cmd->add_option("--seed", o.seed, "Bootstrap seed")->required();
  analyze_cmd->add_option("--out", o.out, "Output directory")->required();

  auto* validate_cmd = app.add_subcommand("validate", "Check input files and report problems");
  add_map_inputs(validate_cmd, o, false);
  validate_cmd->add_option("--cities", o.cities, "Cities CSV");
  validate_cmd->add_option("--trials", o.trials, "Trial log CSV");
  validate_cmd->add_option("--rankings", o.rankings, "Rankings CSV");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  if (!o.from_meta.empty()) {
    if (!app.get_subcommands().empty())
      throw ValidationError("--from-meta cannot be combined with a subcommand");
    if (depth > 0) throw ValidationError("--from-meta cannot be nested");
    return dispatch(args_from_meta(o.from_meta), out, err, depth + 1);
  }
  if (render->parsed()) return cmd_render(o, err);
  if (popchart->parsed()) return cmd_popchart(o, err);
  if (oracle->parsed()) return cmd_oracle(o, out);
  if (design->parsed()) return cmd_design(o);
  if (analyze_cmd->parsed()) return cmd_analyze(o, err);
  if (validate_cmd->parsed()) return cmd_validate(o, out, err);
  err << app.help();
  return 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err, 0);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace bivmap::cli
