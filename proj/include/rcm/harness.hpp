#pragma once

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rcm/colocation.hpp"
#include "rcm/ensemble_cache.hpp"
#include "rcm/error.hpp"
#include "rcm/io_instances.hpp"
#include "rcm/io_partitions.hpp"
#include "rcm/miners.hpp"
#include "rcm/rational.hpp"
#include "rcm/results_io.hpp"
#include "rcm/significance.hpp"
#include "rcm/spatial_core.hpp"
#include "rcm/synthgen.hpp"

namespace rcm {

namespace fs = std::filesystem;

// ---------------------------------------------------------------- options

struct InputOptions {
  std::string instances;
  std::string partitions;
  std::string feature_column = "feature";
  std::string x_column = "x";
  std::string y_column = "y";
  bool lonlat = false;
  double adjacency_tolerance = 1.0;
};

struct MineOptions {
  InputOptions input;
  std::vector<std::string> candidates;  // "A,B" or "A,B,C"; empty = all eligible pairs/triples
  std::size_t max_size = 2;
  std::string method = "multcomp";  // ssrcm | multcomp | both
  std::string alpha = "0.05";
  std::size_t simulations = 99;
  std::uint64_t seed = 0;
  std::size_t min_instances = 3;
  double d_lower = 100.0;
  double d_upper = 100.0;
  double d_step = 10.0;
  bool auto_scale_simulations = false;
  double pcf_threshold = 1.5;
  // Not part of the result-defining config.
  std::string out_dir = ".";
  std::string cache_dir;
  unsigned threads = 1;
};

struct BenchmarkOptions {
  std::string axis = "regions";  // colocation_instances | regions | feature_instances
  std::vector<std::size_t> values{4, 9, 16};
  std::size_t rows = 3;
  std::size_t cols = 3;
  double cell_size = 1000.0;
  std::size_t instances_per_cell = 8;
  std::size_t noise_per_feature = 10;
  double d_g = 50.0;
  double d = 50.0;
  std::string alpha = "0.05";
  std::size_t simulations = 99;
  bool auto_scale_simulations = false;
  std::uint64_t seed = 0;
  std::size_t repeats = 3;
  std::size_t min_instances = 3;
  std::string out_dir = ".";
  unsigned threads = 1;
};

struct FprOptions {
  std::size_t trials = 50;
  std::size_t rows = 8;
  std::size_t cols = 8;
  double cell_size = 1000.0;
  std::vector<std::string> features{"A", "B", "C"};
  std::vector<std::string> candidates{"A,B,C", "A,B", "B,C", "A,C"};
  std::size_t noise_per_feature = 20;
  std::size_t planted = 0;  // planted patterns per trial, cycling through candidates
  std::size_t planted_size = 4;
  std::size_t instances_per_cell = 8;
  double d_g = 50.0;
  double d = 100.0;
  std::string alpha = "0.05";
  std::size_t simulations = 99;
  std::uint64_t seed = 0;
  std::size_t min_instances = 3;
  std::string out_dir = ".";
  unsigned threads = 1;
};

struct SynthOptions {
  SynthConfig synth;
  std::string out_dir = ".";
};

struct ValidateNullsOptions {
  InputOptions input;
  double d_max = 200.0;
  std::size_t bins = 10;
  std::size_t simulations = 5;
  std::uint64_t seed = 0;
  double threshold = 1.5;
  std::string out_dir = ".";
  unsigned threads = 1;
};

// JSON forms. Only result-defining settings are serialized; output
// directories, caches and thread counts are left out so the embedded config
// (and its hash) is identical across machines and thread settings.

inline void to_json(json& j, const InputOptions& o) {
  j = json{{"instances", o.instances},       {"partitions", o.partitions}, {"feature_column", o.feature_column},
           {"x_column", o.x_column},         {"y_column", o.y_column},     {"lonlat", o.lonlat},
           {"adjacency_tolerance", o.adjacency_tolerance}};
}

inline void from_json(const json& j, InputOptions& o) {
  o.instances = j.value("instances", o.instances);
  o.partitions = j.value("partitions", o.partitions);
  o.feature_column = j.value("feature_column", o.feature_column);
  o.x_column = j.value("x_column", o.x_column);
  o.y_column = j.value("y_column", o.y_column);
  o.lonlat = j.value("lonlat", o.lonlat);
  o.adjacency_tolerance = j.value("adjacency_tolerance", o.adjacency_tolerance);
}

inline void to_json(json& j, const MineOptions& o) {
  j = json{{"command", "mine"},
           {"input", o.input},
           {"candidates", o.candidates},
           {"max_size", o.max_size},
           {"method", o.method},
           {"alpha", o.alpha},
           {"simulations", o.simulations},
           {"seed", o.seed},
           {"min_instances", o.min_instances},
           {"d_lower", o.d_lower},
           {"d_upper", o.d_upper},
           {"d_step", o.d_step},
           {"auto_scale_simulations", o.auto_scale_simulations},
           {"pcf_threshold", o.pcf_threshold}};
}

inline void from_json(const json& j, MineOptions& o) {
  if (j.contains("input")) o.input = j.at("input").get<InputOptions>();
  o.candidates = j.value("candidates", o.candidates);
  o.max_size = j.value("max_size", o.max_size);
  o.method = j.value("method", o.method);
  o.alpha = j.value("alpha", o.alpha);
  o.simulations = j.value("simulations", o.simulations);
  o.seed = j.value("seed", o.seed);
  o.min_instances = j.value("min_instances", o.min_instances);
  o.d_lower = j.value("d_lower", o.d_lower);
  o.d_upper = j.value("d_upper", o.d_upper);
  o.d_step = j.value("d_step", o.d_step);
  o.auto_scale_simulations = j.value("auto_scale_simulations", o.auto_scale_simulations);
  o.pcf_threshold = j.value("pcf_threshold", o.pcf_threshold);
}

inline void to_json(json& j, const BenchmarkOptions& o) {
  j = json{{"command", "benchmark"},
           {"axis", o.axis},
           {"values", o.values},
           {"rows", o.rows},
           {"cols", o.cols},
           {"cell_size", o.cell_size},
           {"instances_per_cell", o.instances_per_cell},
           {"noise_per_feature", o.noise_per_feature},
           {"d_g", o.d_g},
           {"d", o.d},
           {"alpha", o.alpha},
           {"simulations", o.simulations},
           {"auto_scale_simulations", o.auto_scale_simulations},
           {"seed", o.seed},
           {"repeats", o.repeats},
           {"min_instances", o.min_instances}};
}

inline void from_json(const json& j, BenchmarkOptions& o) {
  o.axis = j.value("axis", o.axis);
  o.values = j.value("values", o.values);
  o.rows = j.value("rows", o.rows);
  o.cols = j.value("cols", o.cols);
  o.cell_size = j.value("cell_size", o.cell_size);
  o.instances_per_cell = j.value("instances_per_cell", o.instances_per_cell);
  o.noise_per_feature = j.value("noise_per_feature", o.noise_per_feature);
  o.d_g = j.value("d_g", o.d_g);
  o.d = j.value("d", o.d);
  o.alpha = j.value("alpha", o.alpha);
  o.simulations = j.value("simulations", o.simulations);
  o.auto_scale_simulations = j.value("auto_scale_simulations", o.auto_scale_simulations);
  o.seed = j.value("seed", o.seed);
  o.repeats = j.value("repeats", o.repeats);
  o.min_instances = j.value("min_instances", o.min_instances);
}

inline void to_json(json& j, const FprOptions& o) {
  j = json{{"command", "fpr"},
           {"trials", o.trials},
           {"rows", o.rows},
           {"cols", o.cols},
           {"cell_size", o.cell_size},
           {"features", o.features},
           {"candidates", o.candidates},
           {"noise_per_feature", o.noise_per_feature},
           {"planted", o.planted},
           {"planted_size", o.planted_size},
           {"instances_per_cell", o.instances_per_cell},
           {"d_g", o.d_g},
           {"d", o.d},
           {"alpha", o.alpha},
           {"simulations", o.simulations},
           {"seed", o.seed},
           {"min_instances", o.min_instances}};
}

inline void from_json(const json& j, FprOptions& o) {
  o.trials = j.value("trials", o.trials);
  o.rows = j.value("rows", o.rows);
  o.cols = j.value("cols", o.cols);
  o.cell_size = j.value("cell_size", o.cell_size);
  o.features = j.value("features", o.features);
  o.candidates = j.value("candidates", o.candidates);
  o.noise_per_feature = j.value("noise_per_feature", o.noise_per_feature);
  o.planted = j.value("planted", o.planted);
  o.planted_size = j.value("planted_size", o.planted_size);
  o.instances_per_cell = j.value("instances_per_cell", o.instances_per_cell);
  o.d_g = j.value("d_g", o.d_g);
  o.d = j.value("d", o.d);
  o.alpha = j.value("alpha", o.alpha);
  o.simulations = j.value("simulations", o.simulations);
  o.seed = j.value("seed", o.seed);
  o.min_instances = j.value("min_instances", o.min_instances);
}

inline void to_json(json& j, const SynthOptions& o) {
  j = json{{"command", "synth"}, {"synth", o.synth}};
}

inline void from_json(const json& j, SynthOptions& o) {
  if (j.contains("synth")) o.synth = j.at("synth").get<SynthConfig>();
}

inline void to_json(json& j, const ValidateNullsOptions& o) {
  j = json{{"command", "validate-nulls"},
           {"input", o.input},
           {"d_max", o.d_max},
           {"bins", o.bins},
           {"simulations", o.simulations},
           {"seed", o.seed},
           {"threshold", o.threshold}};
}

inline void from_json(const json& j, ValidateNullsOptions& o) {
  if (j.contains("input")) o.input = j.at("input").get<InputOptions>();
  o.d_max = j.value("d_max", o.d_max);
  o.bins = j.value("bins", o.bins);
  o.simulations = j.value("simulations", o.simulations);
  o.seed = j.value("seed", o.seed);
  o.threshold = j.value("threshold", o.threshold);
}

// ---------------------------------------------------------------- helpers

namespace detail {

inline void require_file(const std::string& path, const std::string& what) {
  if (path.empty()) fail(ErrorKind::config, "no " + what + " file given");
  if (!fs::is_regular_file(path)) fail(ErrorKind::io, what + " file not found: " + path);
}

inline fs::path prepare_out_dir(const std::string& dir) {
  fs::path p = dir.empty() ? fs::path(".") : fs::path(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec || !fs::is_directory(p)) fail(ErrorKind::io, "cannot create output directory '" + p.string() + "'");
  return p;
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::io, "cannot write '" + path.string() + "'");
  out << text;
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline Rational parse_alpha(const std::string& text) {
  Rational a = parse_rational(text);
  check_alpha(a);
  return a;
}

inline std::vector<std::string> split_names(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',' || c == '|') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  std::erase_if(out, [](const std::string& s) { return s.empty(); });
  return out;
}

inline std::vector<Method> parse_methods(const std::string& text) {
  if (text == "both") return {Method::ssrcm, Method::multcomp};
  return {parse_method(text)};
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct LoadedInput {
  InstanceTable table;
  PartitionSet partitions;
  std::vector<std::string> warnings;
};

inline LoadedInput load_input(const InputOptions& o) {
  require_file(o.instances, "instances");
  require_file(o.partitions, "partitions");
  LoadedInput in;
  std::optional<Projection> projection;
  if (o.lonlat) projection = projection_for(o.partitions);
  in.partitions = derive_adjacency(load_partitions(o.partitions, projection), o.adjacency_tolerance);

  InstanceSchema schema;
  schema.feature_column = o.feature_column;
  schema.x_column = o.x_column;
  schema.y_column = o.y_column;
  schema.lonlat = o.lonlat;
  if (projection) schema.projection = *projection;
  try {
    in.table = load_instances(o.instances, schema);
  } catch (const Error& e) {
    throw Error(e.kind(), o.instances + ": " + e.what());
  }
  for (const auto& r : in.table.row_errors) {
    in.warnings.push_back(o.instances + ":" + std::to_string(r.line) + ": " + r.message);
  }
  in.table.instances = assign_partitions(std::move(in.table.instances), in.partitions);
  const auto outside = std::count_if(in.table.instances.begin(), in.table.instances.end(),
                                     [](const FeatureInstance& i) { return i.partition == kOutside; });
  if (outside > 0) in.warnings.push_back(std::to_string(outside) + " instances lie outside every partition");
  return in;
}

}  // namespace detail

// ---------------------------------------------------------------- mine

struct MineOutput {
  json patterns;  // the full result document
  std::string summary_csv;
  std::string counters_csv;
};

inline MineOutput run_mine(const MineOptions& o) {
  const json config = o;
  const Rational alpha = detail::parse_alpha(o.alpha);
  const auto methods = detail::parse_methods(o.method);
  if (o.max_size < 2 || o.max_size > 3) fail(ErrorKind::config, "max_size must be 2 or 3");
  distance_values(o.d_lower, o.d_upper, o.d_step);

  auto in = detail::load_input(o.input);
  const auto& features = in.table.features;
  if (in.table.instances.empty()) fail(ErrorKind::insufficient_data, o.input.instances + ": no usable instances");

  std::vector<Candidate> candidates;
  for (const auto& text : o.candidates) {
    try {
      candidates.push_back(make_candidate(features, detail::split_names(text)));
    } catch (const Error& e) {
      throw Error(ErrorKind::config, "candidate '" + text + "': " + e.what());
    }
  }
  if (candidates.empty()) {
    candidates = all_candidates(in.table.instances, in.partitions, features.size(), o.min_instances, o.max_size);
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  MineConfig mc;
  mc.alpha = alpha;
  mc.simulations = o.simulations;
  mc.seed = o.seed;
  mc.min_instances = o.min_instances;
  mc.d_lower = o.d_lower;
  mc.d_upper = o.d_upper;
  mc.d_step = o.d_step;
  mc.auto_scale_simulations = o.auto_scale_simulations;
  mc.pcf_threshold = o.pcf_threshold;
  mc.threads = std::max(1u, o.threads);
  mc.feature_names = features.names();

  std::vector<MineReport> reports;
  if (!candidates.empty()) {
    const std::size_t r = effective_simulations(mc, in.partitions.size());
    NullOptions nopt;
    for (const auto& c : candidates) nopt.features.insert(nopt.features.end(), c.features().begin(), c.features().end());
    std::sort(nopt.features.begin(), nopt.features.end());
    nopt.features.erase(std::unique(nopt.features.begin(), nopt.features.end()), nopt.features.end());
    nopt.threads = mc.threads;

    std::optional<NullEnsemble> ensemble;
    fs::path cache_file;
    if (!o.cache_dir.empty()) {
      cache_file = detail::prepare_out_dir(o.cache_dir) /
                   ("nulls-" + ensemble_cache_key(in.table.instances, in.partitions, r, o.seed, nopt.features) + ".bin");
      ensemble = load_ensemble(cache_file);
    }
    if (!ensemble) {
      ensemble = generate_nulls(in.table.instances, in.partitions, r, o.seed, nopt);
      if (!cache_file.empty()) save_ensemble(cache_file, *ensemble);
    }
    for (auto m : methods) {
      mc.method = m;
      reports.push_back(mine_with(in.table.instances, in.partitions, candidates, mc, *ensemble));
    }
  }

  MineOutput out;
  out.patterns = report_to_json(reports, in.partitions, features, config, o.seed);
  for (auto it = in.warnings.rbegin(); it != in.warnings.rend(); ++it) {
    out.patterns["warnings"].insert(out.patterns["warnings"].begin(), *it);
  }
  json distances = json::array();
  for (double d : distance_values(o.d_lower, o.d_upper, o.d_step)) distances.push_back(d);
  out.patterns["distances"] = distances;
  out.patterns["partitions"] = json::array();
  for (const auto& p : in.partitions.partitions) {
    out.patterns["partitions"].push_back({{"id", p.id}, {"label", p.label}, {"neighbors", p.neighbors}});
  }
  const std::string hash = config_hash(config);
  std::ostringstream summary, counters;
  write_summary_csv(summary, reports, in.partitions, features, hash, o.seed);
  write_counters_csv(counters, reports, features, hash, o.seed);
  out.summary_csv = summary.str();
  out.counters_csv = counters.str();
  return out;
}

inline MineOutput cmd_mine(const MineOptions& o) {
  auto out = run_mine(o);
  const auto dir = detail::prepare_out_dir(o.out_dir);
  detail::write_text(dir / "patterns.json", detail::dump(out.patterns));
  detail::write_text(dir / "summary.csv", out.summary_csv);
  detail::write_text(dir / "counters.csv", out.counters_csv);
  return out;
}

// ---------------------------------------------------------------- benchmark

struct BenchmarkRow {
  std::string axis;
  std::size_t value = 0;
  Method method = Method::multcomp;
  std::size_t partitions = 0;
  std::size_t instances = 0;
  std::size_t simulations = 0;
  double wall_ms = 0.0;  // median over repeats
  CostCounters counters;
  std::size_t patterns = 0;
  std::size_t largest_region = 0;
};

struct BenchmarkOutput {
  std::vector<BenchmarkRow> rows;
  json counters;  // deterministic part
  std::string timing_csv;
};

namespace detail {

// Grid shape for a region count: the most square factorisation.
inline std::pair<std::size_t, std::size_t> grid_shape(std::size_t cells) {
  std::size_t rows = static_cast<std::size_t>(std::sqrt(static_cast<double>(cells)));
  while (rows > 1 && cells % rows != 0) --rows;
  return {std::max<std::size_t>(rows, 1), cells / std::max<std::size_t>(rows, 1)};
}

}  // namespace detail

inline void validate(const BenchmarkOptions& o) {
  if (o.axis != "colocation_instances" && o.axis != "regions" && o.axis != "feature_instances") {
    fail(ErrorKind::config, "benchmark axis must be colocation_instances, regions or feature_instances");
  }
  if (o.values.empty()) fail(ErrorKind::config, "benchmark needs at least one sweep value");
  if (o.repeats < 1) fail(ErrorKind::config, "benchmark repeats must be >= 1");
  for (auto v : o.values) {
    if (o.axis == "regions" && v < 1) fail(ErrorKind::config, "region count must be >= 1");
    if (o.axis == "colocation_instances" && v < 1) fail(ErrorKind::config, "colocation instances must be >= 1");
  }
  if (!(o.d > 0.0)) fail(ErrorKind::config, "benchmark distance d must be positive");
  detail::parse_alpha(o.alpha);
}

/// Synthetic dataset for one sweep point: one {A,B} pattern planted in every
/// cell of the grid, plus CSR noise.
inline SynthConfig benchmark_dataset(const BenchmarkOptions& o, std::size_t value) {
  SynthConfig sc;
  sc.rows = o.rows;
  sc.cols = o.cols;
  sc.cell_size = o.cell_size;
  sc.features = {"A", "B"};
  sc.noise_per_feature = o.noise_per_feature;
  sc.seed = derive_seed(o.seed, {value});
  PlantedSpec spec;
  spec.features = {"A", "B"};
  spec.instances_per_cell = o.instances_per_cell;
  spec.d_g = o.d_g;
  if (o.axis == "regions") std::tie(sc.rows, sc.cols) = detail::grid_shape(value);
  if (o.axis == "colocation_instances") spec.instances_per_cell = value;
  if (o.axis == "feature_instances") sc.noise_per_feature = value;
  for (PartitionId g = 0; g < sc.rows * sc.cols; ++g) spec.region.push_back(g);
  sc.planted.push_back(spec);
  return sc;
}

inline BenchmarkOutput run_benchmark(const BenchmarkOptions& o) {
  validate(o);
  const json config = o;
  const std::string hash = config_hash(config);
  BenchmarkOutput out;
  json rows = json::array();
  for (auto value : o.values) {
    const auto data = generate(benchmark_dataset(o, value));
    const Candidate cand = make_candidate(data.features, {"A", "B"});
    MineConfig mc;
    mc.alpha = detail::parse_alpha(o.alpha);
    mc.simulations = o.simulations;
    mc.auto_scale_simulations = o.auto_scale_simulations;
    mc.seed = derive_seed(o.seed, {value, 1});
    mc.min_instances = o.min_instances;
    mc.d_lower = mc.d_upper = o.d;
    mc.threads = std::max(1u, o.threads);
    mc.feature_names = data.features.names();
    const std::size_t r = effective_simulations(mc, data.partitions.size());
    NullOptions nopt;
    nopt.threads = mc.threads;
    const auto ensemble = generate_nulls(data.instances, data.partitions, r, mc.seed, nopt);

    for (auto m : {Method::ssrcm, Method::multcomp}) {
      mc.method = m;
      std::vector<double> times;
      MineReport report;
      for (std::size_t k = 0; k < o.repeats; ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        report = mine_with(data.instances, data.partitions, {cand}, mc, ensemble);
        const auto t1 = std::chrono::steady_clock::now();
        times.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
      }
      BenchmarkRow row;
      row.axis = o.axis;
      row.value = value;
      row.method = m;
      row.partitions = data.partitions.size();
      row.instances = data.instances.size();
      row.simulations = r;
      row.wall_ms = detail::median(times);
      row.counters = report.total_counters();
      for (const auto* p : report.patterns()) {
        ++row.patterns;
        row.largest_region = std::max(row.largest_region, p->n);
      }
      rows.push_back({{"axis", row.axis},
                      {"value", row.value},
                      {"method", to_string(m)},
                      {"partitions", row.partitions},
                      {"instances", row.instances},
                      {"simulations", row.simulations},
                      {"counters", counters_to_json(row.counters)},
                      {"patterns", row.patterns},
                      {"largest_region", row.largest_region}});
      out.rows.push_back(row);
    }
  }
  out.counters = json{{"format", "rcm-benchmark/1"},
                      {"config", config},
                      {"config_hash", hash},
                      {"seed", o.seed},
                      {"rows", rows}};
  std::ostringstream csv;
  csv << "config_hash,seed,axis,value,method,partitions,instances,simulations,wall_ms,"
         "significance_tests,pi_computations,null_pi_computations,threshold_comparisons,patterns,largest_region\n";
  for (const auto& r : out.rows) {
    csv << hash << ',' << o.seed << ',' << r.axis << ',' << r.value << ',' << to_string(r.method) << ','
        << r.partitions << ',' << r.instances << ',' << r.simulations << ',' << detail::num(r.wall_ms) << ','
        << r.counters.significance_tests << ',' << r.counters.pi_computations << ','
        << r.counters.null_pi_computations << ',' << r.counters.threshold_comparisons << ',' << r.patterns
        << ',' << r.largest_region << '\n';
  }
  out.timing_csv = csv.str();
  return out;
}

inline BenchmarkOutput cmd_benchmark(const BenchmarkOptions& o) {
  auto out = run_benchmark(o);
  const auto dir = detail::prepare_out_dir(o.out_dir);
  detail::write_text(dir / "benchmark.csv", out.timing_csv);
  detail::write_text(dir / "benchmark.json", detail::dump(out.counters));
  return out;
}

// ---------------------------------------------------------------- fpr

struct FprRow {
  std::string pattern;  // "{A, B, C}"
  double ssrcm = 0.0;   // mean per-trial FPR
  double multcomp = 0.0;
  FprScore ssrcm_pooled;
  FprScore multcomp_pooled;
};

struct FprOutput {
  std::vector<FprRow> rows;
  json document;
  std::string csv;
};

inline void validate(const FprOptions& o) {
  if (o.trials < 10) fail(ErrorKind::parameter, "fpr needs trials >= 10, got " + std::to_string(o.trials));
  if (o.candidates.empty()) fail(ErrorKind::config, "fpr needs at least one candidate");
  if (!(o.d > 0.0)) fail(ErrorKind::config, "fpr distance d must be positive");
  detail::parse_alpha(o.alpha);
}

/// Dataset of one FPR trial: CSR noise everywhere, plus `planted` patterns on
/// random connected regions.
inline SynthConfig fpr_dataset(const FprOptions& o, std::size_t trial) {
  SynthConfig sc;
  sc.rows = o.rows;
  sc.cols = o.cols;
  sc.cell_size = o.cell_size;
  sc.features = o.features;
  sc.noise_per_feature = o.noise_per_feature;
  sc.seed = derive_seed(o.seed, {trial});
  Rng rng(derive_seed(o.seed, {trial, 0x91A}));
  for (std::size_t k = 0; k < o.planted; ++k) {
    PlantedSpec spec;
    spec.region = random_connected_region(o.rows, o.cols, o.planted_size, rng);
    spec.features = detail::split_names(o.candidates[k % o.candidates.size()]);
    spec.instances_per_cell = o.instances_per_cell;
    spec.d_g = o.d_g;
    sc.planted.push_back(spec);
  }
  return sc;
}

inline FprOutput run_fpr(const FprOptions& o) {
  validate(o);
  const json config = o;
  const std::string hash = config_hash(config);
  const FeatureRegistry registry(o.features);
  std::vector<Candidate> candidates;
  for (const auto& text : o.candidates) {
    try {
      candidates.push_back(make_candidate(registry, detail::split_names(text)));
    } catch (const Error& e) {
      throw Error(ErrorKind::config, "candidate '" + text + "': " + e.what());
    }
  }

  MineConfig mc;
  mc.alpha = detail::parse_alpha(o.alpha);
  mc.simulations = o.simulations;
  mc.min_instances = o.min_instances;
  mc.d_lower = mc.d_upper = o.d;
  mc.threads = std::max(1u, o.threads);
  mc.feature_names = registry.names();
  const std::size_t r = effective_simulations(mc, o.rows * o.cols);

  const std::size_t nc = candidates.size();
  std::vector<double> sum_ss(nc, 0.0), sum_mc(nc, 0.0);
  std::vector<FprScore> pool_ss(nc), pool_mc(nc);
  json trials = json::array();
  for (std::size_t t = 0; t < o.trials; ++t) {
    const auto data = generate(fpr_dataset(o, t));
    NullOptions nopt;
    nopt.threads = mc.threads;
    const auto ensemble = generate_nulls(data.instances, data.partitions, r, derive_seed(o.seed, {t, 1}), nopt);
    mc.method = Method::ssrcm;
    const auto ss = mine_with(data.instances, data.partitions, candidates, mc, ensemble);
    mc.method = Method::multcomp;
    const auto mu = mine_with(data.instances, data.partitions, candidates, mc, ensemble);
    auto collect = [](const MineReport& rep) {
      std::vector<RegionalPattern> out;
      for (const auto* p : rep.patterns()) out.push_back(*p);
      return out;
    };
    const auto ss_patterns = collect(ss);
    const auto mu_patterns = collect(mu);
    json per = json::array();
    for (std::size_t c = 0; c < nc; ++c) {
      const auto a = score_fpr(ss_patterns, data.truth, data.features, candidates[c]);
      const auto b = score_fpr(mu_patterns, data.truth, data.features, candidates[c]);
      sum_ss[c] += to_double(a.rate());
      sum_mc[c] += to_double(b.rate());
      pool_ss[c] += a;
      pool_mc[c] += b;
      per.push_back({{"ssrcm_fp", a.false_positives},
                     {"ssrcm_tn", a.true_negatives},
                     {"multcomp_fp", b.false_positives},
                     {"multcomp_tn", b.true_negatives}});
    }
    trials.push_back(per);
  }

  FprOutput out;
  json rows = json::array();
  std::ostringstream csv;
  csv << "config_hash,seed,pattern,ssrcm_fpr,multcomp_fpr,trials,ssrcm_fp,ssrcm_tn,multcomp_fp,multcomp_tn\n";
  for (std::size_t c = 0; c < nc; ++c) {
    FprRow row;
    row.pattern = "{";
    for (const auto& n : candidate_names(candidates[c], registry)) {
      row.pattern += (row.pattern.size() > 1 ? ", " : "") + n;
    }
    row.pattern += "}";
    row.ssrcm = sum_ss[c] / static_cast<double>(o.trials);
    row.multcomp = sum_mc[c] / static_cast<double>(o.trials);
    row.ssrcm_pooled = pool_ss[c];
    row.multcomp_pooled = pool_mc[c];
    rows.push_back({{"pattern", row.pattern},
                    {"ssrcm_fpr", row.ssrcm},
                    {"multcomp_fpr", row.multcomp},
                    {"ssrcm_fp", row.ssrcm_pooled.false_positives},
                    {"ssrcm_tn", row.ssrcm_pooled.true_negatives},
                    {"multcomp_fp", row.multcomp_pooled.false_positives},
                    {"multcomp_tn", row.multcomp_pooled.true_negatives}});
    csv << hash << ',' << o.seed << ',' << detail::csv_field(row.pattern) << ',' << detail::num(row.ssrcm) << ','
        << detail::num(row.multcomp) << ',' << o.trials << ',' << row.ssrcm_pooled.false_positives << ','
        << row.ssrcm_pooled.true_negatives << ',' << row.multcomp_pooled.false_positives << ','
        << row.multcomp_pooled.true_negatives << '\n';
    out.rows.push_back(row);
  }
  out.document = json{{"format", "rcm-fpr/1"},
                      {"config", config},
                      {"config_hash", hash},
                      {"seed", o.seed},
                      {"simulations", r},
                      {"rows", rows},
                      {"trials", trials}};
  out.csv = csv.str();
  return out;
}

inline FprOutput cmd_fpr(const FprOptions& o) {
  auto out = run_fpr(o);
  const auto dir = detail::prepare_out_dir(o.out_dir);
  detail::write_text(dir / "fpr.csv", out.csv);
  detail::write_text(dir / "fpr.json", detail::dump(out.document));
  return out;
}

// ---------------------------------------------------------------- synth

struct SynthOutput {
  std::string instances_csv;
  json partitions;
  json truth;
};

inline SynthOutput run_synth(const SynthOptions& o) {
  const json config = o;
  const auto data = generate(o.synth);
  SynthOutput out;
  std::ostringstream csv;
  write_instances(csv, data.instances, data.features);
  out.instances_csv = csv.str();
  out.partitions = partitions_to_geojson(data.partitions);
  out.partitions["config_hash"] = config_hash(config);
  out.partitions["seed"] = o.synth.seed;
  out.truth = json{{"format", "rcm-truth/1"},
                   {"config", config},
                   {"config_hash", config_hash(config)},
                   {"seed", o.synth.seed},
                   {"truth", data.truth}};
  return out;
}

inline SynthOutput cmd_synth(const SynthOptions& o) {
  auto out = run_synth(o);
  const auto dir = detail::prepare_out_dir(o.out_dir);
  detail::write_text(dir / "instances.csv", out.instances_csv);
  detail::write_text(dir / "partitions.geojson", detail::dump(out.partitions));
  detail::write_text(dir / "truth.json", detail::dump(out.truth));
  return out;
}

// ---------------------------------------------------------------- validate-nulls

struct ValidateNullsOutput {
  json document;
  std::string csv;
};

/// PCF of every observed feature over the whole study area next to the mean
/// PCF of the same feature in the first `simulations` null datasets.
inline ValidateNullsOutput run_validate_nulls(const ValidateNullsOptions& o) {
  if (!(o.d_max > 0.0) || o.bins < 1) fail(ErrorKind::config, "validate-nulls needs d_max > 0 and bins >= 1");
  if (o.simulations < 1) fail(ErrorKind::config, "validate-nulls needs simulations >= 1");
  const json config = o;
  const std::string hash = config_hash(config);
  auto in = detail::load_input(o.input);
  const auto& features = in.table.features;
  const double window = in.partitions.total_area();
  NullOptions nopt;
  nopt.threads = std::max(1u, o.threads);
  const auto ensemble = generate_nulls(in.table.instances, in.partitions, o.simulations, o.seed, nopt);

  json per_feature = json::array();
  std::ostringstream csv;
  csv << "config_hash,seed,feature,source,r_lo,r_hi,distance,pairs,g\n";
  std::vector<std::string> warnings = in.warnings;
  for (FeatureId f = 0; f < features.size(); ++f) {
    std::vector<Point> observed;
    for (const auto& inst : in.table.instances) {
      if (inst.feature == f && inst.partition != kOutside) observed.push_back(inst.location);
    }
    json entry{{"feature", features.name(f)}, {"instances", observed.size()}};
    if (observed.size() < 2) {
      entry["skipped"] = "fewer than 2 instances";
      per_feature.push_back(entry);
      continue;
    }
    const auto obs = pair_correlation(observed, o.d_max, o.bins, window);
    std::vector<double> null_mean(o.bins, 0.0);
    for (std::size_t i = 0; i < ensemble.simulations; ++i) {
      std::vector<Point> pts;
      for (PartitionId g = 0; g < in.partitions.size(); ++g) {
        for (const auto& p : ensemble.simulation(g, i)) {
          if (p.feature == f) pts.push_back(p.location);
        }
      }
      const auto bins = pair_correlation(pts, o.d_max, o.bins, window);
      for (std::size_t b = 0; b < o.bins; ++b) null_mean[b] += bins[b].g / static_cast<double>(ensemble.simulations);
    }
    json jb = json::array();
    double max_g = 0.0;
    for (std::size_t b = 0; b < o.bins; ++b) {
      const auto& bin = obs[b];
      max_g = std::max(max_g, bin.g);
      jb.push_back({{"r_lo", bin.r_lo},
                    {"r_hi", bin.r_hi},
                    {"distance", bin.distance},
                    {"pairs", bin.pairs},
                    {"g", bin.g},
                    {"g_null_mean", null_mean[b]}});
      csv << hash << ',' << o.seed << ',' << detail::csv_field(features.name(f)) << ",observed,"
          << detail::num(bin.r_lo) << ',' << detail::num(bin.r_hi) << ',' << detail::num(bin.distance) << ','
          << bin.pairs << ',' << detail::num(bin.g) << '\n';
      csv << hash << ',' << o.seed << ',' << detail::csv_field(features.name(f)) << ",null_mean,"
          << detail::num(bin.r_lo) << ',' << detail::num(bin.r_hi) << ',' << detail::num(bin.distance) << ",,"
          << detail::num(null_mean[b]) << '\n';
    }
    entry["bins"] = jb;
    entry["max_g"] = max_g;
    entry["clustered"] = max_g > o.threshold;
    if (max_g > o.threshold) {
      warnings.push_back("feature " + features.name(f) + " is clustered (max g=" + detail::num(max_g) + ")");
    }
    per_feature.push_back(entry);
  }
  ValidateNullsOutput out;
  out.document = json{{"format", "rcm-pcf/1"},
                      {"config", config},
                      {"config_hash", hash},
                      {"seed", o.seed},
                      {"window_area", window},
                      {"features", per_feature},
                      {"warnings", warnings}};
  out.csv = csv.str();
  return out;
}

inline ValidateNullsOutput cmd_validate_nulls(const ValidateNullsOptions& o) {
  auto out = run_validate_nulls(o);
  const auto dir = detail::prepare_out_dir(o.out_dir);
  detail::write_text(dir / "pcf.csv", out.csv);
  detail::write_text(dir / "pcf.json", detail::dump(out.document));
  return out;
}

// ---------------------------------------------------------------- errors

/// 2 for usage, configuration and missing-input problems, 1 for failures
/// while running.
inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config:
    case ErrorKind::parameter:
    case ErrorKind::schema:
    case ErrorKind::io:
      return 2;
    default:
      return 1;
  }
}

inline json error_json(std::string_view kind, const std::string& message) {
  return json{{"error", {{"kind", kind}, {"message", message}}}};
}

}  // namespace rcm
