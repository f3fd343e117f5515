// rcm: command-line front end for regional colocation mining.

#include "CLI11.hpp"
#include "json.hpp"

#include <cstring>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "rcm/rcm.hpp"

namespace {

using rcm::json;

void add_input_flags(CLI::App* cmd, rcm::InputOptions& in) {
  cmd->add_option("--instances", in.instances, "CSV of feature instances");
  cmd->add_option("--partitions", in.partitions, "GeoJSON FeatureCollection of partitions");
  cmd->add_option("--feature-column", in.feature_column, "feature column name");
  cmd->add_option("--x-column", in.x_column, "x (or longitude) column name");
  cmd->add_option("--y-column", in.y_column, "y (or latitude) column name");
  cmd->add_flag("--lonlat", in.lonlat, "inputs are lon/lat degrees; project to meters");
  cmd->add_option("--adjacency-tolerance", in.adjacency_tolerance,
                  "minimum shared boundary length (meters) for adjacency");
}

// Value of --config in argv, if any. It is applied before the flags so that
// explicit flags override the file.
std::string find_config(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--config") == 0 && i + 1 < argc) return argv[i + 1];
    if (std::strncmp(argv[i], "--config=", 9) == 0) return argv[i] + 9;
  }
  return {};
}

template <typename Options>
void apply_config(const std::string& path, Options& o) {
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) rcm::fail(rcm::ErrorKind::io, "config file not found: " + path);
  json j;
  try {
    in >> j;
    o = j.get<Options>();
  } catch (const json::exception& e) {
    rcm::fail(rcm::ErrorKind::config, path + ": " + e.what());
  }
}

// "0,1,3:A,B:4:50" -> region, features, instances per cell, d_g.
rcm::PlantedSpec parse_plant(const std::string& text) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  if (parts.size() < 2 || parts.size() > 4) {
    rcm::fail(rcm::ErrorKind::config, "--plant expects REGION:FEATURES[:PER_CELL[:D_G]], got '" + text + "'");
  }
  rcm::PlantedSpec spec;
  try {
    for (const auto& id : rcm::detail::split_names(parts[0])) spec.region.push_back(std::stoul(id));
    if (parts.size() > 2) spec.instances_per_cell = std::stoul(parts[2]);
    if (parts.size() > 3) spec.d_g = std::stod(parts[3]);
  } catch (const std::exception&) {
    rcm::fail(rcm::ErrorKind::config, "--plant has a malformed number in '" + text + "'");
  }
  spec.region = rcm::make_region(spec.region);
  spec.features = rcm::detail::split_names(parts[1]);
  return spec;
}

int report_error(std::string_view kind, const std::string& message, int code) {
  std::cerr << rcm::error_json(kind, message).dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Statistically significant regional colocation mining"};
  app.require_subcommand(1);

  rcm::MineOptions mine;
  rcm::BenchmarkOptions bench;
  rcm::FprOptions fpr;
  rcm::SynthOptions synth;
  rcm::ValidateNullsOptions vnulls;
  std::vector<std::string> plants;
  std::string config_path;

  const std::string sub = argc > 1 ? argv[1] : "";
  try {
    config_path = find_config(argc, argv);
    if (sub == "mine") apply_config(config_path, mine);
    if (sub == "benchmark") apply_config(config_path, bench);
    if (sub == "fpr") apply_config(config_path, fpr);
    if (sub == "synth") apply_config(config_path, synth);
    if (sub == "validate-nulls") apply_config(config_path, vnulls);
  } catch (const rcm::Error& e) {
    return report_error(rcm::to_string(e.kind()), e.what(), rcm::exit_code_for(e.kind()));
  }

  auto* m = app.add_subcommand("mine", "mine regional colocation patterns");
  add_input_flags(m, mine.input);
  m->add_option("--candidate", mine.candidates, "candidate features, e.g. A,B (repeatable)");
  m->add_option("--max-size", mine.max_size, "largest candidate size when none given (2 or 3)");
  m->add_option("--method", mine.method, "ssrcm, multcomp or both");
  m->add_option("--alpha", mine.alpha, "significance level, decimal or fraction");
  m->add_option("-R,--simulations", mine.simulations, "null simulations per partition");
  m->add_option("--seed", mine.seed, "master seed");
  m->add_option("--min-instances", mine.min_instances, "minimum instances per feature per partition");
  double d_single = 0.0;
  auto* d_flag = m->add_option("--d", d_single, "neighbor distance in meters (sets LB = UB)");
  m->add_option("--d-lower", mine.d_lower, "lowest neighbor distance");
  m->add_option("--d-upper", mine.d_upper, "highest neighbor distance");
  m->add_option("--d-step", mine.d_step, "distance step");
  m->add_flag("--auto-scale-simulations", mine.auto_scale_simulations, "raise R so alpha/n stays reachable");
  m->add_option("--pcf-threshold", mine.pcf_threshold, "g(d) above which a feature is reported as clustered");
  m->add_option("--out", mine.out_dir, "output directory");
  m->add_option("--cache-dir", mine.cache_dir, "directory for cached null ensembles");
  m->add_option("--threads", mine.threads, "worker threads");

  auto* b = app.add_subcommand("benchmark", "time both miners over a synthetic sweep");
  b->add_option("--axis", bench.axis, "colocation_instances, regions or feature_instances");
  b->add_option("--values", bench.values, "sweep values")->delimiter(',');
  b->add_option("--rows", bench.rows, "grid rows (fixed axes)");
  b->add_option("--cols", bench.cols, "grid columns (fixed axes)");
  b->add_option("--cell-size", bench.cell_size, "cell side in meters");
  b->add_option("--instances-per-cell", bench.instances_per_cell, "planted groups per cell");
  b->add_option("--noise", bench.noise_per_feature, "CSR instances per feature per cell");
  b->add_option("--d-g", bench.d_g, "planted group diameter");
  b->add_option("--d", bench.d, "neighbor distance");
  b->add_option("--alpha", bench.alpha, "significance level");
  b->add_option("-R,--simulations", bench.simulations, "null simulations");
  b->add_flag("--auto-scale-simulations", bench.auto_scale_simulations, "raise R so alpha/n stays reachable");
  b->add_option("--seed", bench.seed, "master seed");
  b->add_option("--repeats", bench.repeats, "timing repeats (median reported)");
  b->add_option("--min-instances", bench.min_instances, "minimum instances per feature per partition");
  b->add_option("--out", bench.out_dir, "output directory");
  b->add_option("--threads", bench.threads, "worker threads");

  auto* f = app.add_subcommand("fpr", "false positive rates of both miners");
  f->add_option("--trials", fpr.trials, "seeded trials (>= 10)");
  f->add_option("--rows", fpr.rows, "grid rows");
  f->add_option("--cols", fpr.cols, "grid columns");
  f->add_option("--cell-size", fpr.cell_size, "cell side in meters");
  f->add_option("--features", fpr.features, "feature names")->delimiter(',');
  f->add_option("--candidate", fpr.candidates, "candidate, e.g. A,B (repeatable)");
  f->add_option("--noise", fpr.noise_per_feature, "CSR instances per feature per cell");
  f->add_option("--planted", fpr.planted, "planted patterns per trial");
  f->add_option("--planted-size", fpr.planted_size, "partitions per planted region");
  f->add_option("--instances-per-cell", fpr.instances_per_cell, "planted groups per cell");
  f->add_option("--d-g", fpr.d_g, "planted group diameter");
  f->add_option("--d", fpr.d, "neighbor distance");
  f->add_option("--alpha", fpr.alpha, "significance level");
  f->add_option("-R,--simulations", fpr.simulations, "null simulations");
  f->add_option("--seed", fpr.seed, "master seed");
  f->add_option("--min-instances", fpr.min_instances, "minimum instances per feature per partition");
  f->add_option("--out", fpr.out_dir, "output directory");
  f->add_option("--threads", fpr.threads, "worker threads");

  auto* s = app.add_subcommand("synth", "generate a synthetic grid dataset");
  s->add_option("--rows", synth.synth.rows, "grid rows");
  s->add_option("--cols", synth.synth.cols, "grid columns");
  s->add_option("--cell-size", synth.synth.cell_size, "cell side in meters");
  s->add_option("--l-max", synth.synth.l_max, "max partitions per planted region (0 = any)");
  s->add_option("--features", synth.synth.features, "feature names")->delimiter(',');
  s->add_option("--noise", synth.synth.noise_per_feature, "CSR instances per feature per cell");
  s->add_option("--plant", plants, "REGION:FEATURES[:PER_CELL[:D_G]], e.g. 0,1,4:A,B:4:50 (repeatable)");
  s->add_option("--seed", synth.synth.seed, "seed");
  s->add_option("--out", synth.out_dir, "output directory");

  auto* v = app.add_subcommand("validate-nulls", "pair correlation diagnostics of data and nulls");
  add_input_flags(v, vnulls.input);
  v->add_option("--d-max", vnulls.d_max, "largest distance");
  v->add_option("--bins", vnulls.bins, "distance bins");
  v->add_option("-R,--simulations", vnulls.simulations, "null datasets to average");
  v->add_option("--seed", vnulls.seed, "master seed");
  v->add_option("--threshold", vnulls.threshold, "g above which a feature is flagged");
  v->add_option("--out", vnulls.out_dir, "output directory");
  v->add_option("--threads", vnulls.threads, "worker threads");

  for (auto* cmd : {m, b, f, s, v}) cmd->add_option("--config", config_path, "JSON config (flags override it)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("usage", e.what(), 2);
  }

  try {
    if (m->parsed()) {
      if (d_flag->count() > 0) mine.d_lower = mine.d_upper = d_single;
      const auto out = rcm::cmd_mine(mine);
      std::cout << "wrote " << out.patterns["jobs"].size() << " jobs to " << mine.out_dir << '\n';
    } else if (b->parsed()) {
      const auto out = rcm::cmd_benchmark(bench);
      std::cout << out.timing_csv;
    } else if (f->parsed()) {
      const auto out = rcm::cmd_fpr(fpr);
      std::cout << out.csv;
    } else if (s->parsed()) {
      for (const auto& p : plants) synth.synth.planted.push_back(parse_plant(p));
      rcm::cmd_synth(synth);
      std::cout << "wrote dataset to " << synth.out_dir << '\n';
    } else if (v->parsed()) {
      const auto out = rcm::cmd_validate_nulls(vnulls);
      for (const auto& w : out.document["warnings"]) std::cerr << "warning: " << w.get<std::string>() << '\n';
      std::cout << "wrote diagnostics to " << vnulls.out_dir << '\n';
    }
  } catch (const rcm::Error& e) {
    return report_error(rcm::to_string(e.kind()), e.what(), rcm::exit_code_for(e.kind()));
  } catch (const json::exception& e) {
    return report_error("config", e.what(), 2);
  } catch (const std::exception& e) {
    return report_error("internal", e.what(), 1);
  }
  return 0;
}
