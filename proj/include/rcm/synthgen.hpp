#pragma once

#include "json.hpp"

#include <algorithm>
#include <cstdint>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "rcm/colocation.hpp"
#include "rcm/error.hpp"
#include "rcm/miners.hpp"
#include "rcm/random.hpp"
#include "rcm/rational.hpp"
#include "rcm/spatial_core.hpp"
#include "rcm/spatial_types.hpp"

namespace rcm {

/// A regional colocation to plant: `instances_per_cell` colocated groups of
/// `features` in every partition of `region`, each group inside a circle of
/// diameter `d_g`.
struct PlantedSpec {
  Region region;
  std::vector<std::string> features;
  std::size_t instances_per_cell = 4;
  double d_g = 50.0;
};

struct SynthConfig {
  std::size_t rows = 3;
  std::size_t cols = 3;
  double cell_size = 1000.0;  // meters
  std::size_t l_max = 0;      // max partitions per planted region; 0 = unbounded
  std::vector<std::string> features{"A", "B", "C"};
  std::vector<PlantedSpec> planted;
  std::size_t noise_per_feature = 0;  // CSR instances per feature per partition
  std::uint64_t seed = 0;
};

struct PlantedPattern {
  Region region;
  std::vector<std::string> features;  // sorted
};

struct GroundTruth {
  std::size_t partition_count = 0;
  std::vector<PlantedPattern> planted;
};

struct SyntheticDataset {
  FeatureRegistry features;
  std::vector<FeatureInstance> instances;
  PartitionSet partitions;  // adjacency filled
  GroundTruth truth;
};

/// Row-major grid of square cells; partition id = row * cols + col.
inline PartitionSet make_grid(std::size_t rows, std::size_t cols, double cell_size) {
  PartitionSet set;
  set.crs_note = "synthetic planar grid, meters";
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const auto id = static_cast<PartitionId>(r * cols + c);
      set.partitions.push_back(make_rectangle(id, std::to_string(id), c * cell_size, r * cell_size,
                                              (c + 1) * cell_size, (r + 1) * cell_size));
    }
  }
  return derive_adjacency(std::move(set), std::min(1.0, cell_size * 1e-3));
}

inline bool grid_connected(const Region& region, std::size_t cols) {
  if (region.empty()) return false;
  std::set<PartitionId> seen{region.front()};
  std::queue<PartitionId> todo;
  todo.push(region.front());
  while (!todo.empty()) {
    const auto v = todo.front();
    todo.pop();
    const std::size_t r = v / cols, c = v % cols;
    std::vector<PartitionId> next;
    if (c > 0) next.push_back(v - 1);
    if (c + 1 < cols) next.push_back(v + 1);
    if (r > 0) next.push_back(static_cast<PartitionId>(v - cols));
    next.push_back(static_cast<PartitionId>(v + cols));
    for (auto u : next) {
      if (region_contains(region, u) && seen.insert(u).second) todo.push(u);
    }
  }
  return seen.size() == region.size();
}

inline void validate(const SynthConfig& config) {
  auto bad = [](const std::string& what) { fail(ErrorKind::config, "synthetic config: " + what); };
  if (config.rows == 0 || config.cols == 0) bad("grid must have at least one cell");
  if (!(config.cell_size > 0.0)) bad("cell_size must be positive");
  if (config.features.empty()) bad("no features");
  const std::size_t cells = config.rows * config.cols;
  for (std::size_t k = 0; k < config.planted.size(); ++k) {
    const auto& p = config.planted[k];
    const std::string tag = "planted pattern #" + std::to_string(k);
    if (p.region.empty()) bad(tag + " has an empty region");
    for (auto g : p.region) {
      if (g >= cells) bad(tag + " references partition " + std::to_string(g) + " outside the grid");
    }
    if (!grid_connected(make_region(p.region), config.cols)) bad(tag + " region is not connected");
    if (config.l_max > 0 && make_region(p.region).size() > config.l_max) {
      bad(tag + " spans more than l_max partitions");
    }
    if (p.features.size() < 2 || p.features.size() > 3) bad(tag + " needs 2 or 3 features");
    for (const auto& f : p.features) {
      if (std::find(config.features.begin(), config.features.end(), f) == config.features.end()) {
        bad(tag + " uses unknown feature '" + f + "'");
      }
    }
    if (p.instances_per_cell < 1) bad(tag + " needs instances_per_cell >= 1");
    if (!(p.d_g > 0.0) || !(p.d_g < config.cell_size)) bad(tag + " needs 0 < d_g < cell_size");
  }
}

/// Builds a dataset: CSR noise in every cell, then for each planted pattern
/// `instances_per_cell` reference points per region cell (uniform, count
/// fixed) with one instance of every pattern feature dropped uniformly in the
/// circle of diameter d_g around each reference point. Circles are kept fully
/// inside their cell.
inline SyntheticDataset generate(const SynthConfig& config) {
  validate(config);
  SyntheticDataset out;
  out.features = FeatureRegistry(config.features);
  out.partitions = make_grid(config.rows, config.cols, config.cell_size);
  out.truth.partition_count = out.partitions.size();

  Rng rng(derive_seed(config.seed, {0x5E7}));
  for (const auto& part : out.partitions.partitions) {
    for (const auto& name : out.features.names()) {
      const FeatureId f = out.features.id(name);
      for (std::size_t k = 0; k < config.noise_per_feature; ++k) {
        out.instances.push_back({f, sample_in(rng, part.boundary, part.box), part.id});
      }
    }
  }

  for (const auto& spec : config.planted) {
    const Region region = make_region(spec.region);
    std::vector<std::string> names = spec.features;
    std::sort(names.begin(), names.end());
    const double radius = 0.5 * spec.d_g * (1.0 - 1e-9);
    for (auto g : region) {
      const Partition& part = out.partitions[g];
      for (std::size_t k = 0; k < spec.instances_per_cell; ++k) {
        Point center;
        do {
          center = sample_in(rng, part.boundary, part.box);
        } while (boundary_distance(part.boundary, center) < 0.5 * spec.d_g);
        for (const auto& name : names) {
          out.instances.push_back({out.features.id(name), sample_in_disc(rng, center, radius), g});
        }
      }
    }
    out.truth.planted.push_back({region, names});
  }
  return out;
}

/// Random connected set of `size` grid cells grown from a random seed cell.
inline Region random_connected_region(std::size_t rows, std::size_t cols, std::size_t size, Rng& rng) {
  const std::size_t cells = rows * cols;
  size = std::min(size, cells);
  std::uniform_int_distribution<std::size_t> pick_cell(0, cells - 1);
  std::set<PartitionId> region{static_cast<PartitionId>(pick_cell(rng))};
  while (region.size() < size) {
    std::vector<PartitionId> frontier;
    for (auto v : region) {
      const std::size_t r = v / cols, c = v % cols;
      if (c > 0) frontier.push_back(v - 1);
      if (c + 1 < cols) frontier.push_back(v + 1);
      if (r > 0) frontier.push_back(static_cast<PartitionId>(v - cols));
      if (r + 1 < rows) frontier.push_back(static_cast<PartitionId>(v + cols));
    }
    std::erase_if(frontier, [&](PartitionId u) { return region.count(u) > 0; });
    std::sort(frontier.begin(), frontier.end());
    frontier.erase(std::unique(frontier.begin(), frontier.end()), frontier.end());
    if (frontier.empty()) break;
    std::uniform_int_distribution<std::size_t> pick(0, frontier.size() - 1);
    region.insert(frontier[pick(rng)]);
  }
  return Region(region.begin(), region.end());
}

struct FprScore {
  std::size_t false_positives = 0;
  std::size_t true_negatives = 0;

  /// FP / (FP + TN); zero when there are no negatives at all.
  Rational rate() const {
    const auto den = false_positives + true_negatives;
    if (den == 0) return Rational(0);
    return Rational(static_cast<std::int64_t>(false_positives), static_cast<std::int64_t>(den));
  }

  FprScore& operator+=(const FprScore& o) {
    false_positives += o.false_positives;
    true_negatives += o.true_negatives;
    return *this;
  }
};

/// Scores mined regions for one candidate. The unit is an (atomic partition,
/// candidate) pair: reported means inside some emitted region of that
/// candidate, positive means inside a planted region of that candidate.
inline FprScore score_fpr(const std::vector<RegionalPattern>& mined, const GroundTruth& truth,
                          const FeatureRegistry& features, const Candidate& candidate) {
  std::set<PartitionId> reported;
  for (const auto& p : mined) {
    if (p.candidate == candidate) reported.insert(p.region.begin(), p.region.end());
  }
  std::set<PartitionId> planted;
  for (const auto& t : truth.planted) {
    if (make_candidate(features, t.features) == candidate) planted.insert(t.region.begin(), t.region.end());
  }
  FprScore score;
  for (PartitionId g = 0; g < truth.partition_count; ++g) {
    if (planted.count(g)) continue;
    if (reported.count(g)) {
      ++score.false_positives;
    } else {
      ++score.true_negatives;
    }
  }
  return score;
}

/// Pooled score over every candidate that was either mined or planted.
inline FprScore score_fpr(const std::vector<RegionalPattern>& mined, const GroundTruth& truth,
                          const FeatureRegistry& features) {
  std::set<Candidate> candidates;
  for (const auto& p : mined) candidates.insert(p.candidate);
  for (const auto& t : truth.planted) candidates.insert(make_candidate(features, t.features));
  FprScore total;
  for (const auto& c : candidates) total += score_fpr(mined, truth, features, c);
  return total;
}

// JSON forms used by the `synth` subcommand.

inline void to_json(nlohmann::json& j, const PlantedSpec& p) {
  j = nlohmann::json{{"region", p.region},
                     {"features", p.features},
                     {"instances_per_cell", p.instances_per_cell},
                     {"d_g", p.d_g}};
}

inline void from_json(const nlohmann::json& j, PlantedSpec& p) {
  p.region = make_region(j.at("region").get<std::vector<PartitionId>>());
  p.features = j.at("features").get<std::vector<std::string>>();
  p.instances_per_cell = j.value("instances_per_cell", p.instances_per_cell);
  p.d_g = j.value("d_g", p.d_g);
}

inline void to_json(nlohmann::json& j, const SynthConfig& c) {
  j = nlohmann::json{{"rows", c.rows},
                     {"cols", c.cols},
                     {"cell_size", c.cell_size},
                     {"l_max", c.l_max},
                     {"features", c.features},
                     {"planted", c.planted},
                     {"noise_per_feature", c.noise_per_feature},
                     {"seed", c.seed}};
}

inline void from_json(const nlohmann::json& j, SynthConfig& c) {
  c.rows = j.value("rows", c.rows);
  c.cols = j.value("cols", c.cols);
  c.cell_size = j.value("cell_size", c.cell_size);
  c.l_max = j.value("l_max", c.l_max);
  c.features = j.value("features", c.features);
  c.planted = j.value("planted", c.planted);
  c.noise_per_feature = j.value("noise_per_feature", c.noise_per_feature);
  c.seed = j.value("seed", c.seed);
}

inline void to_json(nlohmann::json& j, const GroundTruth& t) {
  nlohmann::json planted = nlohmann::json::array();
  for (const auto& p : t.planted) planted.push_back({{"region", p.region}, {"features", p.features}});
  j = nlohmann::json{{"partition_count", t.partition_count}, {"planted", planted}};
}

inline void from_json(const nlohmann::json& j, GroundTruth& t) {
  t.partition_count = j.at("partition_count").get<std::size_t>();
  t.planted.clear();
  for (const auto& p : j.at("planted")) {
    auto features = p.at("features").get<std::vector<std::string>>();
    std::sort(features.begin(), features.end());
    t.planted.push_back({make_region(p.at("region").get<std::vector<PartitionId>>()), features});
  }
}

}  // namespace rcm
