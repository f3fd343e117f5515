#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rcm/colocation.hpp"
#include "rcm/error.hpp"
#include "rcm/grid_index.hpp"
#include "rcm/parallel.hpp"
#include "rcm/random.hpp"
#include "rcm/rational.hpp"
#include "rcm/spatial_types.hpp"

namespace rcm {

/// R simulated CSR datasets per partition. Simulation i of partition g holds,
/// for every simulated feature, exactly as many points as were observed in g,
/// placed uniformly inside g's polygon.
struct NullEnsemble {
  std::size_t simulations = 0;
  std::uint64_t seed = 0;
  std::vector<FeatureId> features;  // sorted
  std::vector<char> covered;        // per partition
  std::vector<std::vector<std::vector<FeatureInstance>>> per_partition;  // [g][i]

  bool covers(PartitionId g) const { return g < covered.size() && covered[g]; }
  bool simulates(FeatureId f) const { return std::binary_search(features.begin(), features.end(), f); }

  std::span<const FeatureInstance> simulation(PartitionId g, std::size_t i) const {
    return per_partition.at(g).at(i);
  }
};

struct NullOptions {
  /// Features to simulate; empty means every feature present in the data.
  std::vector<FeatureId> features;
  /// Partitions to simulate; empty means all.
  std::vector<PartitionId> partitions;
  unsigned threads = 1;
};

/// Count-conditioned homogeneous Poisson nulls. The points of (partition,
/// feature, simulation) come from their own RNG stream derived from `seed`, so
/// the ensemble does not depend on thread count or on which other features
/// and partitions are requested.
inline NullEnsemble generate_nulls(std::span<const FeatureInstance> instances,
                                   const PartitionSet& partitions, std::size_t simulations,
                                   std::uint64_t seed, const NullOptions& options = {}) {
  if (simulations < 1) fail(ErrorKind::parameter, "number of simulations R must be >= 1");

  std::vector<FeatureId> features = options.features;
  if (features.empty()) {
    for (const auto& inst : instances) features.push_back(inst.feature);
  }
  std::sort(features.begin(), features.end());
  features.erase(std::unique(features.begin(), features.end()), features.end());
  const std::size_t feature_space = features.empty() ? 0 : features.back() + 1;

  NullEnsemble ens;
  ens.simulations = simulations;
  ens.seed = seed;
  ens.features = features;
  ens.covered.assign(partitions.size(), options.partitions.empty() ? 1 : 0);
  for (auto g : options.partitions) {
    if (g >= partitions.size()) fail(ErrorKind::parameter, "unknown partition id " + std::to_string(g));
    ens.covered[g] = 1;
  }
  ens.per_partition.resize(partitions.size());

  std::vector<FeatureInstance> in_study;
  for (const auto& inst : instances) {
    if (inst.partition != kOutside) in_study.push_back(inst);
  }
  const CountTable counts = count_by_partition(in_study, partitions.size(), feature_space);

  parallel_for(partitions.size(), options.threads, [&](std::size_t gi) {
    const auto g = static_cast<PartitionId>(gi);
    if (!ens.covered[g]) return;
    const Partition& part = partitions[g];
    std::size_t total = 0;
    for (auto f : features) total += counts[g][f];
    if (total > 0 && !(part.area > 0.0)) {
      fail(ErrorKind::generation,
           "partition '" + part.label + "' has zero area but " + std::to_string(total) + " instances");
    }
    auto& sims = ens.per_partition[g];
    sims.assign(simulations, {});
    for (std::size_t i = 0; i < simulations; ++i) {
      sims[i].reserve(total);
      for (auto f : features) {
        const std::size_t n = counts[g][f];
        if (n == 0) continue;
        Rng rng(derive_seed(seed, {g, f, i}));
        for (std::size_t k = 0; k < n; ++k) {
          sims[i].push_back(FeatureInstance{f, sample_in(rng, part.boundary, part.box), g});
        }
      }
    }
  });
  return ens;
}

/// One bin of a binned pair correlation estimate.
struct PcfBin {
  double r_lo = 0.0;
  double r_hi = 0.0;
  double distance = 0.0;  // bin midpoint
  std::size_t pairs = 0;
  double g = 0.0;
};

/// Binned pair correlation function over (0, d_max] without edge correction:
/// observed pairs per annulus over the count expected under CSR with the same
/// number of points in a window of `window_area`.
inline std::vector<PcfBin> pair_correlation(std::span<const Point> points, double d_max,
                                            std::size_t n_bins, double window_area) {
  if (points.size() < 2) fail(ErrorKind::insufficient_data, "pair correlation needs at least 2 points");
  if (!(d_max > 0.0) || n_bins == 0 || !(window_area > 0.0)) {
    fail(ErrorKind::parameter, "pair correlation needs d_max > 0, n_bins > 0 and a positive window area");
  }
  const double width = d_max / static_cast<double>(n_bins);
  std::vector<PcfBin> bins(n_bins);
  for (std::size_t b = 0; b < n_bins; ++b) {
    bins[b].r_lo = width * static_cast<double>(b);
    bins[b].r_hi = b + 1 == n_bins ? d_max : width * static_cast<double>(b + 1);
    bins[b].distance = 0.5 * (bins[b].r_lo + bins[b].r_hi);
  }
  GridIndex index(points, d_max);
  index.for_each_pair_within(d_max, [&](std::uint32_t i, std::uint32_t j) {
    const double r = distance(points[i], points[j]);
    auto b = static_cast<std::size_t>(r / width);
    ++bins[std::min(b, n_bins - 1)].pairs;
  });
  const double n = static_cast<double>(points.size());
  const double pair_total = n * (n - 1.0) / 2.0;
  constexpr double pi = 3.14159265358979323846;
  for (auto& bin : bins) {
    const double annulus = pi * (bin.r_hi * bin.r_hi - bin.r_lo * bin.r_lo);
    bin.g = static_cast<double>(bin.pairs) / (pair_total * annulus / window_area);
  }
  return bins;
}

/// g averaged over (0, d]: the single-bin estimate used as a clustering gate.
inline double pcf_up_to(std::span<const Point> points, double d, double window_area) {
  return pair_correlation(points, d, 1, window_area).front().g;
}

struct SignificanceOutcome {
  bool significant = false;
  Rational p_value{1};
  std::size_t exceed_count = 0;
  std::size_t simulations = 0;
  Rational pi_obs{0};
};

/// (exceed + 1) / (R + 1).
inline Rational monte_carlo_p_value(std::size_t exceed_count, std::size_t simulations) {
  if (simulations < 1) fail(ErrorKind::parameter, "R must be >= 1");
  if (exceed_count > simulations) fail(ErrorKind::parameter, "exceed count cannot exceed R");
  return Rational(static_cast<std::int64_t>(exceed_count) + 1,
                  static_cast<std::int64_t>(simulations) + 1);
}

inline void check_alpha(const Rational& alpha) {
  if (!(alpha > Rational(0) && alpha < Rational(1))) {
    fail(ErrorKind::parameter, "alpha must lie in (0, 1), got " + to_string(alpha));
  }
}

inline SignificanceOutcome make_outcome(std::size_t exceed_count, std::size_t simulations,
                                        const Rational& pi_obs, const Rational& alpha) {
  check_alpha(alpha);
  SignificanceOutcome out;
  out.exceed_count = exceed_count;
  out.simulations = simulations;
  out.pi_obs = pi_obs;
  out.p_value = monte_carlo_p_value(exceed_count, simulations);
  out.significant = out.p_value <= alpha;
  return out;
}

/// Points of simulation i over a region: the i-th simulation of every member
/// partition, restricted to the candidate's features.
inline std::vector<FeatureInstance> null_region_points(const NullEnsemble& ensemble,
                                                       const Region& region,
                                                       const Candidate& candidate, std::size_t i) {
  std::vector<FeatureInstance> pts;
  for (auto g : region) {
    for (const auto& p : ensemble.simulation(g, i)) {
      if (candidate.contains(p.feature)) pts.push_back(p);
    }
  }
  return pts;
}

/// Monte Carlo test of pi_obs against the ensemble's null participation
/// indices over `region`; ties count as exceedances.
inline SignificanceOutcome significance_test(const Candidate& candidate, const Region& region,
                                             double d, const Rational& pi_obs,
                                             const NullEnsemble& ensemble, const Rational& alpha,
                                             unsigned threads = 1) {
  check_alpha(alpha);
  if (region.empty()) fail(ErrorKind::parameter, "significance test over an empty region");
  for (auto g : region) {
    if (!ensemble.covers(g)) {
      fail(ErrorKind::coverage, "null ensemble does not cover partition " + std::to_string(g));
    }
  }
  for (auto f : candidate.features()) {
    if (!ensemble.simulates(f)) {
      fail(ErrorKind::coverage, "null ensemble does not simulate feature " + std::to_string(f));
    }
  }
  std::vector<char> exceeds(ensemble.simulations, 0);
  parallel_for(ensemble.simulations, threads, [&](std::size_t i) {
    const auto pts = null_region_points(ensemble, region, candidate, i);
    exceeds[i] = compute_pi(pts, candidate, d) >= pi_obs;
  });
  const auto exceed_count =
      static_cast<std::size_t>(std::count(exceeds.begin(), exceeds.end(), 1));
  return make_outcome(exceed_count, ensemble.simulations, pi_obs, alpha);
}

}  // namespace rcm
