#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rcm/colocation.hpp"
#include "rcm/error.hpp"
#include "rcm/parallel.hpp"
#include "rcm/rational.hpp"
#include "rcm/significance.hpp"
#include "rcm/spatial_types.hpp"

namespace rcm {

enum class Method { ssrcm, multcomp };

inline std::string_view to_string(Method m) {
  return m == Method::ssrcm ? "ssrcm" : "multcomp";
}

inline Method parse_method(std::string_view text) {
  if (text == "ssrcm") return Method::ssrcm;
  if (text == "multcomp" || text == "multcomp-rcm") return Method::multcomp;
  fail(ErrorKind::parameter, "unknown method '" + std::string(text) + "' (expected ssrcm or multcomp)");
}

/// Outcome of the Monte Carlo test on one atomic partition. The stored p-value
/// is what MultComp-RCM later compares against its Bonferroni thresholds.
struct AtomicResult {
  PartitionId partition = 0;
  Candidate candidate = Candidate::of({0, 1});
  double d = 0.0;
  Rational pi{0};
  Rational p_value{1};
  std::size_t exceed_count = 0;
  bool significant = false;
};

/// Work done by one mining job. `pi_computations` counts observed-data
/// participation indices (one per test); the R null indices each test needs
/// are tallied separately in `null_pi_computations`.
struct CostCounters {
  std::uint64_t significance_tests = 0;
  std::uint64_t pi_computations = 0;
  std::uint64_t null_pi_computations = 0;
  std::uint64_t threshold_comparisons = 0;
  std::vector<Rational> threshold_history;

  void merge(const CostCounters& other) {
    significance_tests += other.significance_tests;
    pi_computations += other.pi_computations;
    null_pi_computations += other.null_pi_computations;
    threshold_comparisons += other.threshold_comparisons;
    threshold_history.insert(threshold_history.end(), other.threshold_history.begin(),
                             other.threshold_history.end());
  }
};

/// Partitions where the candidate is significant, joined along shared borders.
class SignificanceGraph {
 public:
  SignificanceGraph() = default;
  SignificanceGraph(std::vector<PartitionId> vertices,
                    std::map<PartitionId, std::vector<PartitionId>> adjacency)
      : vertices_(std::move(vertices)), adjacency_(std::move(adjacency)) {}

  const std::vector<PartitionId>& vertices() const { return vertices_; }
  bool empty() const { return vertices_.empty(); }
  bool has_vertex(PartitionId v) const {
    return std::binary_search(vertices_.begin(), vertices_.end(), v);
  }

  const std::vector<PartitionId>& neighbors(PartitionId v) const {
    static const std::vector<PartitionId> none;
    auto it = adjacency_.find(v);
    return it == adjacency_.end() ? none : it->second;
  }

  std::size_t edge_count() const {
    std::size_t twice = 0;
    for (const auto& [v, n] : adjacency_) twice += n.size();
    return twice / 2;
  }

  /// Connected components, largest first; ties by smallest member id.
  std::vector<Region> components() const {
    std::vector<Region> out;
    std::set<PartitionId> seen;
    for (auto v : vertices_) {
      if (seen.count(v)) continue;
      Region comp;
      std::vector<PartitionId> stack{v};
      seen.insert(v);
      while (!stack.empty()) {
        auto u = stack.back();
        stack.pop_back();
        comp.push_back(u);
        for (auto w : neighbors(u)) {
          if (seen.insert(w).second) stack.push_back(w);
        }
      }
      out.push_back(make_region(std::move(comp)));
    }
    std::stable_sort(out.begin(), out.end(), [](const Region& a, const Region& b) {
      if (a.size() != b.size()) return a.size() > b.size();
      return a.front() < b.front();
    });
    return out;
  }

 private:
  std::vector<PartitionId> vertices_;
  std::map<PartitionId, std::vector<PartitionId>> adjacency_;
};

struct RegionalPattern {
  Region region;
  Candidate candidate = Candidate::of({0, 1});
  double d = 0.0;
  std::vector<AtomicResult> per_partition;  // region order
  std::optional<Rational> region_pi;        // SSRCM: pi of the final union
  std::optional<Rational> region_p_value;   // SSRCM: p of the final union
  Method method = Method::multcomp;
  std::size_t n = 0;
  bool largest = false;
  std::vector<std::string> warnings;
};

/// Observed data, partitions (with adjacency) and nulls for one mining run.
class MiningContext {
 public:
  MiningContext(std::span<const FeatureInstance> instances, const PartitionSet& partitions,
                const NullEnsemble& ensemble, Rational alpha, unsigned threads = 1)
      : partitions_(&partitions), ensemble_(&ensemble), alpha_(alpha), threads_(threads) {
    check_alpha(alpha);
    by_partition_.resize(partitions.size());
    for (const auto& inst : instances) {
      if (inst.partition != kOutside && inst.partition < partitions.size()) {
        by_partition_[inst.partition].push_back(inst);
      }
    }
  }

  const PartitionSet& partitions() const { return *partitions_; }
  const NullEnsemble& ensemble() const { return *ensemble_; }
  const Rational& alpha() const { return alpha_; }
  unsigned threads() const { return threads_; }

  std::size_t count(PartitionId g, FeatureId f) const {
    return static_cast<std::size_t>(std::count_if(by_partition_[g].begin(), by_partition_[g].end(),
                                                  [&](const FeatureInstance& i) { return i.feature == f; }));
  }

  /// Observed instances of the candidate's features inside the region.
  std::vector<FeatureInstance> observed(const Region& region, const Candidate& candidate) const {
    std::vector<FeatureInstance> pts;
    for (auto g : region) {
      for (const auto& inst : by_partition_.at(g)) {
        if (candidate.contains(inst.feature)) pts.push_back(inst);
      }
    }
    return pts;
  }

 private:
  const PartitionSet* partitions_;
  const NullEnsemble* ensemble_;
  Rational alpha_;
  unsigned threads_;
  std::vector<std::vector<FeatureInstance>> by_partition_;
};

namespace detail {

struct RegionTest {
  Rational pi;
  SignificanceOutcome outcome;
};

// One Alg.-1 style test of the candidate over a region, with bookkeeping.
inline RegionTest test_region(const MiningContext& ctx, const Candidate& candidate, double d,
                              const Region& region, CostCounters& counters) {
  const auto pts = ctx.observed(region, candidate);
  const Rational pi = compute_pi(pts, candidate, d);
  ++counters.pi_computations;
  auto outcome = significance_test(candidate, region, d, pi, ctx.ensemble(), ctx.alpha(), ctx.threads());
  ++counters.significance_tests;
  counters.null_pi_computations += ctx.ensemble().simulations;
  return {pi, outcome};
}

inline std::map<PartitionId, const AtomicResult*> index_atomic(std::span<const AtomicResult> atomic) {
  std::map<PartitionId, const AtomicResult*> out;
  for (const auto& a : atomic) out[a.partition] = &a;
  return out;
}

inline PartitionId max_pi_vertex(const Region& component,
                                 const std::map<PartitionId, const AtomicResult*>& atomic) {
  PartitionId best = component.front();
  for (auto v : component) {
    if (atomic.at(v)->pi > atomic.at(best)->pi) best = v;  // ascending ids keep the lowest on ties
  }
  return best;
}

enum class Step { accepted, rejected, stop };

// Depth-first traversal from `start` that only expands through accepted
// vertices, so the grown region stays connected. Neighbors in ascending id.
template <typename Attempt>
void grow_dfs(const SignificanceGraph& graph, PartitionId start, Attempt&& attempt) {
  std::set<PartitionId> visited{start};
  struct Frame {
    PartitionId v;
    std::size_t next;
  };
  std::vector<Frame> stack{{start, 0}};
  while (!stack.empty()) {
    auto& top = stack.back();
    const auto& nbrs = graph.neighbors(top.v);
    if (top.next >= nbrs.size()) {
      stack.pop_back();
      continue;
    }
    const PartitionId u = nbrs[top.next++];
    if (!visited.insert(u).second) continue;
    const Step step = attempt(u);
    if (step == Step::stop) return;
    if (step == Step::accepted) stack.push_back({u, 0});
  }
}

inline Region component_of(const SignificanceGraph& graph, PartitionId v) {
  for (auto& comp : graph.components()) {
    if (region_contains(comp, v)) return comp;
  }
  return {};
}

inline RegionalPattern make_pattern(Region region, const Candidate& candidate, double d, Method method,
                                    const std::map<PartitionId, const AtomicResult*>& atomic) {
  RegionalPattern out;
  out.region = make_region(std::move(region));
  out.candidate = candidate;
  out.d = d;
  out.method = method;
  out.n = out.region.size();
  for (auto g : out.region) out.per_partition.push_back(*atomic.at(g));
  return out;
}

}  // namespace detail

/// Runs the atomic test on every partition that has at least `min_instances`
/// instances of each candidate feature; other partitions are skipped without
/// touching the counters.
inline std::vector<AtomicResult> find_atomic_partitions(const MiningContext& ctx,
                                                        const Candidate& candidate, double d,
                                                        std::size_t min_instances,
                                                        CostCounters& counters) {
  std::vector<AtomicResult> out;
  counters.threshold_history.push_back(ctx.alpha());
  for (const auto& part : ctx.partitions().partitions) {
    const bool qualifies = std::all_of(candidate.features().begin(), candidate.features().end(),
                                       [&](FeatureId f) { return ctx.count(part.id, f) >= min_instances; });
    if (!qualifies) continue;
    const auto test = detail::test_region(ctx, candidate, d, Region{part.id}, counters);
    out.push_back(AtomicResult{part.id, candidate, d, test.pi, test.outcome.p_value,
                               test.outcome.exceed_count, test.outcome.significant});
  }
  return out;
}

inline SignificanceGraph build_significance_graph(std::span<const AtomicResult> atomic,
                                                  const PartitionSet& partitions) {
  std::vector<PartitionId> vertices;
  for (const auto& a : atomic) {
    if (a.significant) vertices.push_back(a.partition);
  }
  vertices = make_region(std::move(vertices));
  std::map<PartitionId, std::vector<PartitionId>> adjacency;
  for (auto v : vertices) {
    auto& list = adjacency[v];
    for (auto u : partitions[v].neighbors) {
      if (std::binary_search(vertices.begin(), vertices.end(), u)) list.push_back(u);
    }
  }
  return SignificanceGraph(std::move(vertices), std::move(adjacency));
}

/// SSRCM growth: start from the highest-pi vertex of the component, then
/// re-test the union with every vertex reached by the traversal and keep the
/// union when it is significant. When there is anything to grow into, the
/// starting partition is first re-tested as the initial region; an isolated
/// vertex keeps its atomic result.
inline RegionalPattern grow_region_ssrcm(const MiningContext& ctx, const Candidate& candidate, double d,
                                         const SignificanceGraph& graph,
                                         std::span<const AtomicResult> atomic, CostCounters& counters,
                                         std::optional<Region> component = std::nullopt) {
  if (graph.empty()) fail(ErrorKind::parameter, "cannot grow a region on an empty significance graph");
  const auto by_id = detail::index_atomic(atomic);
  if (!component) {
    PartitionId best = graph.vertices().front();
    for (auto v : graph.vertices()) {
      if (by_id.at(v)->pi > by_id.at(best)->pi) best = v;
    }
    component = detail::component_of(graph, best);
  }
  const PartitionId start = detail::max_pi_vertex(*component, by_id);

  Region current{start};
  std::optional<Rational> region_pi;
  std::optional<Rational> region_p;
  auto attempt = [&](PartitionId v) {
    Region trial = make_region([&] {
      auto r = current;
      r.push_back(v);
      return r;
    }());
    counters.threshold_history.push_back(ctx.alpha());
    const auto test = detail::test_region(ctx, candidate, d, trial, counters);
    if (!test.outcome.significant) return detail::Step::rejected;
    current = std::move(trial);
    region_pi = test.pi;
    region_p = test.outcome.p_value;
    return detail::Step::accepted;
  };
  if (component->size() > 1) {
    attempt(start);
    detail::grow_dfs(graph, start, attempt);
  } else {
    region_pi = by_id.at(start)->pi;
    region_p = by_id.at(start)->p_value;
  }

  auto out = detail::make_pattern(current, candidate, d, Method::ssrcm, by_id);
  out.region_pi = region_pi;
  out.region_p_value = region_p;
  return out;
}

/// MultComp-RCM growth: same traversal as SSRCM, but a union of n + 1
/// partitions is accepted when every member's stored atomic p-value is at most
/// alpha / (n + 1). No new tests or participation indices are computed.
/// Growth stops with a warning once the threshold falls below 1 / (R + 1),
/// the smallest p-value R simulations can produce.
inline RegionalPattern grow_region_multcomp(const Candidate& candidate, double d,
                                            const SignificanceGraph& graph,
                                            std::span<const AtomicResult> atomic,
                                            const Rational& alpha, std::size_t simulations,
                                            CostCounters& counters,
                                            std::optional<Region> component = std::nullopt) {
  if (graph.empty()) fail(ErrorKind::parameter, "cannot grow a region on an empty significance graph");
  check_alpha(alpha);
  const auto by_id = detail::index_atomic(atomic);
  if (!component) {
    PartitionId best = graph.vertices().front();
    for (auto v : graph.vertices()) {
      if (by_id.at(v)->pi > by_id.at(best)->pi) best = v;
    }
    component = detail::component_of(graph, best);
  }
  const PartitionId start = detail::max_pi_vertex(*component, by_id);
  const Rational min_p(1, static_cast<std::int64_t>(simulations) + 1);

  // A single partition is held to alpha itself; only checked when growth follows.
  if (component->size() > 1) {
    counters.threshold_history.push_back(alpha);
    ++counters.threshold_comparisons;
  }

  Region current{start};
  std::vector<std::string> warnings;
  auto attempt = [&](PartitionId v) {
    const Rational threshold = alpha / static_cast<std::int64_t>(current.size() + 1);
    if (threshold < min_p) {
      warnings.push_back("p-value granularity exhausted: threshold " + to_string(threshold) +
                         " is below 1/(R+1) = " + to_string(min_p) + "; growth stopped at " +
                         std::to_string(current.size()) + " partitions");
      return detail::Step::stop;
    }
    counters.threshold_history.push_back(threshold);
    Region trial = current;
    trial.push_back(v);
    trial = make_region(std::move(trial));
    bool pass = true;
    for (auto g : trial) {
      ++counters.threshold_comparisons;
      if (by_id.at(g)->p_value > threshold) pass = false;
    }
    if (!pass) return detail::Step::rejected;
    current = std::move(trial);
    return detail::Step::accepted;
  };
  detail::grow_dfs(graph, start, attempt);

  auto out = detail::make_pattern(current, candidate, d, Method::multcomp, by_id);
  out.warnings = std::move(warnings);
  return out;
}

/// Distances LB, LB + step, ..., up to UB inclusive.
inline std::vector<double> distance_values(double lower, double upper, double step) {
  if (!(lower > 0.0) || !(upper >= lower) || !(step > 0.0)) {
    fail(ErrorKind::parameter, "distance range needs 0 < LB <= UB and step > 0");
  }
  const auto count = static_cast<std::size_t>(std::floor((upper - lower) / step + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(lower + static_cast<double>(k) * step);
  return out;
}

struct MineConfig {
  Rational alpha{1, 20};
  std::size_t simulations = 99;
  std::uint64_t seed = 0;
  std::size_t min_instances = 3;
  Method method = Method::multcomp;
  double d_lower = 100.0;
  double d_upper = 100.0;
  double d_step = 10.0;
  bool auto_scale_simulations = false;
  double pcf_threshold = 1.5;
  unsigned threads = 1;
  std::vector<std::string> feature_names;  // optional, for readable warnings
};

struct MiningJob {
  Candidate candidate = Candidate::of({0, 1});
  double d = 0.0;
  Method method = Method::multcomp;
  CostCounters counters;
  std::vector<AtomicResult> atomic;
  std::vector<RegionalPattern> patterns;  // largest first
};

struct MineReport {
  std::size_t simulations = 0;
  std::vector<MiningJob> jobs;
  std::vector<std::string> warnings;

  CostCounters total_counters() const {
    CostCounters total;
    for (const auto& j : jobs) total.merge(j.counters);
    return total;
  }
  std::vector<const RegionalPattern*> patterns() const {
    std::vector<const RegionalPattern*> out;
    for (const auto& j : jobs) {
      for (const auto& p : j.patterns) out.push_back(&p);
    }
    return out;
  }
};

/// R after the granularity rule: with auto-scaling, large enough that
/// alpha / n_max >= 1 / (R + 1) for a region spanning every partition.
inline std::size_t effective_simulations(const MineConfig& config, std::size_t partition_count) {
  check_alpha(config.alpha);
  std::size_t r = config.simulations;
  if (config.auto_scale_simulations && partition_count > 0) {
    const auto needed = ceil(Rational(static_cast<std::int64_t>(partition_count)) / config.alpha) - 1;
    r = std::max<std::size_t>(r, static_cast<std::size_t>(needed));
  }
  if (Rational(1, static_cast<std::int64_t>(r) + 1) > config.alpha) {
    fail(ErrorKind::config, "R = " + std::to_string(r) + " simulations cannot reach p <= alpha = " +
                                to_string(config.alpha) + "; need R >= " +
                                std::to_string(ceil(Rational(1) / config.alpha) - 1));
  }
  return r;
}

/// Grows one region per connected component of the significance graph.
inline std::vector<RegionalPattern> grow_all(const MiningContext& ctx, const Candidate& candidate,
                                             double d, Method method, const SignificanceGraph& graph,
                                             std::span<const AtomicResult> atomic,
                                             CostCounters& counters) {
  std::vector<RegionalPattern> out;
  for (auto& comp : graph.components()) {
    out.push_back(method == Method::ssrcm
                      ? grow_region_ssrcm(ctx, candidate, d, graph, atomic, counters, comp)
                      : grow_region_multcomp(candidate, d, graph, atomic, ctx.alpha(),
                                             ctx.ensemble().simulations, counters, comp));
  }
  std::stable_sort(out.begin(), out.end(), [](const RegionalPattern& a, const RegionalPattern& b) {
    if (a.n != b.n) return a.n > b.n;
    return a.region.front() < b.region.front();
  });
  if (!out.empty()) out.front().largest = true;
  return out;
}

/// Mines with a prepared ensemble, which must simulate every candidate feature.
inline MineReport mine_with(std::span<const FeatureInstance> instances, const PartitionSet& partitions,
                            const std::vector<Candidate>& candidates, const MineConfig& config,
                            const NullEnsemble& ensemble) {
  const auto distances = distance_values(config.d_lower, config.d_upper, config.d_step);
  MiningContext ctx(instances, partitions, ensemble, config.alpha, 1);

  MineReport report;
  report.simulations = ensemble.simulations;
  for (const auto& c : candidates) {
    for (double d : distances) report.jobs.push_back(MiningJob{c, d, config.method, {}, {}, {}});
  }
  parallel_for(report.jobs.size(), config.threads, [&](std::size_t k) {
    auto& job = report.jobs[k];
    job.atomic = find_atomic_partitions(ctx, job.candidate, job.d, config.min_instances, job.counters);
    const auto graph = build_significance_graph(job.atomic, partitions);
    job.patterns = grow_all(ctx, job.candidate, job.d, job.method, graph, job.atomic, job.counters);
  });

  // Clustering diagnostic on the observed features; warns, never blocks.
  const double window = partitions.total_area();
  std::set<std::string> warnings;
  std::set<FeatureId> features;
  for (const auto& c : candidates) features.insert(c.features().begin(), c.features().end());
  for (auto f : features) {
    std::vector<Point> pts;
    for (const auto& inst : instances) {
      if (inst.feature == f && inst.partition != kOutside) pts.push_back(inst.location);
    }
    if (pts.size() < 2 || !(window > 0.0)) continue;
    for (double d : distances) {
      const double g = pcf_up_to(pts, d, window);
      if (g > config.pcf_threshold) {
        const std::string name =
            f < config.feature_names.size() ? config.feature_names[f] : "#" + std::to_string(f);
        warnings.insert("feature " + name + " is clustered at d=" + std::to_string(d) +
                        " (g=" + std::to_string(g) + ")");
      }
    }
  }
  report.warnings.assign(warnings.begin(), warnings.end());
  for (const auto& job : report.jobs) {
    for (const auto& p : job.patterns) {
      for (const auto& w : p.warnings) report.warnings.push_back(w);
    }
  }
  return report;
}

/// Full pipeline: nulls for the candidate features, then per (candidate, d)
/// atomic tests, significance graph and region growth.
inline MineReport mine(std::span<const FeatureInstance> instances, const PartitionSet& partitions,
                       const std::vector<Candidate>& candidates, const MineConfig& config) {
  const std::size_t r = effective_simulations(config, partitions.size());
  distance_values(config.d_lower, config.d_upper, config.d_step);
  NullOptions options;
  for (const auto& c : candidates) options.features.insert(options.features.end(), c.features().begin(), c.features().end());
  options.threads = config.threads;
  const auto ensemble = generate_nulls(instances, partitions, r, config.seed, options);
  return mine_with(instances, partitions, candidates, config, ensemble);
}

/// Every pair (and triple, if max_size is 3) of features that reach
/// `min_instances` in at least one partition.
inline std::vector<Candidate> all_candidates(std::span<const FeatureInstance> instances,
                                             const PartitionSet& partitions, std::size_t feature_count,
                                             std::size_t min_instances, std::size_t max_size) {
  const auto counts = count_by_partition({instances.begin(), instances.end()}, partitions.size(), feature_count);
  std::vector<FeatureId> eligible;
  for (FeatureId f = 0; f < feature_count; ++f) {
    for (const auto& row : counts) {
      if (row[f] >= std::max<std::size_t>(min_instances, 1)) {
        eligible.push_back(f);
        break;
      }
    }
  }
  std::vector<Candidate> out;
  for (std::size_t i = 0; i < eligible.size(); ++i) {
    for (std::size_t j = i + 1; j < eligible.size(); ++j) {
      out.push_back(Candidate::of({eligible[i], eligible[j]}));
      if (max_size < 3) continue;
      for (std::size_t k = j + 1; k < eligible.size(); ++k) {
        out.push_back(Candidate::of({eligible[i], eligible[j], eligible[k]}));
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace rcm
