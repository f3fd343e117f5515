#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace rcm;
using namespace rcm::testing;

namespace {

AtomicResult atomic(PartitionId g, Rational pi, Rational p, bool significant = true) {
  AtomicResult a;
  a.partition = g;
  a.pi = pi;
  a.p_value = p;
  a.significant = significant;
  return a;
}

std::vector<Rational> table2_thresholds() {
  return {Rational(1, 20), Rational(1, 20), Rational(1, 40), Rational(1, 60), Rational(1, 80)};
}

struct TraceRun {
  SyntheticDataset data;
  MineReport ssrcm;
  MineReport multcomp;
};

TraceRun run_trace() {
  TraceRun t;
  t.data = generate(trace_config());
  MineConfig mc;
  mc.d_lower = mc.d_upper = 40.0;
  mc.seed = 5;
  const auto cand = make_candidate(t.data.features, {"A", "B"});
  const auto ens = generate_nulls(t.data.instances, t.data.partitions, 99, mc.seed);
  mc.method = Method::ssrcm;
  t.ssrcm = mine_with(t.data.instances, t.data.partitions, {cand}, mc, ens);
  mc.method = Method::multcomp;
  t.multcomp = mine_with(t.data.instances, t.data.partitions, {cand}, mc, ens);
  return t;
}

}  // namespace

TEST(Methods, ParseAndPrint) {
  EXPECT_EQ(parse_method("ssrcm"), Method::ssrcm);
  EXPECT_EQ(parse_method("multcomp"), Method::multcomp);
  EXPECT_EQ(to_string(Method::multcomp), "multcomp");
  EXPECT_THROW(parse_method("holdout"), Error);
}

TEST(Distances, InclusiveRange) {
  EXPECT_EQ(distance_values(400, 400, 10), std::vector<double>{400});
  const auto ds = distance_values(200, 400, 10);
  EXPECT_EQ(ds.size(), 21u);
  EXPECT_DOUBLE_EQ(ds.back(), 400.0);
  EXPECT_THROW(distance_values(0, 10, 10), Error);
  EXPECT_THROW(distance_values(20, 10, 10), Error);
}

TEST(AtomicPartitions, SkipsPartitionsBelowMinInstances) {
  PartitionSet set = make_grid(1, 2, 100.0);
  std::vector<FeatureInstance> pts{{0, {10, 10}, 0}, {0, {20, 20}, 0}, {1, {11, 10}, 0}, {1, {21, 20}, 0},
                                   {1, {31, 30}, 0}, {0, {110, 10}, 1}, {0, {120, 20}, 1}, {0, {130, 30}, 1},
                                   {1, {111, 10}, 1}, {1, {121, 20}, 1}, {1, {131, 30}, 1}};
  const auto ens = generate_nulls(pts, set, 19, 1);
  MiningContext ctx(pts, set, ens, Rational(1, 20));
  CostCounters counters;
  const auto res = find_atomic_partitions(ctx, Candidate::of({0, 1}), 5.0, 3, counters);
  ASSERT_EQ(res.size(), 1u);
  EXPECT_EQ(res[0].partition, 1u);
  EXPECT_EQ(counters.significance_tests, 1u);
  EXPECT_EQ(counters.pi_computations, 1u);
  EXPECT_EQ(counters.null_pi_computations, 19u);
}

TEST(AtomicPartitions, ZeroPiHasPValueOne) {
  PartitionSet set = make_grid(1, 1, 100.0);
  std::vector<FeatureInstance> pts{{0, {10, 10}, 0}, {0, {90, 90}, 0}, {0, {10, 90}, 0},
                                   {1, {90, 10}, 0}, {1, {50, 50}, 0}, {1, {30, 50}, 0}};
  const auto ens = generate_nulls(pts, set, 99, 3);
  MiningContext ctx(pts, set, ens, Rational(1, 20));
  CostCounters counters;
  const auto res = find_atomic_partitions(ctx, Candidate::of({0, 1}), 1.0, 3, counters);
  ASSERT_EQ(res.size(), 1u);
  EXPECT_EQ(res[0].pi, Rational(0));
  EXPECT_EQ(res[0].exceed_count, 99u);
  EXPECT_EQ(res[0].p_value, Rational(1));
  EXPECT_FALSE(res[0].significant);
}

TEST(SignificanceGraphTest, EmptyIsolatedAndGrid) {
  const auto grid = make_grid(3, 3, 1.0);
  std::vector<AtomicResult> none{atomic(0, Rational(1, 2), Rational(1, 2), false)};
  EXPECT_TRUE(build_significance_graph(none, grid).empty());

  std::vector<AtomicResult> two{atomic(0, Rational(1), Rational(1, 100)), atomic(8, Rational(1), Rational(1, 100))};
  const auto g2 = build_significance_graph(two, grid);
  EXPECT_EQ(g2.vertices().size(), 2u);
  EXPECT_EQ(g2.edge_count(), 0u);
  EXPECT_EQ(g2.components().size(), 2u);

  std::vector<AtomicResult> all;
  for (PartitionId g = 0; g < 9; ++g) all.push_back(atomic(g, Rational(1), Rational(1, 100)));
  const auto g9 = build_significance_graph(all, grid);
  EXPECT_EQ(g9.edge_count(), 12u);
  EXPECT_EQ(g9.components().size(), 1u);
}

TEST(SignificanceGraphTest, ComponentsLargestFirst) {
  const auto grid = make_grid(1, 6, 1.0);
  std::vector<AtomicResult> res;
  for (PartitionId g : {0u, 2u, 3u, 5u}) res.push_back(atomic(g, Rational(1), Rational(1, 100)));
  const auto comps = build_significance_graph(res, grid).components();
  ASSERT_EQ(comps.size(), 3u);
  EXPECT_EQ(comps[0], (Region{2, 3}));
  EXPECT_EQ(comps[1], (Region{0}));
  EXPECT_EQ(comps[2], (Region{5}));
}

TEST(MultComp, BonferroniRejectsThirdVertex) {
  const auto path = make_grid(1, 3, 1.0);
  std::vector<AtomicResult> res{atomic(0, Rational(9, 10), Rational(2, 100)), atomic(1, Rational(1, 2), Rational(1, 100)),
                                atomic(2, Rational(1, 2), Rational(2, 100))};
  const auto graph = build_significance_graph(res, path);
  CostCounters counters;
  const auto pat = grow_region_multcomp(Candidate::of({0, 1}), 10, graph, res, Rational(1, 20), 99, counters);
  EXPECT_EQ(pat.region, (Region{0, 1}));
  EXPECT_EQ(counters.threshold_history,
            (std::vector<Rational>{Rational(1, 20), Rational(1, 40), Rational(1, 60)}));
  EXPECT_EQ(counters.significance_tests, 0u);
  EXPECT_EQ(counters.threshold_comparisons, 1u + 2u + 3u);
}

TEST(MultComp, StopsWhenThresholdBelowGranularity) {
  const auto row = make_grid(1, 4, 1.0);
  std::vector<AtomicResult> res;
  for (PartitionId g = 0; g < 4; ++g) res.push_back(atomic(g, Rational(1), Rational(1, 20)));
  const auto graph = build_significance_graph(res, row);
  CostCounters counters;
  // R = 19: 1/(R+1) = 1/20, so alpha/2 is already unreachable.
  const auto pat = grow_region_multcomp(Candidate::of({0, 1}), 10, graph, res, Rational(1, 20), 19, counters);
  EXPECT_EQ(pat.region, (Region{0}));
  ASSERT_EQ(pat.warnings.size(), 1u);
  EXPECT_NE(pat.warnings[0].find("granularity"), std::string::npos);
}

TEST(MultComp, StartIsHighestPiLowestIdOnTies) {
  const auto row = make_grid(1, 3, 1.0);
  std::vector<AtomicResult> res{atomic(0, Rational(1, 2), Rational(1, 100)), atomic(1, Rational(3, 4), Rational(1, 100)),
                                atomic(2, Rational(3, 4), Rational(1, 100))};
  const auto graph = build_significance_graph(res, row);
  CostCounters counters;
  const auto pat = grow_region_multcomp(Candidate::of({0, 1}), 10, graph, res, Rational(1, 20), 99, counters);
  EXPECT_EQ(pat.per_partition.front().partition, 0u);  // region order is by id
  EXPECT_EQ(pat.region, (Region{0, 1, 2}));
  // From 1 the traversal reaches 0 first: thresholds alpha, alpha/2, alpha/3.
  EXPECT_EQ(counters.threshold_history.size(), 3u);
}

TEST(Ssrcm, SingleVertexNeedsNoExtraTest) {
  const auto t = toy_layout();
  const auto ens = generate_nulls(t.instances, t.partitions, 19, 2);
  MiningContext ctx(t.instances, t.partitions, ens, Rational(1, 20));
  std::vector<AtomicResult> res{atomic(1, Rational(3, 4), Rational(1, 20))};
  const auto graph = build_significance_graph(res, t.partitions);
  CostCounters counters;
  const auto pat = grow_region_ssrcm(ctx, Candidate::of({0, 1}), t.d, graph, res, counters);
  EXPECT_EQ(pat.region, (Region{1}));
  EXPECT_EQ(counters.significance_tests, 0u);
  EXPECT_EQ(counters.pi_computations, 0u);
}

TEST(Ssrcm, FailedUnionLeavesRegionAndTraversalContinues) {
  // 2x2 grid; 0 neighbors 1 and 2. Every observed partition has a single
  // close pair (pi = 1). The hand-built nulls give pi = 0 per partition, but
  // the nulls of 0 and 1 interlock so that their union reaches pi = 1.
  const auto grid = make_grid(2, 2, 100.0);
  std::vector<FeatureInstance> obs{{0, {10, 10}, 0}, {1, {11, 10}, 0}, {0, {110, 10}, 1}, {1, {111, 10}, 1},
                                   {0, {10, 110}, 2}, {1, {11, 110}, 2}};
  const std::size_t r = 19;
  NullEnsemble ens;
  ens.simulations = r;
  ens.features = {0, 1};
  ens.covered = {1, 1, 1, 1};
  ens.per_partition.resize(4);
  for (std::size_t i = 0; i < r; ++i) {
    ens.per_partition[0].push_back({{0, {10, 10}, 0}, {1, {90, 90}, 0}});
    ens.per_partition[1].push_back({{0, {89, 90}, 1}, {1, {11, 10}, 1}});
    ens.per_partition[2].push_back({{0, {10, 110}, 2}, {1, {90, 190}, 2}});
    ens.per_partition[3].push_back({});
  }
  MiningContext ctx(obs, grid, ens, Rational(1, 20));
  const auto cand = Candidate::of({0, 1});
  CostCounters counters;
  const auto res = find_atomic_partitions(ctx, cand, 5.0, 1, counters);
  ASSERT_EQ(res.size(), 3u);
  for (const auto& a : res) EXPECT_TRUE(a.significant);
  const auto graph = build_significance_graph(res, grid);
  const auto pat = grow_region_ssrcm(ctx, cand, 5.0, graph, res, counters);
  EXPECT_EQ(pat.region, (Region{0, 2}));
  // 3 atomic + start + {0,1} rejected + {0,2} accepted.
  EXPECT_EQ(counters.significance_tests, 6u);
  EXPECT_EQ(counters.pi_computations, 6u);
  ASSERT_TRUE(pat.region_p_value);
  EXPECT_EQ(*pat.region_p_value, Rational(1, 20));
}

TEST(Trace, AllAtomicTestsAtMinimumPValue) {
  const auto t = run_trace();
  ASSERT_EQ(t.multcomp.jobs.size(), 1u);
  ASSERT_EQ(t.multcomp.jobs[0].atomic.size(), 4u);
  for (const auto& a : t.multcomp.jobs[0].atomic) EXPECT_EQ(a.p_value, Rational(1, 100));
}

TEST(Trace, CountersAndThresholds) {
  const auto t = run_trace();
  const auto& s = t.ssrcm.jobs.at(0);
  const auto& m = t.multcomp.jobs.at(0);
  EXPECT_EQ(s.counters.significance_tests, 8u);
  EXPECT_EQ(s.counters.pi_computations, 8u);
  EXPECT_EQ(m.counters.significance_tests, 4u);
  EXPECT_EQ(m.counters.pi_computations, 4u);
  EXPECT_EQ(m.counters.threshold_history, table2_thresholds());
  EXPECT_EQ(s.counters.threshold_history, std::vector<Rational>(5, Rational(1, 20)));
  ASSERT_EQ(s.patterns.size(), 1u);
  ASSERT_EQ(m.patterns.size(), 1u);
  EXPECT_EQ(s.patterns[0].region, (Region{0, 1, 2, 3}));
  EXPECT_EQ(m.patterns[0].region, (Region{0, 1, 2, 3}));
  EXPECT_TRUE(m.patterns[0].largest);
}

TEST(Mine, ThreadCountDoesNotChangeResults) {
  const auto data = generate(trace_config(3));
  MineConfig mc;
  mc.d_lower = 30;
  mc.d_upper = 50;
  mc.seed = 8;
  mc.simulations = 39;
  const std::vector<Candidate> cands{make_candidate(data.features, {"A", "B"})};
  const auto one = mine(data.instances, data.partitions, cands, mc);
  mc.threads = 4;
  const auto four = mine(data.instances, data.partitions, cands, mc);
  ASSERT_EQ(one.jobs.size(), 3u);
  ASSERT_EQ(four.jobs.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(one.jobs[k].d, four.jobs[k].d);
    ASSERT_EQ(one.jobs[k].atomic.size(), four.jobs[k].atomic.size());
    for (std::size_t a = 0; a < one.jobs[k].atomic.size(); ++a) {
      EXPECT_EQ(one.jobs[k].atomic[a].p_value, four.jobs[k].atomic[a].p_value);
    }
  }
}

TEST(Mine, GranularityRule) {
  MineConfig mc;
  mc.simulations = 9;
  EXPECT_THROW(effective_simulations(mc, 4), Error);
  mc.simulations = 19;
  EXPECT_EQ(effective_simulations(mc, 4), 19u);
  mc.auto_scale_simulations = true;
  EXPECT_EQ(effective_simulations(mc, 64), 1279u);  // 64 / (1/20) - 1
}

TEST(Mine, AllCandidatesRespectsMinInstances) {
  const auto data = generate(trace_config());
  const auto cands = all_candidates(data.instances, data.partitions, data.features.size(), 3, 3);
  ASSERT_EQ(cands.size(), 1u);
  EXPECT_EQ(cands[0], Candidate::of({0, 1}));
}

TEST(Mine, CostDominanceOnRandomGrids) {
  Rng rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    SynthConfig c;
    c.rows = 3;
    c.cols = 3;
    c.noise_per_feature = 8;
    c.seed = 100 + trial;
    PlantedSpec spec;
    spec.region = random_connected_region(3, 3, 4, rng);
    spec.features = {"A", "B"};
    spec.instances_per_cell = 10;
    c.planted.push_back(spec);
    const auto data = generate(c);
    const auto cand = make_candidate(data.features, {"A", "B"});
    const auto ens = generate_nulls(data.instances, data.partitions, 99, c.seed);
    MineConfig mc;
    mc.d_lower = mc.d_upper = 50;
    mc.method = Method::ssrcm;
    const auto s = mine_with(data.instances, data.partitions, {cand}, mc, ens).total_counters();
    mc.method = Method::multcomp;
    const auto m = mine_with(data.instances, data.partitions, {cand}, mc, ens).total_counters();
    EXPECT_LE(m.significance_tests, s.significance_tests);
    EXPECT_LE(m.pi_computations, s.pi_computations);
    EXPECT_LE(m.null_pi_computations, s.null_pi_computations);
  }
}
