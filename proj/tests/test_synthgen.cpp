#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace rcm;
using namespace rcm::testing;

namespace {

SynthConfig three_feature_plant() {
  SynthConfig c;
  c.rows = 3;
  c.cols = 3;
  c.seed = 4;
  PlantedSpec spec;
  spec.region = {0, 1, 4};
  spec.features = {"A", "B", "C"};
  spec.instances_per_cell = 4;
  spec.d_g = 50;
  c.planted.push_back(spec);
  return c;
}

ErrorKind kind_of(const SynthConfig& c) {
  try {
    generate(c);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::io;  // sentinel: no error
}

}  // namespace

TEST(Synth, GridLayoutAndAdjacency) {
  const auto grid = make_grid(2, 3, 10.0);
  ASSERT_EQ(grid.size(), 6u);
  EXPECT_DOUBLE_EQ(grid[5].area, 100.0);
  EXPECT_DOUBLE_EQ(grid[5].box.min_x, 20.0);
  EXPECT_DOUBLE_EQ(grid[5].box.min_y, 10.0);
  EXPECT_EQ(grid[4].neighbors, (std::vector<PartitionId>{1, 3, 5}));
}

TEST(Synth, PlantedCellsHoldEveryFeature) {
  const auto data = generate(three_feature_plant());
  const auto counts = count_by_partition(data.instances, 9, 3);
  for (PartitionId g : {0u, 1u, 4u}) {
    for (FeatureId f = 0; f < 3; ++f) EXPECT_GE(counts[g][f], 4u);
  }
  for (PartitionId g : {2u, 3u, 5u, 6u, 7u, 8u}) {
    for (FeatureId f = 0; f < 3; ++f) EXPECT_EQ(counts[g][f], 0u);
  }
  for (const auto& inst : data.instances) {
    EXPECT_TRUE(contains(data.partitions[inst.partition].boundary, inst.location));
  }
}

TEST(Synth, GroupsFitInsideDiameter) {
  const auto data = generate(three_feature_plant());
  // Instances come in consecutive (A, B, C) groups.
  for (std::size_t k = 0; k + 2 < data.instances.size(); k += 3) {
    for (std::size_t a = k; a < k + 3; ++a) {
      for (std::size_t b = a + 1; b < k + 3; ++b) {
        EXPECT_LE(distance(data.instances[a].location, data.instances[b].location), 50.0);
      }
    }
  }
}

TEST(Synth, SameSeedSameData) {
  const auto a = generate(three_feature_plant());
  const auto b = generate(three_feature_plant());
  ASSERT_EQ(a.instances.size(), b.instances.size());
  for (std::size_t k = 0; k < a.instances.size(); ++k) EXPECT_EQ(a.instances[k].location, b.instances[k].location);
}

TEST(Synth, ConfigErrors) {
  auto c = three_feature_plant();
  c.planted[0].region = {0, 8};
  EXPECT_EQ(kind_of(c), ErrorKind::config);
  c = three_feature_plant();
  c.l_max = 2;
  EXPECT_EQ(kind_of(c), ErrorKind::config);
  c = three_feature_plant();
  c.planted[0].features = {"A", "Z"};
  EXPECT_EQ(kind_of(c), ErrorKind::config);
  c = three_feature_plant();
  c.planted[0].d_g = 5000;
  EXPECT_EQ(kind_of(c), ErrorKind::config);
  c = three_feature_plant();
  c.planted[0].region = {0, 9};
  EXPECT_EQ(kind_of(c), ErrorKind::config);
}

TEST(Synth, GridConnectivityDoesNotWrapRows) {
  EXPECT_TRUE(grid_connected({0, 1, 2}, 3));
  EXPECT_FALSE(grid_connected({2, 3}, 3));  // end of row 0, start of row 1
  EXPECT_TRUE(grid_connected({2, 5}, 3));
}

TEST(Synth, RandomConnectedRegions) {
  Rng rng(8);
  for (int k = 0; k < 200; ++k) {
    const auto r = random_connected_region(8, 8, 1 + k % 10, rng);
    EXPECT_EQ(r.size(), 1u + k % 10);
    EXPECT_TRUE(grid_connected(r, 8));
  }
}

TEST(Synth, PlantedPatternIsRecovered) {
  SynthConfig c;
  c.rows = 3;
  c.cols = 3;
  c.features = {"A", "B"};
  c.seed = 12;
  PlantedSpec spec;
  spec.region = {3, 4};
  spec.features = {"A", "B"};
  spec.instances_per_cell = 12;
  spec.d_g = 50;
  c.planted.push_back(spec);
  const auto data = generate(c);
  MineConfig mc;
  mc.d_lower = mc.d_upper = 50;
  mc.seed = 1;
  const auto report = mine(data.instances, data.partitions, {make_candidate(data.features, {"A", "B"})}, mc);
  ASSERT_EQ(report.jobs.at(0).patterns.size(), 1u);
  const auto& pat = report.jobs[0].patterns[0];
  EXPECT_EQ(pat.region, (Region{3, 4}));
  for (const auto& a : pat.per_partition) {
    EXPECT_EQ(a.pi, Rational(1));
    EXPECT_TRUE(a.significant);
  }
  EXPECT_EQ(score_fpr({pat}, data.truth, data.features).false_positives, 0u);
}

TEST(Fpr, ExactMatchIsZero) {
  GroundTruth truth{9, {{Region{0, 1}, {"A", "B"}}}};
  FeatureRegistry reg({"A", "B"});
  RegionalPattern p;
  p.region = {0, 1};
  p.candidate = Candidate::of({0, 1});
  const auto s = score_fpr({p}, truth, reg, p.candidate);
  EXPECT_EQ(s.rate(), Rational(0));
  EXPECT_EQ(s.true_negatives, 7u);
}

TEST(Fpr, OneExtraPartitionOfTen) {
  GroundTruth truth{10, {}};
  FeatureRegistry reg({"A", "B"});
  RegionalPattern p;
  p.region = {4};
  p.candidate = Candidate::of({0, 1});
  const auto s = score_fpr({p}, truth, reg, p.candidate);
  EXPECT_EQ(s.false_positives, 1u);
  EXPECT_EQ(s.true_negatives, 9u);
  EXPECT_EQ(s.rate(), Rational(1, 10));
}

TEST(Fpr, OtherCandidatesDoNotCount) {
  GroundTruth truth{4, {{Region{0}, {"A", "B"}}}};
  FeatureRegistry reg({"A", "B", "C"});
  RegionalPattern p;
  p.region = {0};
  p.candidate = Candidate::of({0, 1});
  // For {A,C}, partition 0 is a negative and nothing was reported.
  EXPECT_EQ(score_fpr({p}, truth, reg, Candidate::of({0, 2})).rate(), Rational(0));
  // Pooled: {A,B} contributes 0 FP of 3 negatives.
  const auto pooled = score_fpr({p}, truth, reg);
  EXPECT_EQ(pooled.false_positives, 0u);
  EXPECT_EQ(pooled.true_negatives, 3u);
}

TEST(Synth, JsonRoundTrip) {
  const auto c = three_feature_plant();
  const nlohmann::json j = c;
  const auto back = j.get<SynthConfig>();
  EXPECT_EQ(nlohmann::json(back), j);
  GroundTruth t{9, {{Region{0, 1, 4}, {"A", "B", "C"}}}};
  const nlohmann::json tj = t;
  const auto tb = tj.get<GroundTruth>();
  EXPECT_EQ(tb.partition_count, 9u);
  EXPECT_EQ(tb.planted[0].region, (Region{0, 1, 4}));
}
