#include <gtest/gtest.h>

#include "rcm/rcm.hpp"

using namespace rcm;

namespace {

Polygon square(double x0, double y0, double s) {
  return Polygon{{{x0, y0}, {x0 + s, y0}, {x0 + s, y0 + s}, {x0, y0 + s}}, {}};
}

}  // namespace

TEST(Geometry, AreaOfSquareAndHole) {
  Polygon p = square(0, 0, 10);
  EXPECT_DOUBLE_EQ(area(p), 100.0);
  p.holes.push_back({{2, 2}, {4, 2}, {4, 4}, {2, 4}});
  EXPECT_DOUBLE_EQ(area(p), 96.0);
}

TEST(Geometry, ContainsIsClosed) {
  const Polygon p = square(0, 0, 1);
  EXPECT_TRUE(contains(p, {0.5, 0.5}));
  EXPECT_TRUE(contains(p, {1.0, 0.5}));  // edge
  EXPECT_TRUE(contains(p, {0.0, 0.0}));  // vertex
  EXPECT_FALSE(contains(p, {1.5, 0.5}));
}

TEST(Geometry, HoleExcludesInterior) {
  Polygon p = square(0, 0, 10);
  p.holes.push_back({{2, 2}, {4, 2}, {4, 4}, {2, 4}});
  EXPECT_FALSE(contains(p, {3, 3}));
  EXPECT_TRUE(contains(p, {6, 6}));
}

TEST(Geometry, SharedBoundaryLength) {
  const MultiPolygon a{square(0, 0, 1)};
  const MultiPolygon b{square(1, 0, 1)};
  const MultiPolygon c{square(1, 1, 1)};
  const MultiPolygon half{Polygon{{{1, 0.5}, {2, 0.5}, {2, 1.5}, {1, 1.5}}, {}}};
  EXPECT_NEAR(shared_boundary_length(a, b, 1e-9), 1.0, 1e-12);
  EXPECT_NEAR(shared_boundary_length(a, c, 1e-9), 0.0, 1e-12);
  EXPECT_NEAR(shared_boundary_length(a, half, 1e-9), 0.5, 1e-12);
}

TEST(Geometry, SimpleRing) {
  EXPECT_TRUE(is_simple(square(0, 0, 1).outer));
  const Ring bowtie{{0, 0}, {1, 1}, {1, 0}, {0, 1}};
  EXPECT_FALSE(is_simple(bowtie));
  EXPECT_FALSE(is_simple(Ring{{0, 0}, {1, 1}}));
}

TEST(Geometry, BoundaryDistance) {
  const MultiPolygon s{square(0, 0, 10)};
  EXPECT_DOUBLE_EQ(boundary_distance(s, {5, 5}), 5.0);
  EXPECT_DOUBLE_EQ(boundary_distance(s, {1, 5}), 1.0);
}

TEST(Rational, ParsesDecimalsAndFractions) {
  EXPECT_EQ(parse_rational("0.05"), Rational(1, 20));
  EXPECT_EQ(parse_rational("1/20"), Rational(1, 20));
  EXPECT_EQ(parse_rational("1e-2"), Rational(1, 100));
  EXPECT_EQ(parse_rational("0.0125"), Rational(1, 80));
  EXPECT_THROW(parse_rational("abc"), Error);
}

TEST(Rational, PrintsExactForm) {
  EXPECT_EQ(to_string(Rational(9, 17)), "9/17");
  EXPECT_EQ(to_string(Rational(3)), "3");
  EXPECT_EQ(rcm::ceil(Rational(7, 2)), 4);
  EXPECT_EQ(rcm::ceil(Rational(4)), 4);
}

TEST(Random, DeriveSeedSeparatesStreams) {
  EXPECT_EQ(derive_seed(1, {2, 3}), derive_seed(1, {2, 3}));
  EXPECT_NE(derive_seed(1, {2, 3}), derive_seed(1, {3, 2}));
  EXPECT_NE(derive_seed(1, {2}), derive_seed(2, {2}));
}

TEST(Random, SamplesLandInsideShape) {
  Polygon l{{{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}, {}};
  const MultiPolygon shape{l};
  Rng rng(3);
  for (int i = 0; i < 500; ++i) EXPECT_TRUE(contains(shape, sample_in(rng, shape, bounds(shape))));
}

TEST(Random, DiscSamplesWithinRadius) {
  Rng rng(5);
  for (int i = 0; i < 500; ++i) EXPECT_LE(distance(sample_in_disc(rng, {3, 4}, 2.0), Point{3, 4}), 2.0);
}

TEST(Parallel, RunsEveryIndexOnceAndRethrowsLowest) {
  std::vector<int> hits(100, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  EXPECT_EQ(std::count(hits.begin(), hits.end(), 1), 100);
  try {
    parallel_for(50, 4, [](std::size_t i) {
      if (i == 7 || i == 31) throw std::runtime_error(std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "7");
  }
}

TEST(GridIndex, PairsMatchAllPairs) {
  Rng rng(9);
  std::uniform_real_distribution<double> u(0, 100);
  std::vector<Point> pts;
  for (int i = 0; i < 300; ++i) pts.push_back({u(rng), u(rng)});
  std::set<std::pair<std::uint32_t, std::uint32_t>> got, want;
  GridIndex index(pts, 7.0);
  index.for_each_pair_within(7.0, [&](std::uint32_t i, std::uint32_t j) {
    EXPECT_TRUE(got.insert({std::min(i, j), std::max(i, j)}).second);
  });
  for (std::uint32_t i = 0; i < pts.size(); ++i) {
    for (std::uint32_t j = i + 1; j < pts.size(); ++j) {
      if (distance(pts[i], pts[j]) <= 7.0) want.insert({i, j});
    }
  }
  EXPECT_EQ(got, want);
}
