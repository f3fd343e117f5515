#pragma once

#include <set>
#include <vector>

#include "rcm/rcm.hpp"

namespace rcm::testing {

// Two-feature toy layout on a 2x2 grid of 100 m cells, d = 10 m.
//   17 A, 12 B, 9 {A,B} cliques; 9 distinct A and 8 distinct B take part.
//   Partition 1 holds 4 A and 4 B: four cliques sharing one B, one lone B.
// No two instances closer than 20 m sit in different cells.
struct ToyLayout {
  FeatureRegistry features{std::vector<std::string>{"A", "B"}};
  PartitionSet partitions;
  std::vector<FeatureInstance> instances;
  double d = 10.0;
  PartitionId r2 = 1;
};

inline ToyLayout toy_layout() {
  ToyLayout t;
  t.partitions = make_grid(2, 2, 100.0);
  const FeatureId A = 0, B = 1;
  auto put = [&](FeatureId f, double x, double y) { t.instances.push_back({f, {x, y}, kOutside}); };

  // Partition 1 spans x in [100, 200], y in [0, 100].
  put(A, 125, 30);  // shares the B at (130, 30) with the A at (135, 30)
  put(B, 130, 30);
  put(A, 135, 30);
  put(A, 125, 70);
  put(B, 130, 70);
  put(A, 170, 30);
  put(B, 175, 30);
  put(B, 170, 70);  // no A within d

  // Five more one-to-one cliques in partitions 0, 2 and 3.
  const double pairs[][2] = {{30, 30}, {70, 70}, {30, 130}, {70, 170}, {130, 130}};
  for (const auto& p : pairs) {
    put(A, p[0], p[1]);
    put(B, p[0] + 5, p[1]);
  }
  // Isolated instances: 8 A and 3 B, farther than d from any other type.
  const double lone_a[][2] = {{30, 70}, {70, 30}, {50, 50}, {30, 170}, {70, 130}, {170, 130}, {170, 170}, {150, 150}};
  for (const auto& p : lone_a) put(A, p[0], p[1]);
  const double lone_b[][2] = {{50, 150}, {130, 170}, {150, 115}};
  for (const auto& p : lone_b) put(B, p[0], p[1]);

  t.instances = assign_partitions(std::move(t.instances), t.partitions);
  return t;
}

// 2x2 grid with a strong {A,B} pattern planted in every cell: every atomic
// test and every union reaches the minimum p-value 1/(R+1).
inline SynthConfig trace_config(std::uint64_t seed = 11) {
  SynthConfig c;
  c.rows = 2;
  c.cols = 2;
  c.cell_size = 1000.0;
  c.features = {"A", "B"};
  c.noise_per_feature = 4;
  c.seed = seed;
  PlantedSpec spec;
  spec.region = {0, 1, 2, 3};
  spec.features = {"A", "B"};
  spec.instances_per_cell = 20;
  spec.d_g = 40.0;
  c.planted.push_back(spec);
  return c;
}

// Brute-force neighbor relation.
inline std::vector<std::pair<std::uint32_t, std::uint32_t>> all_pairs_edges(
    const std::vector<FeatureInstance>& pts, double d) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
  for (std::uint32_t i = 0; i < pts.size(); ++i) {
    for (std::uint32_t j = i + 1; j < pts.size(); ++j) {
      if (pts[i].feature == pts[j].feature) continue;
      const double dx = pts[i].location.x - pts[j].location.x;
      const double dy = pts[i].location.y - pts[j].location.y;
      if (dx * dx + dy * dy <= d * d) out.emplace_back(i, j);
    }
  }
  return out;
}

// Brute-force cliques, members in candidate feature order, sorted.
inline std::vector<CliqueInstance> brute_cliques(const Candidate& c, const std::vector<FeatureInstance>& pts,
                                                 double d) {
  auto near = [&](std::uint32_t i, std::uint32_t j) {
    const double dx = pts[i].location.x - pts[j].location.x;
    const double dy = pts[i].location.y - pts[j].location.y;
    return dx * dx + dy * dy <= d * d;
  };
  std::vector<CliqueInstance> out;
  const auto n = static_cast<std::uint32_t>(pts.size());
  for (std::uint32_t a = 0; a < n; ++a) {
    if (pts[a].feature != c[0]) continue;
    for (std::uint32_t b = 0; b < n; ++b) {
      if (pts[b].feature != c[1] || !near(a, b)) continue;
      if (c.size() == 2) {
        out.push_back(CliqueInstance{{a, b, 0}, 2});
        continue;
      }
      for (std::uint32_t e = 0; e < n; ++e) {
        if (pts[e].feature == c[2] && near(a, e) && near(b, e)) out.push_back(CliqueInstance{{a, b, e}, 3});
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Brute-force participation index: pr_f = instances of f with a clique
// partner set / count of f.
inline Rational brute_pi(const Candidate& c, const std::vector<FeatureInstance>& pts, double d) {
  const auto cliques = brute_cliques(c, pts, d);
  Rational pi(1);
  for (std::size_t k = 0; k < c.size(); ++k) {
    std::set<std::uint32_t> part;
    for (const auto& q : cliques) part.insert(q.members[k]);
    std::int64_t total = 0;
    for (const auto& p : pts) total += p.feature == c[k];
    const Rational r = total == 0 ? Rational(0) : Rational(static_cast<std::int64_t>(part.size()), total);
    pi = std::min(pi, r);
  }
  return pi;
}

inline std::vector<FeatureInstance> random_instances(Rng& rng, std::size_t n, std::size_t features, double side) {
  std::uniform_real_distribution<double> u(0.0, side);
  std::uniform_int_distribution<FeatureId> f(0, static_cast<FeatureId>(features - 1));
  std::vector<FeatureInstance> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({f(rng), {u(rng), u(rng)}, 0});
  return out;
}

}  // namespace rcm::testing
