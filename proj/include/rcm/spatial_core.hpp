#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <vector>

#include "rcm/error.hpp"
#include "rcm/geometry.hpp"
#include "rcm/grid_index.hpp"
#include "rcm/spatial_types.hpp"

namespace rcm {

namespace detail {

inline double scale_of(const PartitionSet& partitions) {
  BBox all;
  for (const auto& p : partitions.partitions) all.expand(p.box);
  return std::max(1.0, std::max({std::abs(all.min_x), std::abs(all.max_x), std::abs(all.min_y),
                                 std::abs(all.max_y), all.diagonal()}));
}

}  // namespace detail

/// Partition containing `p`, or kOutside. Points on a shared boundary go to
/// the lowest partition id.
inline PartitionId locate(const PartitionSet& partitions, const Point& p, double eps) {
  for (const auto& part : partitions.partitions) {
    if (!part.box.inflated(eps).contains(p)) continue;
    if (contains(part.boundary, p, eps)) return part.id;
  }
  return kOutside;
}

inline std::vector<FeatureInstance> assign_partitions(std::vector<FeatureInstance> instances,
                                                      const PartitionSet& partitions) {
  const double eps = 1e-12 * detail::scale_of(partitions);
  for (auto& inst : instances) inst.partition = locate(partitions, inst.location, eps);
  return instances;
}

/// Fills neighbor sets: two partitions are adjacent when their boundaries share
/// more than `tolerance` meters of collinear segment. Corner contact alone
/// never qualifies.
inline PartitionSet derive_adjacency(PartitionSet partitions, double tolerance = 1.0) {
  const double eps = 1e-9 * detail::scale_of(partitions);
  auto& parts = partitions.partitions;
  for (auto& p : parts) p.neighbors.clear();
  for (std::size_t a = 0; a < parts.size(); ++a) {
    for (std::size_t b = a + 1; b < parts.size(); ++b) {
      if (!parts[a].box.inflated(eps).intersects(parts[b].box)) continue;
      if (shared_boundary_length(parts[a].boundary, parts[b].boundary, eps) > tolerance) {
        parts[a].neighbors.push_back(parts[b].id);
        parts[b].neighbors.push_back(parts[a].id);
      }
    }
  }
  for (auto& p : parts) std::sort(p.neighbors.begin(), p.neighbors.end());
  return partitions;
}

/// Instance-level neighbor relation under distance threshold d. Vertices are
/// indices into the instance list the graph was built from; only instances of
/// different feature types are ever joined.
class NeighborGraph {
 public:
  NeighborGraph() = default;

  double distance() const { return distance_; }
  std::size_t vertex_count() const { return adjacency_.size(); }

  /// False for instances excluded by the region filter.
  bool active(std::uint32_t v) const { return active_[v]; }
  FeatureId feature(std::uint32_t v) const { return features_[v]; }

  std::span<const std::uint32_t> neighbors(std::uint32_t v) const { return adjacency_[v]; }

  bool has_edge(std::uint32_t a, std::uint32_t b) const {
    const auto& n = adjacency_[a];
    return std::binary_search(n.begin(), n.end(), b);
  }

  std::size_t edge_count() const {
    std::size_t twice = 0;
    for (const auto& n : adjacency_) twice += n.size();
    return twice / 2;
  }

  /// Edge list with a < b, sorted.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges() const {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
    for (std::uint32_t a = 0; a < adjacency_.size(); ++a) {
      for (auto b : adjacency_[a]) {
        if (a < b) out.emplace_back(a, b);
      }
    }
    return out;
  }

 private:
  friend NeighborGraph build_neighbor_graph(std::span<const FeatureInstance>, double,
                                            const std::optional<Region>&);

  double distance_ = 0.0;
  std::vector<FeatureId> features_;
  std::vector<bool> active_;
  std::vector<std::vector<std::uint32_t>> adjacency_;
};

inline NeighborGraph build_neighbor_graph(std::span<const FeatureInstance> instances, double d,
                                          const std::optional<Region>& region = std::nullopt) {
  if (!(d > 0.0)) fail(ErrorKind::parameter, "neighbor distance must be positive");

  NeighborGraph g;
  g.distance_ = d;
  g.features_.resize(instances.size());
  g.active_.resize(instances.size());
  g.adjacency_.resize(instances.size());

  std::vector<std::uint32_t> members;
  std::vector<Point> points;
  for (std::uint32_t i = 0; i < instances.size(); ++i) {
    g.features_[i] = instances[i].feature;
    const bool in = !region || region_contains(*region, instances[i].partition);
    g.active_[i] = in;
    if (in) {
      members.push_back(i);
      points.push_back(instances[i].location);
    }
  }

  GridIndex index(points, d);
  index.for_each_pair_within(d, [&](std::uint32_t a, std::uint32_t b) {
    const auto ia = members[a];
    const auto ib = members[b];
    if (instances[ia].feature == instances[ib].feature) return;
    g.adjacency_[ia].push_back(ib);
    g.adjacency_[ib].push_back(ia);
  });
  for (auto& n : g.adjacency_) std::sort(n.begin(), n.end());
  return g;
}

}  // namespace rcm
