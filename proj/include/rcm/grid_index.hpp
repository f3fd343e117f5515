#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "rcm/geometry.hpp"

namespace rcm {

/// Uniform hash grid over a point set, cell side = query radius. Pair
/// enumeration visits each unordered pair {i, j} with i < j exactly once, in
/// ascending i, which keeps downstream output order independent of hashing.
class GridIndex {
 public:
  GridIndex(std::span<const Point> points, double cell) : points_(points), cell_(cell) {
    cells_.reserve(points.size());
    for (std::uint32_t i = 0; i < points.size(); ++i) cells_[coords(points[i])].push_back(i);
  }

  /// Calls fn(i, j) for every pair i < j with distance <= radius (radius <= cell).
  template <typename Fn>
  void for_each_pair_within(double radius, Fn&& fn) const {
    const double r2 = radius * radius;
    for (std::uint32_t i = 0; i < points_.size(); ++i) {
      const auto [cx, cy] = coords(points_[i]);
      for (std::int64_t dx = -1; dx <= 1; ++dx) {
        for (std::int64_t dy = -1; dy <= 1; ++dy) {
          auto it = cells_.find(Cell{cx + dx, cy + dy});
          if (it == cells_.end()) continue;
          for (std::uint32_t j : it->second) {
            if (j <= i) continue;
            if (distance_squared(points_[i], points_[j]) <= r2) fn(i, j);
          }
        }
      }
    }
  }

 private:
  struct Cell {
    std::int64_t x;
    std::int64_t y;
    friend bool operator==(const Cell&, const Cell&) = default;
  };

  struct CellHash {
    std::size_t operator()(const Cell& c) const {
      std::uint64_t h = static_cast<std::uint64_t>(c.x) * 0x9E3779B97F4A7C15ULL;
      h ^= static_cast<std::uint64_t>(c.y) + 0x7F4A7C159E3779B9ULL + (h << 6) + (h >> 2);
      return static_cast<std::size_t>(h ^ (h >> 31));
    }
  };

  Cell coords(const Point& p) const {
    return {static_cast<std::int64_t>(std::floor(p.x / cell_)),
            static_cast<std::int64_t>(std::floor(p.y / cell_))};
  }

  std::span<const Point> points_;
  double cell_;
  std::unordered_map<Cell, std::vector<std::uint32_t>, CellHash> cells_;
};

}  // namespace rcm
