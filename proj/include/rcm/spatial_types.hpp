#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rcm/error.hpp"
#include "rcm/geometry.hpp"

namespace rcm {

using FeatureId = std::uint32_t;
using PartitionId = std::uint32_t;

inline constexpr PartitionId kOutside = std::numeric_limits<PartitionId>::max();

/// Sorted, duplicate-free list of partition ids treated as one region.
using Region = std::vector<PartitionId>;

inline Region make_region(std::vector<PartitionId> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

inline bool region_contains(const Region& region, PartitionId id) {
  return std::binary_search(region.begin(), region.end(), id);
}

/// Dense feature ids. Ids follow lexicographic name order so that they do not
/// depend on the order in which rows were read.
class FeatureRegistry {
 public:
  FeatureRegistry() = default;

  explicit FeatureRegistry(std::vector<std::string> names) : names_(std::move(names)) {
    std::sort(names_.begin(), names_.end());
    names_.erase(std::unique(names_.begin(), names_.end()), names_.end());
    for (const auto& n : names_) {
      if (n.empty()) fail(ErrorKind::schema, "feature name must be nonempty");
    }
  }

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

  const std::string& name(FeatureId id) const { return names_.at(id); }

  std::optional<FeatureId> find(std::string_view name) const {
    auto it = std::lower_bound(names_.begin(), names_.end(), name);
    if (it == names_.end() || *it != name) return std::nullopt;
    return static_cast<FeatureId>(it - names_.begin());
  }

  FeatureId id(std::string_view name) const {
    if (auto f = find(name)) return *f;
    fail(ErrorKind::parameter, "unknown feature '" + std::string(name) + "'");
  }

 private:
  std::vector<std::string> names_;
};

struct FeatureInstance {
  FeatureId feature = 0;
  Point location;
  PartitionId partition = kOutside;
};

struct Partition {
  PartitionId id = 0;
  std::string label;
  MultiPolygon boundary;
  BBox box;
  double area = 0.0;
  std::vector<PartitionId> neighbors;  // sorted
};

struct PartitionSet {
  std::vector<Partition> partitions;
  std::string crs_note;

  std::size_t size() const { return partitions.size(); }
  const Partition& operator[](PartitionId id) const { return partitions.at(id); }

  double total_area() const {
    double a = 0.0;
    for (const auto& p : partitions) a += p.area;
    return a;
  }

  std::optional<PartitionId> find_label(std::string_view label) const {
    for (const auto& p : partitions) {
      if (p.label == label) return p.id;
    }
    return std::nullopt;
  }
};

/// Builds a partition from its boundary, filling the derived fields.
inline Partition make_partition(PartitionId id, std::string label, MultiPolygon boundary) {
  Partition p;
  p.id = id;
  p.label = std::move(label);
  p.boundary = std::move(boundary);
  p.box = bounds(p.boundary);
  p.area = area(p.boundary);
  return p;
}

inline Partition make_rectangle(PartitionId id, std::string label, double x0, double y0,
                                double x1, double y1) {
  Polygon poly;
  poly.outer = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
  return make_partition(id, std::move(label), MultiPolygon{poly});
}

/// Number of instances of each feature in each partition: counts[g][f].
using CountTable = std::vector<std::vector<std::size_t>>;

inline CountTable count_by_partition(const std::vector<FeatureInstance>& instances,
                                     std::size_t partition_count, std::size_t feature_count) {
  CountTable counts(partition_count, std::vector<std::size_t>(feature_count, 0));
  for (const auto& inst : instances) {
    if (inst.partition == kOutside || inst.partition >= partition_count) continue;
    if (inst.feature >= feature_count) continue;
    ++counts[inst.partition][inst.feature];
  }
  return counts;
}

/// Equirectangular projection about a reference point; adequate at county
/// scale where the analysis distances are a few kilometres.
struct Projection {
  double ref_lon_deg = 0.0;
  double ref_lat_deg = 0.0;

  static constexpr double kEarthRadius = 6371008.8;

  Point project(double lon_deg, double lat_deg) const {
    constexpr double deg = 3.14159265358979323846 / 180.0;
    return Point{kEarthRadius * (lon_deg - ref_lon_deg) * deg * std::cos(ref_lat_deg * deg),
                 kEarthRadius * (lat_deg - ref_lat_deg) * deg};
  }
};

}  // namespace rcm
