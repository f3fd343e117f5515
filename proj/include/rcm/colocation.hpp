#pragma once

#include <algorithm>
#include <array>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rcm/error.hpp"
#include "rcm/rational.hpp"
#include "rcm/spatial_core.hpp"

namespace rcm {

/// A set of 2 or 3 distinct feature types, kept sorted.
class Candidate {
 public:
  static Candidate of(std::vector<FeatureId> features) {
    std::sort(features.begin(), features.end());
    if (features.size() < 2 || features.size() > 3) {
      fail(ErrorKind::parameter, "a colocation candidate has 2 or 3 features");
    }
    if (std::adjacent_find(features.begin(), features.end()) != features.end()) {
      fail(ErrorKind::parameter, "candidate features must be distinct");
    }
    return Candidate(std::move(features));
  }
  static Candidate of(std::initializer_list<FeatureId> features) {
    return of(std::vector<FeatureId>(features));
  }

  const std::vector<FeatureId>& features() const { return features_; }
  std::size_t size() const { return features_.size(); }
  FeatureId operator[](std::size_t i) const { return features_[i]; }

  bool contains(FeatureId f) const {
    return std::binary_search(features_.begin(), features_.end(), f);
  }
  std::size_t position(FeatureId f) const {
    return static_cast<std::size_t>(std::lower_bound(features_.begin(), features_.end(), f) -
                                    features_.begin());
  }

  std::string describe(const FeatureRegistry& registry) const {
    std::string out = "{";
    for (std::size_t i = 0; i < features_.size(); ++i) {
      if (i) out += ", ";
      out += registry.name(features_[i]);
    }
    return out + "}";
  }

  friend bool operator==(const Candidate&, const Candidate&) = default;
  friend auto operator<=>(const Candidate&, const Candidate&) = default;

 private:
  explicit Candidate(std::vector<FeatureId> f) : features_(std::move(f)) {}
  std::vector<FeatureId> features_;
};

inline Candidate make_candidate(const FeatureRegistry& registry,
                                const std::vector<std::string>& names) {
  std::vector<FeatureId> ids;
  for (const auto& n : names) ids.push_back(registry.id(n));
  return Candidate::of(std::move(ids));
}

/// One member per candidate feature, in candidate feature order.
struct CliqueInstance {
  std::array<std::uint32_t, 3> members{};
  std::uint8_t size = 0;

  std::span<const std::uint32_t> view() const { return {members.data(), size}; }
  friend bool operator==(const CliqueInstance& a, const CliqueInstance& b) {
    return a.size == b.size && std::equal(a.members.begin(), a.members.begin() + a.size, b.members.begin());
  }
  friend bool operator<(const CliqueInstance& a, const CliqueInstance& b) {
    return std::lexicographical_compare(a.members.begin(), a.members.begin() + a.size,
                                        b.members.begin(), b.members.begin() + b.size);
  }
};

/// Visits every clique of the candidate in lexicographic member order.
/// Size-3 cliques come from an edge join: for each (f0, f1) edge, the sorted
/// neighbor lists of both ends are intersected for f2 members.
template <typename Fn>
void for_each_clique(const Candidate& candidate, const NeighborGraph& graph, Fn&& fn) {
  const FeatureId f0 = candidate[0];
  const FeatureId f1 = candidate[1];
  for (std::uint32_t a = 0; a < graph.vertex_count(); ++a) {
    if (!graph.active(a) || graph.feature(a) != f0) continue;
    const auto na = graph.neighbors(a);
    for (std::uint32_t b : na) {
      if (graph.feature(b) != f1) continue;
      if (candidate.size() == 2) {
        fn(CliqueInstance{{a, b, 0}, 2});
        continue;
      }
      const FeatureId f2 = candidate[2];
      const auto nb = graph.neighbors(b);
      auto i = na.begin();
      auto j = nb.begin();
      while (i != na.end() && j != nb.end()) {
        if (*i < *j) {
          ++i;
        } else if (*j < *i) {
          ++j;
        } else {
          if (graph.feature(*i) == f2) fn(CliqueInstance{{a, b, *i}, 3});
          ++i;
          ++j;
        }
      }
    }
  }
}

inline std::vector<CliqueInstance> enumerate_cliques(const Candidate& candidate,
                                                     const NeighborGraph& graph) {
  std::vector<CliqueInstance> out;
  for_each_clique(candidate, graph, [&](const CliqueInstance& c) { out.push_back(c); });
  return out;
}

/// Instance count per feature in some scope.
using FeatureCounts = std::map<FeatureId, std::size_t>;

/// Distinct instances of `feature` taking part in at least one clique, over
/// the feature's instance count in scope.
inline Rational participation_ratio(FeatureId feature, const Candidate& candidate,
                                    std::span<const CliqueInstance> cliques,
                                    const FeatureCounts& counts) {
  if (!candidate.contains(feature)) {
    fail(ErrorKind::parameter, "feature is not part of the candidate");
  }
  auto it = counts.find(feature);
  if (it == counts.end() || it->second == 0) {
    fail(ErrorKind::undefined_ratio, "participation ratio undefined: no instances of feature " +
                                         std::to_string(feature) + " in scope");
  }
  const std::size_t pos = candidate.position(feature);
  std::vector<std::uint32_t> members;
  members.reserve(cliques.size());
  for (const auto& c : cliques) members.push_back(c.members[pos]);
  std::sort(members.begin(), members.end());
  const auto distinct = std::unique(members.begin(), members.end()) - members.begin();
  return Rational(static_cast<std::int64_t>(distinct), static_cast<std::int64_t>(it->second));
}

struct FeatureRatio {
  FeatureId feature = 0;
  std::size_t participating = 0;
  std::size_t total = 0;

  bool absent() const { return total == 0; }
  Rational value() const {
    return absent() ? Rational(0) : Rational(static_cast<std::int64_t>(participating),
                                             static_cast<std::int64_t>(total));
  }
};

struct PiResult {
  Candidate candidate;
  std::optional<Region> region;
  std::vector<FeatureRatio> per_feature;  // candidate feature order
  Rational pi;
};

namespace detail {

// Ratios for the candidate over the given points (already restricted to scope).
inline std::vector<FeatureRatio> feature_ratios(std::span<const FeatureInstance> points,
                                                const Candidate& candidate, double d) {
  std::vector<FeatureInstance> local;
  local.reserve(points.size());
  for (const auto& p : points) {
    if (candidate.contains(p.feature)) local.push_back(p);
  }
  std::vector<FeatureRatio> ratios(candidate.size());
  for (std::size_t k = 0; k < candidate.size(); ++k) ratios[k].feature = candidate[k];
  for (const auto& p : local) ++ratios[candidate.position(p.feature)].total;

  const auto graph = build_neighbor_graph(local, d);
  std::vector<char> participates(local.size(), 0);
  for_each_clique(candidate, graph, [&](const CliqueInstance& c) {
    for (auto m : c.view()) participates[m] = 1;
  });
  for (std::uint32_t i = 0; i < local.size(); ++i) {
    if (participates[i]) ++ratios[candidate.position(local[i].feature)].participating;
  }
  return ratios;
}

inline Rational min_ratio(const std::vector<FeatureRatio>& ratios) {
  Rational pi = ratios.front().value();
  for (const auto& r : ratios) pi = std::min(pi, r.value());
  return pi;
}

}  // namespace detail

/// Participation index of `candidate` over the instances, optionally
/// restricted to a region (cliques never leave the region). A feature with no
/// instances in scope has ratio 0; if every feature is absent the scope is
/// empty and the call fails.
inline PiResult participation_index(std::span<const FeatureInstance> instances,
                                    const Candidate& candidate, double d,
                                    const std::optional<Region>& region = std::nullopt) {
  if (!(d > 0.0)) fail(ErrorKind::parameter, "neighbor distance must be positive");
  std::vector<FeatureInstance> scoped;
  for (const auto& inst : instances) {
    if (!region || region_contains(*region, inst.partition)) scoped.push_back(inst);
  }
  auto ratios = detail::feature_ratios(scoped, candidate, d);
  if (std::all_of(ratios.begin(), ratios.end(), [](const FeatureRatio& r) { return r.absent(); })) {
    fail(ErrorKind::empty_scope, "no instances of any candidate feature in scope");
  }
  PiResult out{candidate, region, std::move(ratios), Rational(0)};
  out.pi = detail::min_ratio(out.per_feature);
  return out;
}

/// Participation index over an already scoped point set; the hot path used
/// for null simulations.
inline Rational compute_pi(std::span<const FeatureInstance> points, const Candidate& candidate,
                           double d) {
  return detail::min_ratio(detail::feature_ratios(points, candidate, d));
}

}  // namespace rcm
