#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rcm/error.hpp"
#include "rcm/results_io.hpp"
#include "rcm/significance.hpp"

namespace rcm {

namespace detail {

template <typename T>
void hash_pod(std::uint64_t& h, const T& v) {
  h = fnv1a(std::string_view(reinterpret_cast<const char*>(&v), sizeof(T)), h);
}

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
bool read_pod(std::istream& in, T& v) {
  return static_cast<bool>(in.read(reinterpret_cast<char*>(&v), sizeof(T)));
}

inline constexpr std::uint64_t kCacheMagic = 0x31454C424D45524FULL;

}  // namespace detail

/// Cache key over everything the ensemble depends on: observed counts come
/// from the instances, shapes from the partitions.
inline std::string ensemble_cache_key(std::span<const FeatureInstance> instances,
                                      const PartitionSet& partitions, std::size_t simulations,
                                      std::uint64_t seed, const std::vector<FeatureId>& features) {
  std::uint64_t data = 0xcbf29ce484222325ULL;
  for (const auto& inst : instances) {
    detail::hash_pod(data, inst.feature);
    detail::hash_pod(data, inst.location.x);
    detail::hash_pod(data, inst.location.y);
    detail::hash_pod(data, inst.partition);
  }
  std::uint64_t shapes = 0xcbf29ce484222325ULL;
  for (const auto& p : partitions.partitions) {
    detail::hash_pod(shapes, p.id);
    for (const auto& poly : p.boundary) {
      for (const auto& v : poly.outer) detail::hash_pod(shapes, v);
      for (const auto& hole : poly.holes) {
        for (const auto& v : hole) detail::hash_pod(shapes, v);
      }
    }
  }
  std::uint64_t params = 0xcbf29ce484222325ULL;
  detail::hash_pod(params, simulations);
  detail::hash_pod(params, seed);
  for (auto f : features) detail::hash_pod(params, f);
  return hex64(data) + "-" + hex64(shapes) + "-" + hex64(params);
}

inline void save_ensemble(const std::filesystem::path& path, const NullEnsemble& ens) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::io, "cannot write ensemble cache '" + path.string() + "'");
  detail::write_pod(out, detail::kCacheMagic);
  detail::write_pod(out, static_cast<std::uint64_t>(ens.simulations));
  detail::write_pod(out, ens.seed);
  detail::write_pod(out, static_cast<std::uint64_t>(ens.features.size()));
  for (auto f : ens.features) detail::write_pod(out, f);
  detail::write_pod(out, static_cast<std::uint64_t>(ens.per_partition.size()));
  for (std::size_t g = 0; g < ens.per_partition.size(); ++g) {
    detail::write_pod(out, static_cast<std::uint8_t>(ens.covered[g]));
    for (const auto& sim : ens.per_partition[g]) {
      detail::write_pod(out, static_cast<std::uint64_t>(sim.size()));
      for (const auto& p : sim) {
        detail::write_pod(out, p.feature);
        detail::write_pod(out, p.location.x);
        detail::write_pod(out, p.location.y);
      }
    }
  }
}

/// Returns nullopt when the file is missing or unreadable.
inline std::optional<NullEnsemble> load_ensemble(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::uint64_t magic = 0, sims = 0, nfeat = 0, nparts = 0;
  NullEnsemble ens;
  if (!detail::read_pod(in, magic) || magic != detail::kCacheMagic) return std::nullopt;
  if (!detail::read_pod(in, sims) || !detail::read_pod(in, ens.seed) || !detail::read_pod(in, nfeat)) {
    return std::nullopt;
  }
  ens.simulations = sims;
  ens.features.resize(nfeat);
  for (auto& f : ens.features) {
    if (!detail::read_pod(in, f)) return std::nullopt;
  }
  if (!detail::read_pod(in, nparts)) return std::nullopt;
  ens.covered.resize(nparts);
  ens.per_partition.resize(nparts);
  for (std::size_t g = 0; g < nparts; ++g) {
    std::uint8_t cov = 0;
    if (!detail::read_pod(in, cov)) return std::nullopt;
    ens.covered[g] = static_cast<char>(cov);
    if (!cov) continue;
    ens.per_partition[g].resize(sims);
    for (auto& sim : ens.per_partition[g]) {
      std::uint64_t n = 0;
      if (!detail::read_pod(in, n)) return std::nullopt;
      sim.resize(n);
      for (auto& p : sim) {
        if (!detail::read_pod(in, p.feature) || !detail::read_pod(in, p.location.x) ||
            !detail::read_pod(in, p.location.y)) {
          return std::nullopt;
        }
        p.partition = static_cast<PartitionId>(g);
      }
    }
  }
  return ens;
}

}  // namespace rcm
