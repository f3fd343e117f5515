#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

#include "rcm/error.hpp"
#include "rcm/geometry.hpp"

namespace rcm {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Stable seed for an independent stream identified by `keys`.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = splitmix64(master);
  for (auto k : keys) h = splitmix64(h ^ splitmix64(k + 0x632BE59BD9B4E019ULL));
  return h;
}

using Rng = std::mt19937_64;

/// Uniform point inside `shape` by rejection from its bounding box.
inline Point sample_in(Rng& rng, const MultiPolygon& shape, const BBox& box,
                       std::size_t max_attempts = 1'000'000) {
  std::uniform_real_distribution<double> ux(box.min_x, box.max_x);
  std::uniform_real_distribution<double> uy(box.min_y, box.max_y);
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    Point p{ux(rng), uy(rng)};
    if (contains(shape, p, 0.0)) return p;
  }
  fail(ErrorKind::generation, "rejection sampling did not land inside the polygon");
}

/// Uniform point in the disc of the given radius around `center`.
inline Point sample_in_disc(Rng& rng, const Point& center, double radius) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = radius * std::sqrt(u(rng));
  const double theta = 2.0 * 3.14159265358979323846 * u(rng);
  return Point{center.x + r * std::cos(theta), center.y + r * std::sin(theta)};
}

}  // namespace rcm
