#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace rcm {

/// Planar coordinates in meters.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline double distance_squared(const Point& a, const Point& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

inline double distance(const Point& a, const Point& b) {
  return std::sqrt(distance_squared(a, b));
}

struct BBox {
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = std::numeric_limits<double>::infinity();
  double max_x = -std::numeric_limits<double>::infinity();
  double max_y = -std::numeric_limits<double>::infinity();

  bool empty() const { return min_x > max_x || min_y > max_y; }
  double width() const { return empty() ? 0.0 : max_x - min_x; }
  double height() const { return empty() ? 0.0 : max_y - min_y; }
  double diagonal() const { return std::hypot(width(), height()); }

  void expand(const Point& p) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
  void expand(const BBox& b) {
    if (b.empty()) return;
    expand(Point{b.min_x, b.min_y});
    expand(Point{b.max_x, b.max_y});
  }
  BBox inflated(double margin) const {
    return BBox{min_x - margin, min_y - margin, max_x + margin, max_y + margin};
  }
  bool contains(const Point& p) const {
    return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
  }
  bool intersects(const BBox& o) const {
    return !(o.min_x > max_x || o.max_x < min_x || o.min_y > max_y || o.max_y < min_y);
  }
};

/// Vertices of a closed ring, without the repeated closing vertex.
using Ring = std::vector<Point>;

struct Polygon {
  Ring outer;
  std::vector<Ring> holes;
};

/// A partition boundary; a MultiPolygon input yields several parts.
using MultiPolygon = std::vector<Polygon>;

struct Segment {
  Point a;
  Point b;
};

inline double signed_area(const Ring& ring) {
  double twice = 0.0;
  for (std::size_t i = 0, n = ring.size(); i < n; ++i) {
    const Point& p = ring[i];
    const Point& q = ring[(i + 1) % n];
    twice += p.x * q.y - q.x * p.y;
  }
  return 0.5 * twice;
}

inline double area(const Polygon& polygon) {
  double a = std::abs(signed_area(polygon.outer));
  for (const auto& hole : polygon.holes) a -= std::abs(signed_area(hole));
  return std::max(a, 0.0);
}

inline double area(const MultiPolygon& shape) {
  double a = 0.0;
  for (const auto& part : shape) a += area(part);
  return a;
}

inline BBox bounds(const Ring& ring) {
  BBox box;
  for (const auto& p : ring) box.expand(p);
  return box;
}

inline BBox bounds(const MultiPolygon& shape) {
  BBox box;
  for (const auto& part : shape) box.expand(bounds(part.outer));
  return box;
}

template <typename Fn>
void for_each_edge(const Ring& ring, Fn&& fn) {
  for (std::size_t i = 0, n = ring.size(); i < n; ++i) fn(Segment{ring[i], ring[(i + 1) % n]});
}

template <typename Fn>
void for_each_edge(const MultiPolygon& shape, Fn&& fn) {
  for (const auto& part : shape) {
    for_each_edge(part.outer, fn);
    for (const auto& hole : part.holes) for_each_edge(hole, fn);
  }
}

inline double point_segment_distance(const Point& p, const Segment& s) {
  const double vx = s.b.x - s.a.x;
  const double vy = s.b.y - s.a.y;
  const double len2 = vx * vx + vy * vy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((p.x - s.a.x) * vx + (p.y - s.a.y) * vy) / len2, 0.0, 1.0);
  return distance(p, Point{s.a.x + t * vx, s.a.y + t * vy});
}

namespace detail {

inline bool on_segment(const Point& p, const Segment& s, double eps) {
  return point_segment_distance(p, s) <= eps;
}

// Crossing-number test; boundary points are handled by the caller.
inline bool strictly_inside(const Ring& ring, const Point& p) {
  bool inside = false;
  for (std::size_t i = 0, j = ring.size() - 1, n = ring.size(); i < n; j = i++) {
    const Point& a = ring[i];
    const Point& b = ring[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

inline bool on_ring(const Ring& ring, const Point& p, double eps) {
  bool hit = false;
  for_each_edge(ring, [&](const Segment& s) { hit = hit || on_segment(p, s, eps); });
  return hit;
}

}  // namespace detail

/// Closed point-in-polygon: boundary points (within `eps`) count as inside.
inline bool contains(const Polygon& polygon, const Point& p, double eps = 1e-9) {
  if (polygon.outer.size() < 3) return false;
  if (detail::on_ring(polygon.outer, p, eps)) return true;
  if (!detail::strictly_inside(polygon.outer, p)) return false;
  for (const auto& hole : polygon.holes) {
    if (detail::on_ring(hole, p, eps)) return true;
    if (detail::strictly_inside(hole, p)) return false;
  }
  return true;
}

inline bool contains(const MultiPolygon& shape, const Point& p, double eps = 1e-9) {
  return std::any_of(shape.begin(), shape.end(),
                     [&](const Polygon& part) { return contains(part, p, eps); });
}

/// Length of the collinear overlap of two segments; zero unless both
/// endpoints of `t` lie within `eps` of the supporting line of `s`.
inline double collinear_overlap(const Segment& s, const Segment& t, double eps) {
  const double vx = s.b.x - s.a.x;
  const double vy = s.b.y - s.a.y;
  const double len = std::hypot(vx, vy);
  if (len <= eps) return 0.0;
  const double ux = vx / len;
  const double uy = vy / len;
  auto offset = [&](const Point& p) { return std::abs(ux * (p.y - s.a.y) - uy * (p.x - s.a.x)); };
  if (offset(t.a) > eps || offset(t.b) > eps) return 0.0;
  auto along = [&](const Point& p) { return ux * (p.x - s.a.x) + uy * (p.y - s.a.y); };
  const double t0 = along(t.a);
  const double t1 = along(t.b);
  const double lo = std::max(0.0, std::min(t0, t1));
  const double hi = std::min(len, std::max(t0, t1));
  return std::max(0.0, hi - lo);
}

/// Total length of boundary shared by two shapes.
inline double shared_boundary_length(const MultiPolygon& a, const MultiPolygon& b, double eps) {
  std::vector<Segment> b_edges;
  std::vector<BBox> b_boxes;
  for_each_edge(b, [&](const Segment& s) {
    BBox box;
    box.expand(s.a);
    box.expand(s.b);
    b_edges.push_back(s);
    b_boxes.push_back(box.inflated(eps));
  });
  double total = 0.0;
  for_each_edge(a, [&](const Segment& s) {
    BBox box;
    box.expand(s.a);
    box.expand(s.b);
    for (std::size_t k = 0; k < b_edges.size(); ++k) {
      if (!box.intersects(b_boxes[k])) continue;
      total += collinear_overlap(s, b_edges[k], eps);
    }
  });
  return total;
}

/// Minimum distance from `p` to any boundary edge of `shape`.
inline double boundary_distance(const MultiPolygon& shape, const Point& p) {
  double best = std::numeric_limits<double>::infinity();
  for_each_edge(shape, [&](const Segment& s) { best = std::min(best, point_segment_distance(p, s)); });
  return best;
}

/// True when no two non-adjacent edges of the ring intersect.
inline bool is_simple(const Ring& ring) {
  const std::size_t n = ring.size();
  if (n < 3) return false;
  auto orient = [](const Point& a, const Point& b, const Point& c) {
    const double v = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    return (v > 0) - (v < 0);
  };
  auto between = [](const Point& a, const Point& b, const Point& c) {
    return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) &&
           std::min(a.y, b.y) <= c.y && c.y <= std::max(a.y, b.y);
  };
  auto intersects = [&](const Point& p1, const Point& p2, const Point& q1, const Point& q2) {
    const int o1 = orient(p1, p2, q1), o2 = orient(p1, p2, q2);
    const int o3 = orient(q1, q2, p1), o4 = orient(q1, q2, p2);
    if (o1 != o2 && o3 != o4) return true;
    return (o1 == 0 && between(p1, p2, q1)) || (o2 == 0 && between(p1, p2, q2)) ||
           (o3 == 0 && between(q1, q2, p1)) || (o4 == 0 && between(q1, q2, p2));
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (intersects(ring[i], ring[(i + 1) % n], ring[j], ring[(j + 1) % n])) return false;
    }
  }
  return true;
}

}  // namespace rcm
