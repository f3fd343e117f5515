#pragma once

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rcm/error.hpp"
#include "rcm/spatial_types.hpp"

namespace rcm {

namespace detail {

using json = nlohmann::json;

inline Ring parse_ring(const json& coords, const std::optional<Projection>& projection,
                       const std::string& where) {
  if (!coords.is_array() || coords.size() < 4) {
    fail(ErrorKind::format, where + ": ring needs at least 4 positions");
  }
  Ring ring;
  ring.reserve(coords.size());
  for (const auto& pos : coords) {
    if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number()) {
      fail(ErrorKind::format, where + ": malformed position");
    }
    const double a = pos[0].get<double>();
    const double b = pos[1].get<double>();
    ring.push_back(projection ? projection->project(a, b) : Point{a, b});
  }
  if (!(ring.front() == ring.back())) fail(ErrorKind::format, where + ": ring is not closed");
  ring.pop_back();
  if (!is_simple(ring)) fail(ErrorKind::format, where + ": ring is not simple");
  return ring;
}

inline Polygon parse_polygon(const json& rings, const std::optional<Projection>& projection,
                             const std::string& where) {
  if (!rings.is_array() || rings.empty()) fail(ErrorKind::format, where + ": empty polygon");
  Polygon poly;
  poly.outer = parse_ring(rings[0], projection, where);
  for (std::size_t i = 1; i < rings.size(); ++i) {
    poly.holes.push_back(parse_ring(rings[i], projection, where));
  }
  return poly;
}

inline std::optional<long long> integral_id(const json& id) {
  if (id.is_number_integer()) return id.get<long long>();
  if (id.is_number_float()) {
    const double v = id.get<double>();
    if (v == static_cast<double>(static_cast<long long>(v))) return static_cast<long long>(v);
  }
  return std::nullopt;
}

template <typename Fn>
void for_each_position(const json& node, Fn&& fn) {
  if (node.is_array() && node.size() >= 2 && node[0].is_number() && node[1].is_number()) {
    fn(node[0].get<double>(), node[1].get<double>());
    return;
  }
  if (node.is_array()) {
    for (const auto& child : node) for_each_position(child, fn);
  }
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open partitions file '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::format, "'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

}  // namespace detail

/// Parses a GeoJSON FeatureCollection of Polygon / MultiPolygon features.
///
/// Each feature needs an `id`, either in `properties.id` or the feature-level
/// `id` member. When every id is an integer the partitions are ordered by that
/// integer; otherwise they keep file order. Dense partition ids are the
/// resulting positions and the original id is kept as the label. Adjacency is
/// left empty (see derive_adjacency).
inline PartitionSet parse_partitions(const nlohmann::json& doc,
                                     const std::optional<Projection>& projection = std::nullopt) {
  using detail::json;
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
      !doc.contains("features") || !doc["features"].is_array()) {
    fail(ErrorKind::format, "partitions file must be a GeoJSON FeatureCollection");
  }

  struct Raw {
    json id;
    std::string label;
    MultiPolygon shape;
  };
  std::vector<Raw> raw;
  std::set<std::string> seen;
  std::size_t index = 0;
  for (const auto& feature : doc["features"]) {
    const std::string where = "feature #" + std::to_string(index++);
    json id;
    if (feature.contains("properties") && feature["properties"].is_object() &&
        feature["properties"].contains("id")) {
      id = feature["properties"]["id"];
    } else if (feature.contains("id")) {
      id = feature["id"];
    } else {
      fail(ErrorKind::format, where + ": missing id property");
    }
    std::string label;
    if (id.is_string()) {
      label = id.get<std::string>();
    } else if (auto n = detail::integral_id(id)) {
      label = std::to_string(*n);
    } else {
      fail(ErrorKind::format, where + ": id must be a string or an integer");
    }
    if (!seen.insert(label).second) fail(ErrorKind::format, "duplicate partition id '" + label + "'");

    if (!feature.contains("geometry") || !feature["geometry"].is_object()) {
      fail(ErrorKind::format, where + ": missing geometry");
    }
    const auto& geometry = feature["geometry"];
    const std::string type = geometry.value("type", "");
    const std::string ctx = "partition '" + label + "'";
    MultiPolygon shape;
    if (type == "Polygon") {
      shape.push_back(detail::parse_polygon(geometry["coordinates"], projection, ctx));
    } else if (type == "MultiPolygon") {
      if (!geometry["coordinates"].is_array() || geometry["coordinates"].empty()) {
        fail(ErrorKind::format, ctx + ": empty MultiPolygon");
      }
      for (const auto& poly : geometry["coordinates"]) {
        shape.push_back(detail::parse_polygon(poly, projection, ctx));
      }
    } else {
      fail(ErrorKind::format, ctx + ": unsupported geometry type '" + type + "'");
    }
    raw.push_back({std::move(id), std::move(label), std::move(shape)});
  }

  const bool all_integral = std::all_of(raw.begin(), raw.end(), [](const Raw& r) {
    return detail::integral_id(r.id).has_value();
  });
  if (all_integral) {
    std::stable_sort(raw.begin(), raw.end(), [](const Raw& a, const Raw& b) {
      return *detail::integral_id(a.id) < *detail::integral_id(b.id);
    });
  }

  PartitionSet set;
  set.crs_note = projection ? "equirectangular projection of lon/lat, meters" : "planar input coordinates";
  if (doc.contains("crs_note") && doc["crs_note"].is_string()) set.crs_note = doc["crs_note"].get<std::string>();
  for (std::size_t i = 0; i < raw.size(); ++i) {
    set.partitions.push_back(
        make_partition(static_cast<PartitionId>(i), std::move(raw[i].label), std::move(raw[i].shape)));
  }
  return set;
}

inline PartitionSet load_partitions(const std::filesystem::path& path,
                                    const std::optional<Projection>& projection = std::nullopt) {
  auto doc = detail::read_json_file(path);
  try {
    return parse_partitions(doc, projection);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

/// Projection centred on the bounding box of a lon/lat GeoJSON file.
inline Projection projection_for(const std::filesystem::path& path) {
  auto doc = detail::read_json_file(path);
  BBox box;
  if (doc.contains("features") && doc["features"].is_array()) {
    for (const auto& f : doc["features"]) {
      if (f.contains("geometry") && f["geometry"].contains("coordinates")) {
        detail::for_each_position(f["geometry"]["coordinates"],
                                  [&](double lon, double lat) { box.expand(Point{lon, lat}); });
      }
    }
  }
  if (box.empty()) fail(ErrorKind::format, "no coordinates in '" + path.string() + "'");
  return Projection{(box.min_x + box.max_x) / 2, (box.min_y + box.max_y) / 2};
}

inline nlohmann::json partitions_to_geojson(const PartitionSet& set) {
  using detail::json;
  auto ring_json = [](const Ring& ring) {
    json r = json::array();
    for (const auto& p : ring) r.push_back({p.x, p.y});
    if (!ring.empty()) r.push_back({ring.front().x, ring.front().y});
    return r;
  };
  json features = json::array();
  for (const auto& part : set.partitions) {
    json id;
    long long numeric = 0;
    auto [ptr, ec] = std::from_chars(part.label.data(), part.label.data() + part.label.size(), numeric);
    if (ec == std::errc{} && ptr == part.label.data() + part.label.size()) {
      id = numeric;
    } else {
      id = part.label;
    }
    json polys = json::array();
    for (const auto& poly : part.boundary) {
      json rings = json::array();
      rings.push_back(ring_json(poly.outer));
      for (const auto& hole : poly.holes) rings.push_back(ring_json(hole));
      polys.push_back(std::move(rings));
    }
    json geometry = part.boundary.size() == 1
                        ? json{{"type", "Polygon"}, {"coordinates", polys[0]}}
                        : json{{"type", "MultiPolygon"}, {"coordinates", polys}};
    features.push_back({{"type", "Feature"}, {"properties", {{"id", id}}}, {"geometry", geometry}});
  }
  return json{{"type", "FeatureCollection"}, {"crs_note", set.crs_note}, {"features", features}};
}

}  // namespace rcm
