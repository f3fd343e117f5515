#pragma once

#include <boost/tokenizer.hpp>

#include <algorithm>
#include <cctype>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rcm/error.hpp"
#include "rcm/spatial_types.hpp"

namespace rcm {

/// Which CSV columns hold the feature label and the coordinates.
struct InstanceSchema {
  std::string feature_column = "feature";
  std::string x_column = "x";  // longitude when `lonlat` is set
  std::string y_column = "y";  // latitude when `lonlat` is set
  bool lonlat = false;
  Projection projection;  // used only when `lonlat` is set
};

struct RowError {
  std::size_t line = 0;  // 1-based, header is line 1
  std::string message;
};

struct InstanceTable {
  FeatureRegistry features;
  std::vector<FeatureInstance> instances;
  std::vector<RowError> row_errors;

  bool ok() const { return row_errors.empty(); }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  using Tokenizer = boost::tokenizer<boost::escaped_list_separator<char>>;
  // Backslash is not an escape character in ordinary CSV.
  boost::escaped_list_separator<char> sep(std::string(), std::string(","), std::string("\""));
  Tokenizer tok(line, sep);
  return {tok.begin(), tok.end()};
}

inline std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

inline std::optional<double> parse_double(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) return std::nullopt;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

}  // namespace detail

/// Reads feature instances from CSV. Column problems throw; per-row problems
/// are collected in `row_errors` and the offending rows are dropped.
inline InstanceTable read_instances(std::istream& in, const InstanceSchema& schema) {
  std::string line;
  if (!std::getline(in, line)) {
    fail(ErrorKind::schema, "instances CSV has no header row");
  }
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> header;
  try {
    header = detail::split_csv_line(line);
  } catch (const boost::escaped_list_error& e) {
    fail(ErrorKind::schema, std::string("malformed header: ") + e.what());
  }
  auto column = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (detail::trim(header[i]) == name) return i;
    }
    fail(ErrorKind::schema, "missing column '" + name + "' in instances CSV header");
  };
  const std::size_t feature_col = column(schema.feature_column);
  const std::size_t x_col = column(schema.x_column);
  const std::size_t y_col = column(schema.y_column);
  const std::size_t needed = std::max({feature_col, x_col, y_col}) + 1;

  struct Row {
    std::string feature;
    Point location;
  };
  std::vector<Row> rows;
  InstanceTable table;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    std::vector<std::string> fields;
    try {
      fields = detail::split_csv_line(line);
    } catch (const boost::escaped_list_error& e) {
      table.row_errors.push_back({line_no, std::string("malformed CSV: ") + e.what()});
      continue;
    }
    if (fields.size() < needed) {
      table.row_errors.push_back({line_no, "expected at least " + std::to_string(needed) +
                                               " fields, got " + std::to_string(fields.size())});
      continue;
    }
    std::string feature = detail::trim(fields[feature_col]);
    if (feature.empty()) {
      table.row_errors.push_back({line_no, "empty feature label"});
      continue;
    }
    auto x = detail::parse_double(fields[x_col]);
    auto y = detail::parse_double(fields[y_col]);
    if (!x || !y) {
      table.row_errors.push_back(
          {line_no, "non-numeric coordinate in column '" +
                        (x ? schema.y_column : schema.x_column) + "'"});
      continue;
    }
    Point p = schema.lonlat ? schema.projection.project(*x, *y) : Point{*x, *y};
    rows.push_back({std::move(feature), p});
  }

  std::vector<std::string> names;
  names.reserve(rows.size());
  for (const auto& r : rows) names.push_back(r.feature);
  table.features = FeatureRegistry(std::move(names));
  table.instances.reserve(rows.size());
  for (const auto& r : rows) {
    table.instances.push_back(FeatureInstance{table.features.id(r.feature), r.location, kOutside});
  }
  return table;
}

inline InstanceTable load_instances(const std::filesystem::path& path, const InstanceSchema& schema) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open instances file '" + path.string() + "'");
  return read_instances(in, schema);
}

/// Writes instances as `feature,x,y` with round-trip precision.
inline void write_instances(std::ostream& out, const std::vector<FeatureInstance>& instances,
                            const FeatureRegistry& features) {
  out << "feature,x,y\n";
  char buf[64];
  auto num = [&](double v) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
  };
  for (const auto& inst : instances) {
    const auto& name = features.name(inst.feature);
    if (name.find(',') != std::string::npos) {
      // The reader has no escape for embedded quotes, so they become apostrophes.
      std::string quoted = name;
      std::replace(quoted.begin(), quoted.end(), '"', '\'');
      out << '"' << quoted << '"';
    } else {
      out << name;
    }
    out << ',' << num(inst.location.x) << ',' << num(inst.location.y) << '\n';
  }
}

}  // namespace rcm
