#pragma once

#include "json.hpp"

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rcm/miners.hpp"
#include "rcm/rational.hpp"
#include "rcm/spatial_types.hpp"

namespace rcm {

using json = nlohmann::json;

/// 64-bit FNV-1a; stable across platforms, used for config and data hashes.
inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string config_hash(const json& config) { return hex64(fnv1a(config.dump())); }

inline std::vector<std::string> candidate_names(const Candidate& c, const FeatureRegistry& features) {
  std::vector<std::string> out;
  for (auto f : c.features()) out.push_back(features.name(f));
  return out;
}

inline json counters_to_json(const CostCounters& c) {
  json exact = json::array();
  json values = json::array();
  for (const auto& t : c.threshold_history) {
    exact.push_back(to_string(t));
    values.push_back(to_double(t));
  }
  return json{{"significance_tests", c.significance_tests},
              {"pi_computations", c.pi_computations},
              {"null_pi_computations", c.null_pi_computations},
              {"threshold_comparisons", c.threshold_comparisons},
              {"threshold_history", exact},
              {"threshold_history_values", values}};
}

inline json atomic_to_json(const AtomicResult& a, const PartitionSet& partitions) {
  return json{{"id", a.partition},
              {"partition", partitions[a.partition].label},
              {"pi", to_double(a.pi)},
              {"pi_exact", to_string(a.pi)},
              {"p_value", to_double(a.p_value)},
              {"p_exact", to_string(a.p_value)},
              {"exceed_count", a.exceed_count},
              {"significant", a.significant}};
}

inline json pattern_to_json(const RegionalPattern& p, const PartitionSet& partitions,
                            const FeatureRegistry& features) {
  json region = json::array();
  for (auto g : p.region) region.push_back(partitions[g].label);
  json members = json::array();
  for (const auto& a : p.per_partition) members.push_back(atomic_to_json(a, partitions));
  json out{{"method", to_string(p.method)},
           {"candidate", candidate_names(p.candidate, features)},
           {"d", p.d},
           {"n", p.n},
           {"largest", p.largest},
           {"region", region},
           {"partitions", members},
           {"warnings", p.warnings}};
  out["region_pi"] = p.region_pi ? json(to_double(*p.region_pi)) : json(nullptr);
  out["region_p_value"] = p.region_p_value ? json(to_double(*p.region_p_value)) : json(nullptr);
  return out;
}

/// Full mining result document. `config` is embedded verbatim together with
/// its hash; it must not contain settings (such as thread count) that do not
/// affect the results.
inline json report_to_json(const std::vector<MineReport>& reports, const PartitionSet& partitions,
                           const FeatureRegistry& features, const json& config, std::uint64_t seed) {
  json jobs = json::array();
  json warnings = json::array();
  std::size_t simulations = 0;
  for (const auto& report : reports) {
    simulations = report.simulations;
    for (const auto& w : report.warnings) warnings.push_back(w);
    for (const auto& job : report.jobs) {
      json atomic = json::array();
      for (const auto& a : job.atomic) atomic.push_back(atomic_to_json(a, partitions));
      json patterns = json::array();
      for (const auto& p : job.patterns) patterns.push_back(pattern_to_json(p, partitions, features));
      jobs.push_back({{"method", to_string(job.method)},
                      {"candidate", candidate_names(job.candidate, features)},
                      {"d", job.d},
                      {"counters", counters_to_json(job.counters)},
                      {"atomic", atomic},
                      {"patterns", patterns}});
    }
  }
  return json{{"format", "rcm-patterns/1"},
              {"config", config},
              {"config_hash", config_hash(config)},
              {"seed", seed},
              {"simulations", simulations},
              {"warnings", warnings},
              {"jobs", jobs}};
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace detail

/// "Carver (0.50,0.02); Hennepin (0.51,0.01)".
inline std::string describe_partitions(const RegionalPattern& p, const PartitionSet& partitions) {
  std::string out;
  for (const auto& a : p.per_partition) {
    if (!out.empty()) out += "; ";
    out += partitions[a.partition].label + " (" + detail::fixed2(to_double(a.pi)) + "," +
           detail::fixed2(to_double(a.p_value)) + ")";
  }
  return out;
}

/// One row per emitted regional pattern.
inline void write_summary_csv(std::ostream& out, const std::vector<MineReport>& reports,
                              const PartitionSet& partitions, const FeatureRegistry& features,
                              const std::string& config_hash_hex, std::uint64_t seed) {
  out << "config_hash,seed,method,candidate,d,n,largest,partitions,region_pi,region_p_value\n";
  for (const auto& report : reports) {
    for (const auto& job : report.jobs) {
      for (const auto& p : job.patterns) {
        std::string cand;
        for (const auto& n : candidate_names(p.candidate, features)) cand += (cand.empty() ? "" : "|") + n;
        out << config_hash_hex << ',' << seed << ',' << to_string(p.method) << ','
            << detail::csv_field(cand) << ',' << detail::num(p.d) << ',' << p.n << ','
            << (p.largest ? "true" : "false") << ',' << detail::csv_field(describe_partitions(p, partitions))
            << ',' << (p.region_pi ? detail::num(to_double(*p.region_pi)) : "") << ','
            << (p.region_p_value ? detail::num(to_double(*p.region_p_value)) : "") << '\n';
      }
    }
  }
}

/// One row per (method, candidate, d) job.
inline void write_counters_csv(std::ostream& out, const std::vector<MineReport>& reports,
                               const FeatureRegistry& features, const std::string& config_hash_hex,
                               std::uint64_t seed) {
  out << "config_hash,seed,method,candidate,d,significance_tests,pi_computations,"
         "null_pi_computations,threshold_comparisons,threshold_history\n";
  for (const auto& report : reports) {
    for (const auto& job : report.jobs) {
      std::string cand;
      for (const auto& n : candidate_names(job.candidate, features)) cand += (cand.empty() ? "" : "|") + n;
      std::string history;
      for (const auto& t : job.counters.threshold_history) history += (history.empty() ? "" : " ") + to_string(t);
      out << config_hash_hex << ',' << seed << ',' << to_string(job.method) << ','
          << detail::csv_field(cand) << ',' << detail::num(job.d) << ','
          << job.counters.significance_tests << ',' << job.counters.pi_computations << ','
          << job.counters.null_pi_computations << ',' << job.counters.threshold_comparisons << ','
          << history << '\n';
    }
  }
}

}  // namespace rcm
