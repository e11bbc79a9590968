#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace va::harness {

struct SeedRecord {
  std::uint64_t seed = 0;
  double metric = 0.0;          // tau_b for sorting, clustering score for clustering
  std::uint64_t queries = 0;    // comparisons, triplet samples or scoring prompts issued
  std::uint64_t batch_calls = 0;
  double wall_time = 0.0;       // oracle seconds (modeled for simulated backends)
  std::optional<std::uint64_t> duplicates;   // sort VAs only
  std::optional<std::uint64_t> missing;
  std::optional<std::uint64_t> flagged;      // scoring baselines: default-filled scores
  std::optional<double> violation_fraction;  // tste
  std::optional<double> baseline_wall_time;  // paired mergesort run
  std::optional<std::uint64_t> baseline_queries;
  std::optional<double> speedup;             // baseline_wall_time / wall_time

  friend bool operator==(const SeedRecord&, const SeedRecord&) = default;
};

struct Aggregate {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for a single value

  friend bool operator==(const Aggregate&, const Aggregate&) = default;
};

Aggregate aggregate(const std::vector<double>& values);

struct RunReport {
  std::string task;
  std::string algorithm;
  std::string metric_name;
  std::string dataset_digest;
  std::size_t item_count = 0;
  nlohmann::json config;
  std::vector<SeedRecord> seeds;
  Aggregate metric;
  std::optional<Aggregate> speedup;
  std::optional<double> theoretical_speedup;
  bool aborted = false;
  std::optional<std::uint64_t> failed_seed;
  std::optional<std::string> error;

  /// Recomputes `metric` and `speedup` from the per-seed records.
  void finalize();

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

void to_json(nlohmann::json& j, const SeedRecord& r);
void from_json(const nlohmann::json& j, SeedRecord& r);
void to_json(nlohmann::json& j, const RunReport& r);
void from_json(const nlohmann::json& j, RunReport& r);

enum class ReportFormat { json, table };

ReportFormat parse_report_format(std::string_view s);

/// json: sorted keys, two-space indent, trailing newline.
/// table: one row per seed, then a `mean ± sd` row.
std::string emit_report(const RunReport& report, ReportFormat format);

}  // namespace va::harness
