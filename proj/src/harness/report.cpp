#include "va/harness/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "va/core.hpp"

namespace va::harness {

namespace {

template <typename T>
void put_optional(nlohmann::json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <typename T>
void get_optional(const nlohmann::json& j, const char* key, std::optional<T>& v) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) {
    v = it->get<T>();
  } else {
    v.reset();
  }
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// Width in code points, so the "±" in the aggregate row lines up.
std::size_t display_width(const std::string& s) {
  std::size_t shown = 0;
  for (unsigned char c : s)
    if ((c & 0xC0) != 0x80) ++shown;
  return shown;
}

std::string pad(const std::string& s, std::size_t width, bool left) {
  const std::size_t shown = display_width(s);
  if (shown >= width) return s;
  const std::string fill(width - shown, ' ');
  return left ? s + fill : fill + s;
}

}  // namespace

Aggregate aggregate(const std::vector<double>& values) {
  Aggregate a;
  if (values.empty()) return a;
  const double n = static_cast<double>(values.size());
  a.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - a.mean) * (v - a.mean);
    a.stddev = std::sqrt(ss / (n - 1.0));
  }
  return a;
}

void RunReport::finalize() {
  std::vector<double> metrics;
  std::vector<double> speedups;
  for (const auto& s : seeds) {
    metrics.push_back(s.metric);
    if (s.speedup) speedups.push_back(*s.speedup);
  }
  metric = aggregate(metrics);
  if (!speedups.empty()) {
    speedup = aggregate(speedups);
  } else {
    speedup.reset();
  }
}

void to_json(nlohmann::json& j, const SeedRecord& r) {
  j = nlohmann::json{{"seed", r.seed},
                     {"metric", r.metric},
                     {"queries", r.queries},
                     {"batch_calls", r.batch_calls},
                     {"wall_time", r.wall_time}};
  put_optional(j, "duplicates", r.duplicates);
  put_optional(j, "missing", r.missing);
  put_optional(j, "flagged", r.flagged);
  put_optional(j, "violation_fraction", r.violation_fraction);
  put_optional(j, "baseline_wall_time", r.baseline_wall_time);
  put_optional(j, "baseline_queries", r.baseline_queries);
  put_optional(j, "speedup", r.speedup);
}

void from_json(const nlohmann::json& j, SeedRecord& r) {
  j.at("seed").get_to(r.seed);
  j.at("metric").get_to(r.metric);
  j.at("queries").get_to(r.queries);
  j.at("batch_calls").get_to(r.batch_calls);
  j.at("wall_time").get_to(r.wall_time);
  get_optional(j, "duplicates", r.duplicates);
  get_optional(j, "missing", r.missing);
  get_optional(j, "flagged", r.flagged);
  get_optional(j, "violation_fraction", r.violation_fraction);
  get_optional(j, "baseline_wall_time", r.baseline_wall_time);
  get_optional(j, "baseline_queries", r.baseline_queries);
  get_optional(j, "speedup", r.speedup);
}

void to_json(nlohmann::json& j, const RunReport& r) {
  j = nlohmann::json{{"task", r.task},
                     {"algorithm", r.algorithm},
                     {"metric_name", r.metric_name},
                     {"dataset_digest", r.dataset_digest},
                     {"item_count", r.item_count},
                     {"config", r.config},
                     {"seeds", r.seeds},
                     {"metric", {{"mean", r.metric.mean}, {"stddev", r.metric.stddev}}},
                     {"aborted", r.aborted}};
  if (r.speedup) j["speedup"] = {{"mean", r.speedup->mean}, {"stddev", r.speedup->stddev}};
  put_optional(j, "theoretical_speedup", r.theoretical_speedup);
  put_optional(j, "failed_seed", r.failed_seed);
  put_optional(j, "error", r.error);
}

void from_json(const nlohmann::json& j, RunReport& r) {
  j.at("task").get_to(r.task);
  j.at("algorithm").get_to(r.algorithm);
  j.at("metric_name").get_to(r.metric_name);
  j.at("dataset_digest").get_to(r.dataset_digest);
  j.at("item_count").get_to(r.item_count);
  r.config = j.at("config");
  j.at("seeds").get_to(r.seeds);
  j.at("metric").at("mean").get_to(r.metric.mean);
  j.at("metric").at("stddev").get_to(r.metric.stddev);
  j.at("aborted").get_to(r.aborted);
  if (auto it = j.find("speedup"); it != j.end()) {
    r.speedup = Aggregate{it->at("mean").get<double>(), it->at("stddev").get<double>()};
  } else {
    r.speedup.reset();
  }
  get_optional(j, "theoretical_speedup", r.theoretical_speedup);
  get_optional(j, "failed_seed", r.failed_seed);
  get_optional(j, "error", r.error);
}

ReportFormat parse_report_format(std::string_view s) {
  if (s == "json") return ReportFormat::json;
  if (s == "table") return ReportFormat::table;
  throw DomainError("unknown report format '" + std::string(s) + "'");
}

std::string emit_report(const RunReport& report, ReportFormat format) {
  if (format == ReportFormat::json) return nlohmann::json(report).dump(2) + "\n";

  const bool has_speedup =
      std::any_of(report.seeds.begin(), report.seeds.end(), [](const SeedRecord& s) { return s.speedup.has_value(); });
  std::vector<std::string> header{"seed", report.metric_name, "queries", "batches", "wall_time"};
  if (has_speedup) header.push_back("speedup");

  std::vector<std::vector<std::string>> rows;
  for (const auto& s : report.seeds) {
    std::vector<std::string> row{std::to_string(s.seed), fixed(s.metric, 4), std::to_string(s.queries),
                                 std::to_string(s.batch_calls), fixed(s.wall_time, 2)};
    if (has_speedup) row.push_back(s.speedup ? fixed(*s.speedup, 2) : "-");
    rows.push_back(std::move(row));
  }
  std::vector<std::string> agg{"mean ± sd", fixed(report.metric.mean, 4) + " ± " + fixed(report.metric.stddev, 4),
                               "", "", ""};
  if (has_speedup)
    agg.push_back(report.speedup ? fixed(report.speedup->mean, 2) + " ± " + fixed(report.speedup->stddev, 2) : "-");

  std::vector<std::size_t> width(header.size(), 0);
  auto measure = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], display_width(row[c]));
  };
  measure(header);
  for (const auto& r : rows) measure(r);
  measure(agg);

  auto line = [&](const std::vector<std::string>& row) {
    std::string out;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += "  ";
      out += pad(row[c], width[c], c == 0);
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out + "\n";
  };
  std::string rule;
  for (std::size_t c = 0; c < width.size(); ++c) rule += std::string(width[c] + (c ? 2 : 0), '-');

  std::string out = report.task + " / " + report.algorithm + " over " + std::to_string(report.item_count) +
                    " items (dataset " + report.dataset_digest + ")\n";
  out += line(header);
  out += rule + "\n";
  for (const auto& r : rows) out += line(r);
  out += rule + "\n";
  out += line(agg);
  if (report.theoretical_speedup) out += "theoretical speedup: " + fixed(*report.theoretical_speedup, 2) + "\n";
  if (report.aborted)
    out += "aborted at seed " + (report.failed_seed ? std::to_string(*report.failed_seed) : std::string("?")) + ": " +
           report.error.value_or("") + "\n";
  return out;
}

}  // namespace va::harness
