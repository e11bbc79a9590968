#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "va/core.hpp"

namespace va::harness {

struct DatasetRecord {
  std::string id;
  std::string text;
  std::optional<double> ordinal;                    // ground-truth rating (sorting)
  std::optional<std::string> cluster;               // ground-truth cluster label
  std::optional<std::vector<std::string>> duplicate_of;
  std::optional<std::vector<double>> coordinates;   // ground-truth geometry for simulated triplet oracles

  Item item() const { return Item(id, text); }
};

/// Malformed dataset file; carries the 1-based line number when known.
class DatasetError : public std::runtime_error {
 public:
  DatasetError(const std::string& what, std::size_t line)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// JSONL, one object per line with `id` and `text` plus optional
/// `ordinal`, `cluster`, `duplicate_of`, `coordinates`. Numeric ids are
/// accepted and stored in decimal form. Blank lines are skipped.
std::vector<DatasetRecord> load_dataset(const std::filesystem::path& path);
std::vector<DatasetRecord> parse_dataset(std::istream& in);

DatasetRecord record_from_json(const nlohmann::json& j);
nlohmann::json record_to_json(const DatasetRecord& r);

/// Order-independent digest of (id, text) pairs.
std::uint64_t dataset_digest(std::span<const DatasetRecord> records);

std::vector<Item> to_items(std::span<const DatasetRecord> records);

}  // namespace va::harness
