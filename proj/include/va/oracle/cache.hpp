#pragma once

#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

#include "va/oracle/query.hpp"

namespace va::oracle {

/// Thread-safe answer cache keyed by (kind, criteria, ids, sample index).
///
/// When opened on a file, existing records are replayed and every new
/// resolution is appended as one JSON line:
///   {"kind", "criteria", "first", "second", "third", "sample", "raw", "answer", "timestamp"}
class AnswerCache {
 public:
  AnswerCache() = default;
  explicit AnswerCache(const std::filesystem::path& jsonl);

  AnswerCache(const AnswerCache&) = delete;
  AnswerCache& operator=(const AnswerCache&) = delete;

  std::optional<bool> lookup(const QueryKey& key) const;

  /// Inserts unless the key is already present; returns the stored answer
  /// either way, so concurrent writers agree on a single value.
  bool insert(const QueryKey& key, const std::string& raw, bool answer);

  std::size_t size() const;

 private:
  void replay(const std::filesystem::path& jsonl);

  mutable std::mutex mutex_;
  std::unordered_map<QueryKey, bool, QueryKeyHash> entries_;
  std::optional<std::ofstream> sink_;
};

}  // namespace va::oracle
