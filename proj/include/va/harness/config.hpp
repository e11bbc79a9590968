#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "va/embed/tste.hpp"
#include "va/oracle/llm.hpp"

namespace va::harness {

enum class Task { sort, cluster };
enum class Algorithm { bitonic, mergesort, iid_scoring, ar_scoring, tste, jaccard_mds };
enum class BackendKind { simulated, llm };

std::string_view to_string(Task t) noexcept;
std::string_view to_string(Algorithm a) noexcept;
std::string_view to_string(BackendKind b) noexcept;

/// Accepts both `iid_scoring` and `iid-scoring` spellings.
Task parse_task(std::string_view s);
Algorithm parse_algorithm(std::string_view s);
BackendKind parse_backend(std::string_view s);

Task task_of(Algorithm a) noexcept;
bool is_verbalized_sort(Algorithm a) noexcept;

struct OracleBackendConfig {
  BackendKind kind = BackendKind::simulated;
  /// Simulated comparison/triplet answers are flipped with this probability.
  double flip_probability = 0.0;
  /// Standard deviation of the simulated scorer's Gaussian score noise.
  double score_noise = 0.0;
  /// Modeled seconds per simulated backend call.
  double call_latency = 1.0;
  /// Requests per modeled simulated call; 0 is unlimited.
  std::size_t max_batch = 0;
  oracle::LlmConfig llm;
  /// JSONL answer cache shared by all seeds of an LLM run.
  std::optional<std::filesystem::path> cache_path;
  /// Overrides for the scoring prompt templates.
  std::optional<std::filesystem::path> prompts_path;
};

struct ExperimentConfig {
  Task task = Task::sort;
  Algorithm algorithm = Algorithm::bitonic;
  OracleBackendConfig oracle;
  std::optional<std::uint32_t> vote_k;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::string criteria;
  /// Also run mergesort on every seed's shuffle and report the speedup (bitonic only).
  bool pair_with_mergesort = false;
  /// Triplets anchored at each item.
  std::size_t triplets_per_item = 100;
  /// Embedding dimension for tste and jaccard_mds; tste.dims is kept in sync.
  embed::TsteConfig tste;
  /// Seeds run on up to this many threads.
  std::size_t seed_threads = 1;

  /// Throws DomainError on an incompatible or out-of-range setting.
  void validate() const;
};

/// Provenance view of the config; secrets (the API key) never appear.
nlohmann::json config_to_json(const ExperimentConfig& c);

/// Reads a criteria file, trimming surrounding whitespace.
std::string read_criteria(const std::filesystem::path& path);

}  // namespace va::harness
