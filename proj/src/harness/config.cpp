#include "va/harness/config.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

#include "va/core.hpp"

namespace va::harness {

namespace {

constexpr std::array<std::pair<Task, std::string_view>, 2> kTasks{{
    {Task::sort, "sort"},
    {Task::cluster, "cluster"},
}};

constexpr std::array<std::pair<Algorithm, std::string_view>, 6> kAlgorithms{{
    {Algorithm::bitonic, "bitonic"},
    {Algorithm::mergesort, "mergesort"},
    {Algorithm::iid_scoring, "iid_scoring"},
    {Algorithm::ar_scoring, "ar_scoring"},
    {Algorithm::tste, "tste"},
    {Algorithm::jaccard_mds, "jaccard_mds"},
}};

constexpr std::array<std::pair<BackendKind, std::string_view>, 2> kBackends{{
    {BackendKind::simulated, "simulated"},
    {BackendKind::llm, "llm"},
}};

std::string normalize(std::string_view s) {
  std::string out(s);
  std::replace(out.begin(), out.end(), '-', '_');
  return out;
}

template <typename E, std::size_t N>
std::string_view name_of(const std::array<std::pair<E, std::string_view>, N>& table, E value) noexcept {
  for (const auto& [e, name] : table)
    if (e == value) return name;
  return "?";
}

template <typename E, std::size_t N>
E value_of(const std::array<std::pair<E, std::string_view>, N>& table, std::string_view s, const char* what) {
  const std::string key = normalize(s);
  for (const auto& [e, name] : table)
    if (name == key) return e;
  throw DomainError(std::string("unknown ") + what + " '" + std::string(s) + "'");
}

}  // namespace

std::string_view to_string(Task t) noexcept { return name_of(kTasks, t); }
std::string_view to_string(Algorithm a) noexcept { return name_of(kAlgorithms, a); }
std::string_view to_string(BackendKind b) noexcept { return name_of(kBackends, b); }

Task parse_task(std::string_view s) { return value_of(kTasks, s, "task"); }
Algorithm parse_algorithm(std::string_view s) { return value_of(kAlgorithms, s, "algorithm"); }
BackendKind parse_backend(std::string_view s) { return value_of(kBackends, s, "oracle backend"); }

Task task_of(Algorithm a) noexcept {
  return a == Algorithm::tste || a == Algorithm::jaccard_mds ? Task::cluster : Task::sort;
}

bool is_verbalized_sort(Algorithm a) noexcept { return a == Algorithm::bitonic || a == Algorithm::mergesort; }

void ExperimentConfig::validate() const {
  if (task_of(algorithm) != task)
    throw DomainError("algorithm '" + std::string(to_string(algorithm)) + "' does not solve the " +
                      std::string(to_string(task)) + " task");
  if (seeds.empty()) throw DomainError("at least one seed is required");
  if (criteria.empty()) throw DomainError("criteria must not be empty");
  if (vote_k && (*vote_k == 0 || *vote_k % 2 == 0)) throw DomainError("vote K must be odd and positive");
  if (vote_k && !(is_verbalized_sort(algorithm) || algorithm == Algorithm::tste))
    throw DomainError("vote K applies to bitonic, mergesort and tste only");
  if (pair_with_mergesort && algorithm != Algorithm::bitonic)
    throw DomainError("a paired mergesort run needs the bitonic algorithm");
  if (oracle.flip_probability < 0.0 || oracle.flip_probability >= 0.5)
    throw DomainError("flip probability must lie in [0, 0.5)");
  if (oracle.score_noise < 0.0) throw DomainError("score noise must be non-negative");
  if (oracle.call_latency < 0.0) throw DomainError("call latency must be non-negative");
  if (algorithm == Algorithm::tste && triplets_per_item == 0) throw DomainError("triplets per item must be positive");
  if (task == Task::cluster) tste.validate();
  if (seed_threads == 0) throw DomainError("seed threads must be positive");
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json oracle{
      {"backend", to_string(c.oracle.kind)},
  };
  if (c.oracle.kind == BackendKind::simulated) {
    oracle["flip_probability"] = c.oracle.flip_probability;
    oracle["score_noise"] = c.oracle.score_noise;
    oracle["call_latency"] = c.oracle.call_latency;
    oracle["max_batch"] = c.oracle.max_batch;
  } else {
    oracle["endpoint_url"] = c.oracle.llm.endpoint_url;
    oracle["model_name"] = c.oracle.llm.model_name;
    oracle["temperature"] = c.oracle.llm.temperature;
    oracle["max_output_tokens"] = c.oracle.llm.max_output_tokens;
    oracle["retry_limit"] = c.oracle.llm.retry_limit;
  }
  nlohmann::json j{
      {"task", to_string(c.task)},
      {"algorithm", to_string(c.algorithm)},
      {"oracle", std::move(oracle)},
      {"seeds", c.seeds},
      {"criteria_digest", to_hex(Criteria(c.criteria).digest())},
  };
  if (c.vote_k) j["vote_k"] = *c.vote_k;
  if (c.pair_with_mergesort) j["paired_with"] = "mergesort";
  if (c.algorithm == Algorithm::tste) {
    j["triplets_per_item"] = c.triplets_per_item;
    j["tste"] = {{"alpha", c.tste.resolved_alpha()},
                 {"learning_rate", c.tste.learning_rate},
                 {"max_iters", c.tste.max_iters},
                 {"tolerance", c.tste.tolerance}};
  }
  if (c.task == Task::cluster) j["dims"] = c.tste.dims;
  return j;
}

std::string read_criteria(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open criteria file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string s = ss.str();
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw DomainError("criteria file " + path.string() + " is empty");
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace va::harness
