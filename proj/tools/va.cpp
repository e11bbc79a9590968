// va: run verbalized sorting and clustering experiments, or inspect bitonic networks.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "va/harness/config.hpp"
#include "va/harness/dataset.hpp"
#include "va/harness/experiment.hpp"
#include "va/harness/report.hpp"
#include "va/sortnet/network.hpp"

namespace {

using va::harness::Algorithm;
using va::harness::ExperimentConfig;
using va::harness::Task;

/// Config files may be TOML (CLI11's native reader) or a JSON object. Nested
/// JSON objects become dotted sections, arrays become multi-valued options.
class JsonOrTomlConfig : public CLI::ConfigTOML {
 public:
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    std::string text((std::istreambuf_iterator<char>(input)), std::istreambuf_iterator<char>());
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos || text[first] != '{') {
      std::istringstream toml(text);
      return CLI::ConfigTOML::from_config(toml);
    }
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw CLI::ConversionError(std::string("config: ") + e.what());
    }
    std::vector<CLI::ConfigItem> items;
    flatten(j, {}, items);
    return items;
  }

 private:
  static std::string scalar(const nlohmann::json& v) {
    return v.is_string() ? v.get<std::string>() : v.dump();
  }

  static void flatten(const nlohmann::json& obj, const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& out) {
    for (const auto& [key, value] : obj.items()) {
      if (value.is_object()) {
        auto nested = parents;
        nested.push_back(key);
        flatten(value, nested, out);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      out.push_back(std::move(item));
    }
  }
};

struct CommonArgs {
  std::filesystem::path input;
  std::filesystem::path criteria;
  std::string algorithm;
  std::string oracle = "simulated";
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::optional<std::filesystem::path> output;
  std::string format = "json";
  std::optional<std::uint32_t> vote_k;
  double flip_prob = 0.0;
  double call_latency = 1.0;
  std::size_t max_batch = 0;
  std::size_t seed_threads = 1;
  std::optional<std::filesystem::path> cache;
  // LLM backend
  std::string endpoint = "http://localhost:8000/v1";
  std::string model;
  double temperature = 0.6;
  std::uint32_t max_tokens = 4096;
  double timeout_s = 300.0;
  std::uint32_t retry_limit = 3;
  std::string api_key_env = "OPENAI_API_KEY";
  std::size_t max_concurrency = 16;
};

void add_common(CLI::App& cmd, CommonArgs& a, const std::string& algorithms) {
  cmd.set_config("--config", "", "TOML or JSON file with option defaults; flags override it");
  cmd.add_option("--input", a.input, "JSONL dataset")->required()->check(CLI::ExistingFile);
  cmd.add_option("--criteria", a.criteria, "Text file with the comparison criteria")
      ->required()
      ->check(CLI::ExistingFile);
  cmd.add_option("--algorithm", a.algorithm, algorithms)->required();
  cmd.add_option("--oracle", a.oracle, "simulated|llm")->check(CLI::IsMember({"simulated", "llm"}));
  cmd.add_option("--seeds", a.seeds, "Comma-separated 64-bit seeds")->delimiter(',');
  cmd.add_option("--output", a.output, "Report path (stdout when omitted)");
  cmd.add_option("--format", a.format, "json|table")->check(CLI::IsMember({"json", "table"}));
  cmd.add_option("--vote-k", a.vote_k, "Majority vote over K samples per query (odd)");
  cmd.add_option("--seed-threads", a.seed_threads, "Seeds run concurrently")->check(CLI::PositiveNumber);
  cmd.add_option("--cache", a.cache, "JSONL answer cache for the LLM backend");

  auto* sim = cmd.add_option_group("simulated oracle");
  sim->add_option("--flip-prob", a.flip_prob, "Probability of flipping each answer")->check(CLI::Range(0.0, 0.5));
  sim->add_option("--call-latency", a.call_latency, "Modeled seconds per backend call")
      ->check(CLI::NonNegativeNumber);
  sim->add_option("--max-batch", a.max_batch, "Requests per modeled call (0 = unlimited)");

  auto* llm = cmd.add_option_group("llm oracle");
  llm->add_option("--endpoint", a.endpoint, "OpenAI-compatible base URL");
  llm->add_option("--model", a.model, "Model name");
  llm->add_option("--temperature", a.temperature, "Sampling temperature")->check(CLI::NonNegativeNumber);
  llm->add_option("--max-tokens", a.max_tokens, "Max output tokens");
  llm->add_option("--timeout", a.timeout_s, "Per-request timeout in seconds")->check(CLI::PositiveNumber);
  llm->add_option("--retry-limit", a.retry_limit, "Retries for unparseable or failed requests");
  llm->add_option("--api-key-env", a.api_key_env, "Environment variable holding the API key");
  llm->add_option("--max-concurrency", a.max_concurrency, "Concurrent requests")->check(CLI::PositiveNumber);
}

ExperimentConfig build_config(const CommonArgs& a, Task task) {
  ExperimentConfig c;
  c.task = task;
  c.algorithm = va::harness::parse_algorithm(a.algorithm);
  c.oracle.kind = va::harness::parse_backend(a.oracle);
  c.oracle.flip_probability = a.flip_prob;
  c.oracle.call_latency = a.call_latency;
  c.oracle.max_batch = a.max_batch;
  c.oracle.cache_path = a.cache;
  c.oracle.llm.endpoint_url = a.endpoint;
  c.oracle.llm.model_name = a.model;
  c.oracle.llm.temperature = a.temperature;
  c.oracle.llm.max_output_tokens = a.max_tokens;
  c.oracle.llm.timeout = std::chrono::milliseconds(static_cast<std::int64_t>(a.timeout_s * 1000.0));
  c.oracle.llm.retry_limit = a.retry_limit;
  c.oracle.llm.api_key_env = a.api_key_env;
  c.oracle.llm.max_concurrency = a.max_concurrency;
  c.vote_k = a.vote_k;
  c.seeds = a.seeds;
  c.seed_threads = a.seed_threads;
  c.criteria = va::harness::read_criteria(a.criteria);
  return c;
}

int emit(const va::harness::RunReport& report, const CommonArgs& a) {
  const std::string text = va::harness::emit_report(report, va::harness::parse_report_format(a.format));
  if (a.output) {
    std::ofstream out(*a.output, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + a.output->string());
    out << text;
  } else {
    std::cout << text;
  }
  if (report.aborted) {
    std::cerr << "va: run aborted at seed " << report.failed_seed.value_or(0) << ": " << report.error.value_or("")
              << "\n";
    return 2;
  }
  return 0;
}

int run_network(std::size_t n, const std::optional<std::filesystem::path>& emit_path, bool verify) {
  const auto net = va::sortnet::build_bitonic_network(n);
  std::printf("n=%zu depth=%zu comparators=%zu theoretical_speedup=%.4f\n", net.size(), net.depth(),
              net.comparator_count(), va::sortnet::theoretical_speedup(net));
  if (emit_path) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& layer : net.layers()) {
      nlohmann::json l = nlohmann::json::array();
      for (const auto& c : layer.comparators) l.push_back({c.lo, c.hi});
      layers.push_back(std::move(l));
    }
    nlohmann::json doc{{"n", net.size()},
                       {"depth", net.depth()},
                       {"comparators", net.comparator_count()},
                       {"layers", std::move(layers)}};
    std::ofstream out(*emit_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + emit_path->string());
    out << doc.dump(2) << "\n";
  }
  if (verify) {
    if (n > va::sortnet::kVerifyMaxInputs)
      throw va::DomainError("exhaustive verification is limited to n <= " +
                            std::to_string(va::sortnet::kVerifyMaxInputs));
    const bool ok = va::sortnet::verify_network(net);
    std::printf("verify: %s\n", ok ? "sorts all 0-1 inputs" : "FAILED");
    return ok ? 0 : 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verbalized sorting and clustering experiments"};
  app.config_formatter(std::make_shared<JsonOrTomlConfig>());
  app.require_subcommand(1);

  CommonArgs sort_args;
  auto* sort_cmd = app.add_subcommand("sort", "Sort a dataset and score the order against its ordinals");
  add_common(*sort_cmd, sort_args, "bitonic|mergesort|iid-scoring|ar-scoring");
  bool paired = false;
  double score_noise = 0.0;
  std::optional<std::filesystem::path> prompts;
  sort_cmd->add_flag("--paired-mergesort", paired, "Also run mergesort per seed and report the bitonic speedup");
  sort_cmd->add_option("--score-noise", score_noise, "Gaussian noise of the simulated scorer")
      ->check(CLI::NonNegativeNumber);
  sort_cmd->add_option("--prompts", prompts, "JSON registry overriding the scoring prompt templates")
      ->check(CLI::ExistingFile);

  CommonArgs cluster_args;
  auto* cluster_cmd = app.add_subcommand("cluster", "Embed a dataset and score it against its clusters");
  add_common(*cluster_cmd, cluster_args, "tste|jaccard-mds");
  std::size_t triplets_per_item = 100;
  long dims = 8;
  std::optional<double> alpha;
  int max_iters = 2000;
  double learning_rate = 1.0;
  double tolerance = 1e-7;
  cluster_cmd->add_option("--triplets-per-item", triplets_per_item, "Triplets anchored at each item (k)");
  cluster_cmd->add_option("--dims", dims, "Embedding dimension D");
  cluster_cmd->add_option("--alpha", alpha, "Student-t degrees of freedom (default D - 1)");
  cluster_cmd->add_option("--max-iters", max_iters, "t-STE iteration cap");
  cluster_cmd->add_option("--learning-rate", learning_rate, "Initial t-STE step size");
  cluster_cmd->add_option("--tolerance", tolerance, "Relative objective change that stops t-STE");

  std::size_t n = 0;
  std::optional<std::filesystem::path> emit_path;
  bool verify = false;
  auto* net_cmd = app.add_subcommand("network", "Build, print and verify a bitonic sorting network");
  net_cmd->add_option("--n", n, "Number of inputs")->required()->check(CLI::PositiveNumber);
  net_cmd->add_option("--emit", emit_path, "Write the layers as JSON");
  net_cmd->add_flag("--verify", verify, "Check the 0-1 principle exhaustively (n <= 24)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*net_cmd) return run_network(n, emit_path, verify);

    const bool sorting = static_cast<bool>(*sort_cmd);
    const CommonArgs& args = sorting ? sort_args : cluster_args;
    ExperimentConfig config = build_config(args, sorting ? Task::sort : Task::cluster);
    if (sorting) {
      config.pair_with_mergesort = paired;
      config.oracle.score_noise = score_noise;
      config.oracle.prompts_path = prompts;
    } else {
      config.triplets_per_item = triplets_per_item;
      config.tste.dims = dims;
      config.tste.alpha = alpha;
      config.tste.max_iters = max_iters;
      config.tste.learning_rate = learning_rate;
      config.tste.tolerance = tolerance;
    }
    const auto records = va::harness::load_dataset(args.input);
    return emit(va::harness::run_experiment(records, config), args);
  } catch (const std::exception& e) {
    std::cerr << "va: " << e.what() << "\n";
    return 1;
  }
}
