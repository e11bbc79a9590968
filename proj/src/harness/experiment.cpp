#include "va/harness/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include <random>

#include "va/embed/jaccard.hpp"
#include "va/embed/mds.hpp"
#include "va/embed/triplets.hpp"
#include "va/embed/tste.hpp"
#include "va/harness/scoring.hpp"
#include "va/metrics/clustering_score.hpp"
#include "va/metrics/kendall.hpp"
#include "va/oracle/llm.hpp"
#include "va/oracle/oracle.hpp"
#include "va/oracle/simulated.hpp"
#include "va/sortnet/network.hpp"
#include "va/sortnet/sort.hpp"

namespace va::harness {

namespace {

// Stream tags, so the shuffle, noise, triplet and init streams of one seed
// are unrelated.
constexpr std::uint64_t kShuffleStream = 0x73687566666c65ULL;
constexpr std::uint64_t kNoiseStream = 0x6e6f697365ULL;
constexpr std::uint64_t kTripletStream = 0x747269706c6574ULL;
constexpr std::uint64_t kInitStream = 0x696e6974ULL;

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t digest, std::uint64_t stream) {
  return hash_combine(hash_combine(seed, digest), stream);
}

std::size_t bounded(std::mt19937_64& rng, std::size_t bound) {
  return static_cast<std::size_t>(bounded_draw(rng(), bound));
}

struct SeedResult {
  std::optional<SeedRecord> record;
  std::string error;
};

template <typename Fn>
std::vector<SeedResult> run_seeds(const ExperimentConfig& config, Fn&& fn) {
  std::vector<SeedResult> results(config.seeds.size());
  auto run_one = [&](std::size_t i) {
    try {
      results[i].record = fn(config.seeds[i]);
    } catch (const std::exception& e) {
      results[i].error = e.what();
    }
  };
  const std::size_t threads = std::min(config.seed_threads, config.seeds.size());
  if (threads <= 1) {
    // Sequential runs stop at the first failure, as the later seeds would be discarded.
    for (std::size_t i = 0; i < results.size(); ++i) {
      run_one(i);
      if (!results[i].record) break;
    }
    return results;
  }
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < results.size(); i = next++) run_one(i);
      });
  }
  return results;
}

RunReport assemble(RunReport report, const ExperimentConfig& config, std::vector<SeedResult> results) {
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!results[i].record) {
      report.aborted = true;
      report.failed_seed = config.seeds[i];
      report.error = results[i].error.empty() ? "seed not run" : results[i].error;
      break;
    }
    report.seeds.push_back(std::move(*results[i].record));
  }
  report.finalize();
  return report;
}

RunReport report_header(std::span<const DatasetRecord> records, const ExperimentConfig& config,
                        std::uint64_t digest, std::string metric_name) {
  RunReport r;
  r.task = std::string(to_string(config.task));
  r.algorithm = std::string(to_string(config.algorithm));
  r.metric_name = std::move(metric_name);
  r.dataset_digest = to_hex(digest);
  r.item_count = records.size();
  r.config = config_to_json(config);
  return r;
}

/// Backends shared by every seed of one run.
class BackendPool {
 public:
  BackendPool(const ExperimentConfig& config, const ExperimentHooks& hooks) : config_(config), hooks_(hooks) {
    if (config.oracle.kind == BackendKind::llm && !(hooks.backend && hooks.generator)) {
      llm_ = std::make_shared<oracle::LlmBackend>(config.oracle.llm);
    }
    if (config.oracle.kind == BackendKind::llm) {
      shared_cache_ = config.oracle.cache_path ? std::make_shared<oracle::AnswerCache>(*config.oracle.cache_path)
                                               : std::make_shared<oracle::AnswerCache>();
    }
  }

  /// Simulated runs get a private backend and cache per seed so each seed
  /// draws its own noise; LLM runs share both.
  oracle::Oracle oracle_for(std::uint64_t seed, const oracle::SimulatedOracleConfig& truth) const {
    std::shared_ptr<oracle::Backend> backend;
    if (hooks_.backend) {
      backend = hooks_.backend(seed);
    } else if (llm_) {
      backend = llm_;
    } else {
      oracle::SimulatedOracleConfig sim = truth;
      sim.flip_probability = config_.oracle.flip_probability;
      sim.call_latency = config_.oracle.call_latency;
      sim.max_batch = config_.oracle.max_batch;
      sim.seed = seed;
      backend = std::make_shared<oracle::SimulatedBackend>(std::move(sim));
    }
    if (shared_cache_) return oracle::Oracle(std::move(backend), shared_cache_);
    return oracle::Oracle(std::move(backend));
  }

  std::shared_ptr<oracle::TextGenerator> generator_for(std::uint64_t seed,
                                                       std::span<const DatasetRecord> records) const {
    if (hooks_.generator) return hooks_.generator(seed);
    if (llm_) return llm_;
    std::vector<SimulatedScorer::Entry> entries;
    entries.reserve(records.size());
    for (const auto& r : records) entries.push_back({r.text, r.ordinal.value_or(kMinScore)});
    return std::make_shared<SimulatedScorer>(std::move(entries), config_.oracle.score_noise, seed,
                                             config_.oracle.call_latency);
  }

 private:
  const ExperimentConfig& config_;
  const ExperimentHooks& hooks_;
  std::shared_ptr<oracle::LlmBackend> llm_;
  std::shared_ptr<oracle::AnswerCache> shared_cache_;
};

std::optional<oracle::VoteConfig> vote_of(const ExperimentConfig& config) {
  if (!config.vote_k) return std::nullopt;
  return oracle::VoteConfig(*config.vote_k);
}

/// Simplex coordinates: one axis per ground-truth label, so every item is at
/// distance 0 from its cluster mates and sqrt(2) from everything else.
std::unordered_map<std::string, std::vector<double>> label_coordinates(std::span<const DatasetRecord> records,
                                                                       const metrics::ClusterAssignment& truth) {
  std::map<std::string, std::size_t, std::less<>> axis;
  auto label_of = [&](const DatasetRecord& r) -> const std::string& {
    return truth.contains(r.id) ? truth.cluster_of(r.id) : r.id;
  };
  for (const auto& r : records) axis.emplace(label_of(r), 0);
  std::size_t next = 0;
  for (auto& [label, index] : axis) index = next++;
  std::unordered_map<std::string, std::vector<double>> coords;
  for (const auto& r : records) {
    std::vector<double> c(axis.size(), 0.0);
    c[axis.find(label_of(r))->second] = 1.0;
    coords.emplace(r.id, std::move(c));
  }
  return coords;
}

}  // namespace

std::vector<std::size_t> seed_permutation(std::size_t n, std::uint64_t seed, std::uint64_t digest) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::mt19937_64 rng(stream_seed(seed, digest, kShuffleStream));
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[bounded(rng, i)]);
  return perm;
}

metrics::ClusterAssignment ground_truth_clusters(std::span<const DatasetRecord> records) {
  const bool labeled = !records.empty() && std::all_of(records.begin(), records.end(),
                                                       [](const DatasetRecord& r) { return r.cluster.has_value(); });
  if (labeled) {
    std::map<std::string, std::size_t, std::less<>> sizes;
    for (const auto& r : records) ++sizes[*r.cluster];
    std::map<std::string, std::string, std::less<>> labels;
    for (const auto& r : records)
      if (sizes[*r.cluster] >= 2) labels.emplace(r.id, *r.cluster);
    return metrics::ClusterAssignment(std::move(labels));
  }
  const bool linked = std::any_of(records.begin(), records.end(),
                                  [](const DatasetRecord& r) { return r.duplicate_of && !r.duplicate_of->empty(); });
  if (!linked) throw DomainError("clustering needs a cluster label on every record or duplicate_of links");
  metrics::DuplicateLinkGraph graph;
  for (const auto& r : records) {
    graph.ids.push_back(r.id);
    if (r.duplicate_of)
      for (const auto& to : *r.duplicate_of) graph.edges.emplace_back(r.id, to);
  }
  return metrics::clusters_from_duplicate_links(graph);
}

RunReport run_sort_experiment(std::span<const DatasetRecord> records, const ExperimentConfig& config,
                              const ExperimentHooks& hooks) {
  config.validate();
  if (config.task != Task::sort) throw DomainError("run_sort_experiment needs a sort config");
  if (records.size() < 2) throw DomainError("sorting needs at least two records");
  std::map<std::string, double, std::less<>> truth;
  for (const auto& r : records) {
    if (!r.ordinal) throw DomainError("record '" + r.id + "' has no ordinal");
    truth.emplace(r.id, *r.ordinal);
  }

  const std::uint64_t digest = dataset_digest(records);
  const Criteria criteria(config.criteria);
  const auto vote = vote_of(config);
  const BackendPool pool(config, hooks);
  const std::vector<Item> items = to_items(records);
  std::vector<std::string> input_ids;
  for (const auto& it : items) input_ids.push_back(it.id);

  oracle::SimulatedOracleConfig sim_truth;
  for (const auto& [id, score] : truth) sim_truth.scores.emplace(id, score);

  std::optional<sortnet::SortingNetwork> network;
  if (config.algorithm == Algorithm::bitonic) network = sortnet::build_bitonic_network(items.size());

  std::optional<oracle::PromptRegistry> registry;
  if (config.algorithm == Algorithm::iid_scoring || config.algorithm == Algorithm::ar_scoring)
    registry = config.oracle.prompts_path ? oracle::PromptRegistry::load(*config.oracle.prompts_path)
                                          : oracle::PromptRegistry();

  auto run = [&](std::uint64_t seed) {
    std::vector<Item> shuffled;
    shuffled.reserve(items.size());
    for (auto i : seed_permutation(items.size(), seed, digest)) shuffled.push_back(items[i]);
    const std::uint64_t noise_seed = stream_seed(seed, digest, kNoiseStream);

    SeedRecord rec;
    rec.seed = seed;
    std::vector<std::string> order;
    if (is_verbalized_sort(config.algorithm)) {
      oracle::Oracle oracle = pool.oracle_for(noise_seed, sim_truth);
      sortnet::SortOutcome out = network ? sortnet::execute_network(*network, shuffled, criteria, oracle, vote)
                    : sortnet::oracle_merge_sort(shuffled, criteria, oracle, vote);
      rec.queries = out.comparisons_issued;
      rec.batch_calls = oracle.stats().batch_calls;
      rec.wall_time = out.wall_time;
      const auto inv = sortnet::check_permutation_invariance(input_ids, out.order);
      rec.duplicates = inv.duplicates;
      rec.missing = inv.missing;
      order = std::move(out.order);

      if (config.pair_with_mergesort) {
        oracle::Oracle baseline_oracle = pool.oracle_for(noise_seed, sim_truth);
        const auto base = sortnet::oracle_merge_sort(shuffled, criteria, baseline_oracle, vote);
        rec.baseline_queries = base.comparisons_issued;
        rec.baseline_wall_time = base.wall_time;
        if (rec.wall_time > 0.0) rec.speedup = base.wall_time / rec.wall_time;
      }
    } else {
      const auto generator = pool.generator_for(noise_seed, records);
      const ScoringOutcome out = config.algorithm == Algorithm::iid_scoring
                                     ? iid_scoring(shuffled, criteria, *generator, *registry,
                                                   config.oracle.llm.retry_limit)
                                     : ar_scoring(shuffled, criteria, *generator, *registry);
      rec.queries = out.requests;
      rec.batch_calls = out.calls;
      const auto* simulated = dynamic_cast<const SimulatedScorer*>(generator.get());
      rec.wall_time = simulated ? simulated->modeled_seconds() : out.wall_time;
      rec.flagged = out.flagged;
      order = out.order;
    }
    rec.metric = metrics::sort_quality(order, truth);
    return rec;
  };

  RunReport report = report_header(records, config, digest, "tau_b");
  if (network) report.theoretical_speedup = sortnet::theoretical_speedup(*network);
  return assemble(std::move(report), config, run_seeds(config, run));
}

RunReport run_cluster_experiment(std::span<const DatasetRecord> records, const ExperimentConfig& config,
                                 const ExperimentHooks& hooks) {
  config.validate();
  if (config.task != Task::cluster) throw DomainError("run_cluster_experiment needs a cluster config");
  const metrics::ClusterAssignment truth = ground_truth_clusters(records);
  if (truth.item_count() < 2) throw DomainError("ground truth has no cluster with two or more members");
  const auto n = records.size();
  if (static_cast<std::size_t>(config.tste.dims) >= n)
    throw DomainError("embedding dimension " + std::to_string(config.tste.dims) + " must be below the item count " +
                      std::to_string(n));

  const std::uint64_t digest = dataset_digest(records);
  const Criteria criteria(config.criteria);
  const auto vote = vote_of(config);
  const BackendPool pool(config, hooks);
  const std::vector<Item> items = to_items(records);

  // Only items in a non-singleton ground-truth cluster are scored.
  std::vector<Eigen::Index> scored_rows;
  std::vector<std::string> scored_ids;
  for (std::size_t i = 0; i < n; ++i)
    if (truth.contains(records[i].id)) {
      scored_rows.push_back(static_cast<Eigen::Index>(i));
      scored_ids.push_back(records[i].id);
    }

  oracle::SimulatedOracleConfig sim_truth;
  if (config.algorithm == Algorithm::tste && config.oracle.kind == BackendKind::simulated && !hooks.backend) {
    const bool has_coords = std::all_of(records.begin(), records.end(),
                                        [](const DatasetRecord& r) { return r.coordinates.has_value(); });
    if (has_coords) {
      for (const auto& r : records) sim_truth.coordinates.emplace(r.id, *r.coordinates);
    } else {
      sim_truth.coordinates = label_coordinates(records, truth);
    }
  }

  std::optional<embed::EmbeddingMatrix> jaccard_embedding;
  if (config.algorithm == Algorithm::jaccard_mds) {
    std::vector<std::string> texts;
    for (const auto& r : records) texts.push_back(r.text);
    jaccard_embedding = embed::classical_mds(embed::jaccard_distance_matrix(texts), config.tste.dims);
  }

  auto run = [&](std::uint64_t seed) {
    SeedRecord rec;
    rec.seed = seed;
    embed::EmbeddingMatrix emb;
    if (config.algorithm == Algorithm::tste) {
      oracle::Oracle oracle = pool.oracle_for(stream_seed(seed, digest, kNoiseStream), sim_truth);
      auto triplets = embed::sample_triplets(n, config.triplets_per_item, stream_seed(seed, digest, kTripletStream));
      auto answers =
          embed::collect_triplet_answers(oracle, items, criteria, std::move(triplets), config.triplets_per_item, vote);
      embed::TsteConfig tc = config.tste;
      tc.seed = stream_seed(seed, digest, kInitStream);
      auto fit = embed::fit_tste(std::move(answers), n, tc);
      const auto stats = oracle.stats();
      rec.queries = stats.queries_issued;
      rec.batch_calls = stats.batch_calls;
      rec.wall_time = stats.wall_time;
      rec.violation_fraction = fit.violation_fraction;
      emb = std::move(fit.embedding);
    } else {
      // Jaccard distances involve no oracle, so every seed sees the same embedding.
      emb = *jaccard_embedding;
    }
    embed::EmbeddingMatrix scored(static_cast<Eigen::Index>(scored_rows.size()), emb.cols());
    for (std::size_t i = 0; i < scored_rows.size(); ++i)
      scored.row(static_cast<Eigen::Index>(i)) = emb.row(scored_rows[i]);
    rec.metric = metrics::clustering_score(scored, scored_ids, truth);
    return rec;
  };

  RunReport report = report_header(records, config, digest, "clustering_score");
  return assemble(std::move(report), config, run_seeds(config, run));
}

RunReport run_experiment(std::span<const DatasetRecord> records, const ExperimentConfig& config,
                         const ExperimentHooks& hooks) {
  return config.task == Task::sort ? run_sort_experiment(records, config, hooks)
                                   : run_cluster_experiment(records, config, hooks);
}

}  // namespace va::harness
