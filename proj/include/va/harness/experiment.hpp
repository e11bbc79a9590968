#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "va/harness/config.hpp"
#include "va/harness/dataset.hpp"
#include "va/harness/report.hpp"
#include "va/metrics/clusters.hpp"
#include "va/oracle/backend.hpp"
#include "va/oracle/cache.hpp"

namespace va::harness {

/// Deterministic permutation of 0..n-1 for one seed; a pure function of
/// (seed, digest) that does not depend on the standard library's shuffle.
std::vector<std::size_t> seed_permutation(std::size_t n, std::uint64_t seed, std::uint64_t digest);

/// Ground-truth clusters of a dataset: `cluster` labels when every record has
/// one, otherwise the components of the `duplicate_of` graph. Singleton
/// clusters are dropped, since the clustering score is undefined for them.
metrics::ClusterAssignment ground_truth_clusters(std::span<const DatasetRecord> records);

/// Per-seed backend factories. Unset members fall back to what the config
/// describes; tests use them to inject failing or instrumented backends.
struct ExperimentHooks {
  std::function<std::shared_ptr<oracle::Backend>(std::uint64_t seed)> backend;
  std::function<std::shared_ptr<oracle::TextGenerator>(std::uint64_t seed)> generator;
};

/// Runs the configured sorting algorithm once per seed on a seed-specific
/// shuffle of the records. The first failing seed (in seed order) stops the
/// run; the report then holds the seeds before it plus the error.
RunReport run_sort_experiment(std::span<const DatasetRecord> records, const ExperimentConfig& config,
                              const ExperimentHooks& hooks = {});

/// Fits one embedding per seed and scores it against the ground-truth
/// clusters. Failure handling matches run_sort_experiment.
RunReport run_cluster_experiment(std::span<const DatasetRecord> records, const ExperimentConfig& config,
                                 const ExperimentHooks& hooks = {});

/// Dispatches on config.task.
RunReport run_experiment(std::span<const DatasetRecord> records, const ExperimentConfig& config,
                         const ExperimentHooks& hooks = {});

}  // namespace va::harness
