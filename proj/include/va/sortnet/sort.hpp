#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "va/core.hpp"
#include "va/oracle/oracle.hpp"
#include "va/sortnet/network.hpp"

namespace va::sortnet {

struct SortOutcome {
  std::vector<std::string> order;  // ids, ascending under the criteria
  std::uint64_t comparisons_issued = 0;
  std::uint64_t layers_executed = 0;
  double wall_time = 0.0;  // seconds of oracle time
};

void to_json(nlohmann::json& j, const SortOutcome& o);
void from_json(const nlohmann::json& j, SortOutcome& o);

/// Runs the network with the oracle as comparator. Each layer is one batch:
/// for a comparator (lo, hi) the oracle is asked whether the item on `hi`
/// beats the item on `lo`; "no" swaps them.
SortOutcome execute_network(const SortingNetwork& net, std::span<const Item> items, const Criteria& criteria,
                            oracle::Oracle& oracle, std::optional<oracle::VoteConfig> vote = std::nullopt);

/// Stable bottom-up merge sort with one oracle query per comparison.
/// When merging, the oracle is asked whether the left head beats the right
/// head; "no" keeps the left head first.
SortOutcome oracle_merge_sort(std::span<const Item> items, const Criteria& criteria, oracle::Oracle& oracle,
                              std::optional<oracle::VoteConfig> vote = std::nullopt);

struct InvarianceViolations {
  std::size_t duplicates = 0;
  std::size_t missing = 0;

  friend bool operator==(const InvarianceViolations&, const InvarianceViolations&) = default;
};

/// duplicates = sum over distinct output ids of (occurrences - 1);
/// missing = input ids absent from the output.
InvarianceViolations check_permutation_invariance(std::span<const std::string> input_ids,
                                                  std::span<const std::string> output_ids);

}  // namespace va::sortnet
