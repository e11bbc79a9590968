#include "va/sortnet/sort.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

namespace va::sortnet {

using oracle::ComparisonQuery;
using oracle::Query;
using oracle::VoteConfig;

void to_json(nlohmann::json& j, const SortOutcome& o) {
  j = {{"order", o.order},
       {"comparisons_issued", o.comparisons_issued},
       {"layers_executed", o.layers_executed},
       {"wall_time", o.wall_time}};
}

void from_json(const nlohmann::json& j, SortOutcome& o) {
  j.at("order").get_to(o.order);
  j.at("comparisons_issued").get_to(o.comparisons_issued);
  j.at("layers_executed").get_to(o.layers_executed);
  j.at("wall_time").get_to(o.wall_time);
}

namespace {

std::vector<std::string> ids_in(std::span<const Item> items, std::span<const std::size_t> perm) {
  std::vector<std::string> out;
  out.reserve(perm.size());
  for (auto idx : perm) out.push_back(items[idx].id);
  return out;
}

}  // namespace

SortOutcome execute_network(const SortingNetwork& net, std::span<const Item> items, const Criteria& criteria,
                            oracle::Oracle& oracle, std::optional<VoteConfig> vote) {
  if (items.size() != net.size())
    throw DomainError("network expects " + std::to_string(net.size()) + " items, got " +
                      std::to_string(items.size()));
  const VoteConfig v = vote.value_or(VoteConfig(1));

  std::vector<std::size_t> wire(items.size());  // wire -> item index
  std::iota(wire.begin(), wire.end(), std::size_t{0});

  SortOutcome out;
  std::vector<Query> batch;
  for (std::size_t d = 0; d < net.depth(); ++d) {
    const auto& comparators = net.layers()[d].comparators;
    batch.clear();
    batch.reserve(comparators.size());
    for (const auto& c : comparators) batch.emplace_back(ComparisonQuery(criteria, items[wire[c.hi]], items[wire[c.lo]]));

    oracle::TimedAnswers answers;
    try {
      answers = oracle.dispatch_timed(batch, v);
    } catch (const oracle::BackendError& e) {
      throw e.with_context("bitonic layer " + std::to_string(d) + " (" + std::to_string(comparators.size()) +
                           " comparators)");
    }
    for (std::size_t i = 0; i < comparators.size(); ++i)
      if (!answers.values[i]) std::swap(wire[comparators[i].lo], wire[comparators[i].hi]);

    out.comparisons_issued += comparators.size() * v.k();
    out.wall_time += answers.seconds;
    ++out.layers_executed;
  }
  out.order = ids_in(items, wire);
  return out;
}

SortOutcome oracle_merge_sort(std::span<const Item> items, const Criteria& criteria, oracle::Oracle& oracle,
                              std::optional<VoteConfig> vote) {
  const VoteConfig v = vote.value_or(VoteConfig(1));
  const std::size_t n = items.size();
  std::vector<std::size_t> cur(n), next(n);
  std::iota(cur.begin(), cur.end(), std::size_t{0});

  SortOutcome out;
  auto left_beats_right = [&](std::size_t left, std::size_t right) {
    const Query q[] = {ComparisonQuery(criteria, items[left], items[right])};
    try {
      auto answers = oracle.dispatch_timed(q, v);
      out.comparisons_issued += v.k();
      out.wall_time += answers.seconds;
      return static_cast<bool>(answers.values.front());
    } catch (const oracle::BackendError& e) {
      throw e.with_context("merge sort comparison " + std::to_string(out.comparisons_issued / v.k()));
    }
  };

  for (std::size_t width = 1; width < n; width *= 2) {
    for (std::size_t begin = 0; begin < n; begin += 2 * width) {
      const std::size_t mid = std::min(begin + width, n);
      const std::size_t end = std::min(begin + 2 * width, n);
      std::size_t i = begin, j = mid, k = begin;
      while (i < mid && j < end) next[k++] = left_beats_right(cur[i], cur[j]) ? cur[j++] : cur[i++];
      while (i < mid) next[k++] = cur[i++];
      while (j < end) next[k++] = cur[j++];
    }
    std::swap(cur, next);
  }
  out.order = ids_in(items, cur);
  return out;
}

InvarianceViolations check_permutation_invariance(std::span<const std::string> input_ids,
                                                  std::span<const std::string> output_ids) {
  std::unordered_map<std::string_view, std::size_t> seen;
  for (const auto& id : output_ids) ++seen[id];
  InvarianceViolations v;
  for (const auto& [id, count] : seen) v.duplicates += count - 1;
  std::unordered_set<std::string_view> counted;
  for (const auto& id : input_ids)
    if (!seen.contains(id) && counted.insert(id).second) ++v.missing;
  return v;
}

}  // namespace va::sortnet
