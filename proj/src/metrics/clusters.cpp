#include "va/metrics/clusters.hpp"

#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "va/core.hpp"

namespace va::metrics {

ClusterAssignment::ClusterAssignment(std::map<std::string, std::string, std::less<>> labels)
    : labels_(std::move(labels)) {
  for (const auto& [id, label] : labels_) members_[label].insert(id);
}

const std::string& ClusterAssignment::cluster_of(std::string_view id) const {
  auto it = labels_.find(id);
  if (it == labels_.end()) throw DomainError("item '" + std::string(id) + "' has no cluster");
  return it->second;
}

std::size_t ClusterAssignment::cluster_size(std::string_view label) const {
  auto it = members_.find(label);
  return it == members_.end() ? 0 : it->second.size();
}

DisjointSets::DisjointSets(std::size_t n) : parent_(n), size_(n, 1) {
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t DisjointSets::find(std::size_t x) {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

bool DisjointSets::unite(std::size_t a, std::size_t b) {
  a = find(a);
  b = find(b);
  if (a == b) return false;
  if (size_[a] < size_[b]) std::swap(a, b);
  parent_[b] = a;
  size_[a] += size_[b];
  return true;
}

ClusterAssignment clusters_from_duplicate_links(const DuplicateLinkGraph& graph) {
  std::unordered_map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < graph.ids.size(); ++i)
    if (!index.emplace(graph.ids[i], i).second) throw DomainError("duplicate item id '" + graph.ids[i] + "'");

  auto lookup = [&](const std::string& id) {
    auto it = index.find(id);
    if (it == index.end()) throw DomainError("duplicate link references unknown id '" + id + "'");
    return it->second;
  };

  DisjointSets sets(graph.ids.size());
  for (const auto& [from, to] : graph.edges) sets.unite(lookup(from), lookup(to));

  std::unordered_map<std::size_t, std::string> label;  // root -> smallest member id
  for (std::size_t i = 0; i < graph.ids.size(); ++i) {
    const std::size_t root = sets.find(i);
    if (sets.size_of(root) < 2) continue;
    auto [it, fresh] = label.try_emplace(root, graph.ids[i]);
    if (!fresh && graph.ids[i] < it->second) it->second = graph.ids[i];
  }

  std::map<std::string, std::string, std::less<>> labels;
  for (std::size_t i = 0; i < graph.ids.size(); ++i) {
    auto it = label.find(sets.find(i));
    if (it != label.end()) labels.emplace(graph.ids[i], it->second);
  }
  return ClusterAssignment(std::move(labels));
}

}  // namespace va::metrics
