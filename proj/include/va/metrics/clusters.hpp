#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace va::metrics {

/// Item id -> cluster label, with the inverse view precomputed.
class ClusterAssignment {
 public:
  ClusterAssignment() = default;
  explicit ClusterAssignment(std::map<std::string, std::string, std::less<>> labels);

  const std::string& cluster_of(std::string_view id) const;
  bool contains(std::string_view id) const { return labels_.find(id) != labels_.end(); }
  std::size_t cluster_size(std::string_view label) const;
  std::size_t item_count() const noexcept { return labels_.size(); }

  const std::map<std::string, std::string, std::less<>>& labels() const noexcept { return labels_; }
  /// label -> member ids (sorted)
  const std::map<std::string, std::set<std::string>, std::less<>>& clusters() const noexcept { return members_; }

  friend bool operator==(const ClusterAssignment& a, const ClusterAssignment& b) { return a.labels_ == b.labels_; }

 private:
  std::map<std::string, std::string, std::less<>> labels_;
  std::map<std::string, std::set<std::string>, std::less<>> members_;
};

/// Directed "duplicate_of" links between item ids.
struct DuplicateLinkGraph {
  std::vector<std::string> ids;
  std::vector<std::pair<std::string, std::string>> edges;  // (from, to)
};

/// Undirected connected components of the link graph. Singleton components
/// are left out; each cluster is labeled by its lexicographically smallest id.
ClusterAssignment clusters_from_duplicate_links(const DuplicateLinkGraph& graph);

/// Union-find over 0..n-1 with path halving and union by size.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n);

  std::size_t find(std::size_t x);
  bool unite(std::size_t a, std::size_t b);
  std::size_t size_of(std::size_t x) { return size_[find(x)]; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

}  // namespace va::metrics
