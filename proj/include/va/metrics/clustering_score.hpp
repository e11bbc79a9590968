#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "va/metrics/clusters.hpp"
#include "va/core.hpp"

namespace va::metrics {

/// Normalized average rank of same-cluster members.
///
/// For each item s, every item (s included, at rank 0) is ranked by
/// Euclidean distance to s, ties broken by id. The score averages
/// 1 - rank(s, s') / |S| over co-members s' of s, then over s. Row i of
/// `embedding` belongs to `ids[i]`; every item must sit in a cluster of size >= 2.
template <typename Derived>
double clustering_score(const Eigen::MatrixBase<Derived>& embedding, std::span<const std::string> ids,
                        const ClusterAssignment& clusters) {
  using Scalar = typename Derived::Scalar;
  const auto n = static_cast<std::size_t>(embedding.rows());
  if (ids.size() != n) throw DomainError("embedding rows and ids differ in count");
  if (n < 2) throw DomainError("clustering score needs at least two items");

  std::vector<const std::string*> label(n);
  for (std::size_t i = 0; i < n; ++i) {
    label[i] = &clusters.cluster_of(ids[i]);
    if (clusters.cluster_size(*label[i]) < 2)
      throw DomainError("item '" + ids[i] + "' is in a singleton cluster");
  }

  // Ids sort order, for tie-breaking.
  std::vector<std::size_t> id_rank(n);
  {
    std::vector<std::size_t> by_id(n);
    std::iota(by_id.begin(), by_id.end(), std::size_t{0});
    std::sort(by_id.begin(), by_id.end(), [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
    for (std::size_t r = 0; r < n; ++r) id_rank[by_id[r]] = r;
  }

  const double total = static_cast<double>(n);
  double score = 0.0;
  std::vector<Scalar> dist(n);
  std::vector<std::size_t> order(n);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = 0; t < n; ++t)
      dist[t] = (embedding.row(static_cast<Eigen::Index>(s)) - embedding.row(static_cast<Eigen::Index>(t))).squaredNorm();
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (a == s || b == s) return a == s && b != s;
      return dist[a] < dist[b] || (dist[a] == dist[b] && id_rank[a] < id_rank[b]);
    });

    double inner = 0.0;
    std::size_t members = 0;
    for (std::size_t r = 1; r < n; ++r) {
      if (*label[order[r]] == *label[s]) {
        inner += 1.0 - static_cast<double>(r) / total;
        ++members;
      }
    }
    score += inner / static_cast<double>(members);
  }
  return score / total;
}

}  // namespace va::metrics
