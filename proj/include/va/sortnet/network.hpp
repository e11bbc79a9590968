#pragma once

#include <cstddef>
#include <vector>

namespace va::sortnet {

/// Compare-and-exchange on two wires; the smaller element ends up on `lo`.
struct Comparator {
  std::size_t lo = 0;
  std::size_t hi = 0;

  friend bool operator==(const Comparator&, const Comparator&) = default;
};

/// Comparators on pairwise-disjoint wires, executable in parallel.
struct Layer {
  std::vector<Comparator> comparators;
};

class SortingNetwork {
 public:
  /// Validates wire bounds, lo < hi, and disjointness inside each layer.
  SortingNetwork(std::size_t n, std::vector<Layer> layers);

  std::size_t size() const noexcept { return n_; }
  std::size_t depth() const noexcept { return layers_.size(); }
  std::size_t comparator_count() const noexcept;
  const std::vector<Layer>& layers() const noexcept { return layers_; }

 private:
  std::size_t n_;
  std::vector<Layer> layers_;
};

/// Batcher's bitonic network for n inputs, in ascending single-direction form.
///
/// Built for m = next power of two >= n; wires n..m-1 are treated as +inf
/// sentinels and every comparator touching one is dropped. With all
/// comparators ascending, sentinels never leave the top wires, so the pruned
/// network still sorts. n = 25 gives 171 comparators in 15 layers.
SortingNetwork build_bitonic_network(std::size_t n);

/// Largest n accepted by verify_network.
inline constexpr std::size_t kVerifyMaxInputs = 28;

/// 0-1 principle: true iff the network sorts all 2^n binary inputs.
bool verify_network(const SortingNetwork& net);

/// comparator_count / depth.
double theoretical_speedup(const SortingNetwork& net);

}  // namespace va::sortnet
