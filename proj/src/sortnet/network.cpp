#include "va/sortnet/network.hpp"

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "va/core.hpp"

namespace va::sortnet {

SortingNetwork::SortingNetwork(std::size_t n, std::vector<Layer> layers) : n_(n), layers_(std::move(layers)) {
  std::vector<std::size_t> seen(n_, 0);
  for (std::size_t d = 0; d < layers_.size(); ++d) {
    for (const auto& c : layers_[d].comparators) {
      if (!(c.lo < c.hi && c.hi < n_))
        throw DomainError("comparator (" + std::to_string(c.lo) + ", " + std::to_string(c.hi) +
                          ") invalid for n = " + std::to_string(n_));
      if (seen[c.lo] == d + 1 || seen[c.hi] == d + 1)
        throw DomainError("layer " + std::to_string(d) + " reuses a wire");
      seen[c.lo] = seen[c.hi] = d + 1;
    }
  }
}

std::size_t SortingNetwork::comparator_count() const noexcept {
  std::size_t total = 0;
  for (const auto& l : layers_) total += l.comparators.size();
  return total;
}

SortingNetwork build_bitonic_network(std::size_t n) {
  if (n == 0) throw DomainError("sorting network needs n >= 1");
  const std::size_t m = std::bit_ceil(n);
  std::vector<Layer> layers;

  auto keep = [&](Layer& layer, std::size_t lo, std::size_t hi) {
    if (hi < n) layer.comparators.push_back({lo, hi});
  };

  for (std::size_t block = 2; block <= m; block *= 2) {
    // Merge two sorted halves: the first stage compares mirrored wires, which
    // stands in for reversing the upper half.
    Layer flip;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t offset = i % block;
      if (offset < block / 2) keep(flip, i, i - offset + block - 1 - offset);
    }
    if (!flip.comparators.empty()) layers.push_back(std::move(flip));

    for (std::size_t gap = block / 4; gap >= 1; gap /= 2) {
      Layer half;
      for (std::size_t i = 0; i < m; ++i)
        if ((i & gap) == 0) keep(half, i, i + gap);
      if (!half.comparators.empty()) layers.push_back(std::move(half));
    }
  }
  return SortingNetwork(n, std::move(layers));
}

bool verify_network(const SortingNetwork& net) {
  const std::size_t n = net.size();
  if (n > kVerifyMaxInputs)
    throw DomainError("verify_network enumerates 2^n inputs; n = " + std::to_string(n) + " exceeds the budget of " +
                      std::to_string(kVerifyMaxInputs));
  if (n <= 1) return true;

  // Bit-sliced: wire w holds one bit of 64 inputs at a time. Within a block,
  // lane t is input (block << 6 | t), and wire w carries bit w of that input.
  static constexpr std::uint64_t kLowWires[6] = {0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL, 0xF0F0F0F0F0F0F0F0ULL,
                                                 0xFF00FF00FF00FF00ULL, 0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL};
  const std::uint64_t lane_mask = n >= 6 ? ~std::uint64_t{0} : (std::uint64_t{1} << (std::uint64_t{1} << n)) - 1;
  const std::uint64_t blocks = n > 6 ? std::uint64_t{1} << (n - 6) : 1;
  std::vector<std::uint64_t> wire(n);
  for (std::uint64_t block = 0; block < blocks; ++block) {
    for (std::size_t w = 0; w < n; ++w)
      wire[w] = w < 6 ? kLowWires[w] : ((block >> (w - 6)) & 1U ? ~std::uint64_t{0} : 0);
    for (const auto& layer : net.layers()) {
      for (const auto& c : layer.comparators) {
        const std::uint64_t lo = wire[c.lo], hi = wire[c.hi];
        wire[c.lo] = lo & hi;
        wire[c.hi] = lo | hi;
      }
    }
    // Sorted ascending means no 1 sits below a 0.
    for (std::size_t w = 0; w + 1 < n; ++w)
      if (wire[w] & ~wire[w + 1] & lane_mask) return false;
  }
  return true;
}

double theoretical_speedup(const SortingNetwork& net) {
  if (net.depth() == 0) throw DomainError("theoretical speedup is undefined for an empty network");
  return static_cast<double>(net.comparator_count()) / static_cast<double>(net.depth());
}

}  // namespace va::sortnet
