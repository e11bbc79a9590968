#include "va/metrics/kendall.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>

namespace va::metrics {

RankedPairSample::RankedPairSample(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() != y_.size()) throw DomainError("ranked pair sample needs equal-length variables");
  if (x_.size() < 2) throw DomainError("ranked pair sample needs at least two observations");
}

namespace {

/// Pairs sharing a value within runs of equal keys in sorted order.
template <typename Eq>
std::uint64_t tied_pairs(std::span<const std::size_t> order, Eq equal) {
  std::uint64_t pairs = 0;
  std::uint64_t run = 1;
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (equal(order[i - 1], order[i])) {
      ++run;
    } else {
      pairs += run * (run - 1) / 2;
      run = 1;
    }
  }
  return pairs + run * (run - 1) / 2;
}

/// Stable merge sort of `idx` by y, returning the number of strict inversions.
std::uint64_t count_inversions(std::vector<std::size_t>& idx, std::span<const double> y) {
  const std::size_t n = idx.size();
  std::vector<std::size_t> buf(n);
  std::uint64_t swaps = 0;
  for (std::size_t width = 1; width < n; width *= 2) {
    for (std::size_t lo = 0; lo < n; lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, n), hi = std::min(lo + 2 * width, n);
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (y[idx[j]] < y[idx[i]]) {
          swaps += mid - i;
          buf[k++] = idx[j++];
        } else {
          buf[k++] = idx[i++];
        }
      }
      while (i < mid) buf[k++] = idx[i++];
      while (j < hi) buf[k++] = idx[j++];
    }
    std::swap(idx, buf);
  }
  return swaps;
}

}  // namespace

double kendall_tau_b(const RankedPairSample& sample) {
  const auto x = sample.x();
  const auto y = sample.y();
  const std::size_t n = sample.size();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
  });

  const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  const std::uint64_t tied_x = tied_pairs(order, [&](std::size_t a, std::size_t b) { return x[a] == x[b]; });
  const std::uint64_t tied_xy =
      tied_pairs(order, [&](std::size_t a, std::size_t b) { return x[a] == x[b] && y[a] == y[b]; });

  const std::uint64_t discordant = count_inversions(order, y);
  const std::uint64_t tied_y = tied_pairs(order, [&](std::size_t a, std::size_t b) { return y[a] == y[b]; });

  if (tied_x == total || tied_y == total) throw UndefinedMetric("tau-b is undefined when a variable is all tied");

  // P + Q + T = total - tied_y and P + Q + U = total - tied_x.
  const std::uint64_t concordant = total - tied_x - tied_y + tied_xy - discordant;
  const double numerator = static_cast<double>(concordant) - static_cast<double>(discordant);
  return numerator / std::sqrt(static_cast<double>(total - tied_y) * static_cast<double>(total - tied_x));
}

double sort_quality(std::span<const std::string> output, const std::map<std::string, double, std::less<>>& truth) {
  if (output.size() != truth.size())
    throw DomainError("sort output has " + std::to_string(output.size()) + " ids but " +
                      std::to_string(truth.size()) + " are labeled");
  std::set<std::string_view> seen;
  std::vector<double> position, ordinal;
  position.reserve(output.size());
  ordinal.reserve(output.size());
  for (std::size_t i = 0; i < output.size(); ++i) {
    auto it = truth.find(output[i]);
    if (it == truth.end()) throw DomainError("sort output contains unlabeled id '" + output[i] + "'");
    if (!seen.insert(output[i]).second) throw DomainError("sort output repeats id '" + output[i] + "'");
    position.push_back(static_cast<double>(i));
    ordinal.push_back(it->second);
  }
  return kendall_tau_b(RankedPairSample(std::move(position), std::move(ordinal)));
}

}  // namespace va::metrics
