#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "va/core.hpp"

namespace va::metrics {

/// Raised when a metric has a zero denominator (e.g. all-tied rankings).
class UndefinedMetric : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Positionally paired ordinal observations, n >= 2.
class RankedPairSample {
 public:
  RankedPairSample(std::vector<double> x, std::vector<double> y);

  std::span<const double> x() const noexcept { return x_; }
  std::span<const double> y() const noexcept { return y_; }
  std::size_t size() const noexcept { return x_.size(); }

 private:
  std::vector<double> x_;
  std::vector<double> y_;
};

/// Kendall tau-b, O(n log n) (Knight's algorithm). Pairs tied on both
/// variables count towards neither tie term.
double kendall_tau_b(const RankedPairSample& sample);

/// tau-b between output positions and ground-truth ordinals. The output must
/// be a permutation of the labeled ids.
double sort_quality(std::span<const std::string> output, const std::map<std::string, double, std::less<>>& truth);

}  // namespace va::metrics
