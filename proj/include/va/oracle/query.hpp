#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>

#include "va/core.hpp"

namespace va::oracle {

/// "Does x beat y under the criteria?"
///
/// Queries are lightweight views: they refer to the criteria and items
/// rather than owning them, so the referenced objects must outlive the query.
class ComparisonQuery {
 public:
  ComparisonQuery(const Criteria& criteria, const Item& x, const Item& y);

  const Criteria& criteria() const noexcept { return criteria_.get(); }
  const Item& x() const noexcept { return x_.get(); }
  const Item& y() const noexcept { return y_.get(); }

 private:
  std::reference_wrapper<const Criteria> criteria_;
  std::reference_wrapper<const Item> x_;
  std::reference_wrapper<const Item> y_;
};

/// "Is the anchor closer to cand_y than to cand_z?"
class TripletQuery {
 public:
  TripletQuery(const Criteria& criteria, const Item& anchor, const Item& cand_y,
               const Item& cand_z);

  const Criteria& criteria() const noexcept { return criteria_.get(); }
  const Item& anchor() const noexcept { return anchor_.get(); }
  const Item& cand_y() const noexcept { return cand_y_.get(); }
  const Item& cand_z() const noexcept { return cand_z_.get(); }

 private:
  std::reference_wrapper<const Criteria> criteria_;
  std::reference_wrapper<const Item> anchor_;
  std::reference_wrapper<const Item> cand_y_;
  std::reference_wrapper<const Item> cand_z_;
};

using Query = std::variant<ComparisonQuery, TripletQuery>;

enum class QueryKind : std::uint8_t { comparison, triplet };

/// Canonical cache key. Order-sensitive: (x, y) and (y, x) are distinct keys.
struct QueryKey {
  QueryKind kind = QueryKind::comparison;
  std::uint64_t criteria_digest = 0;
  std::string first;   // x (comparison) or anchor (triplet)
  std::string second;  // y or cand_y
  std::string third;   // empty or cand_z
  std::uint32_t sample = 0;

  friend bool operator==(const QueryKey&, const QueryKey&) = default;

  /// Stable across runs and platforms; drives simulated noise.
  std::uint64_t stable_hash() const noexcept;

  std::string describe() const;
};

struct QueryKeyHash {
  std::size_t operator()(const QueryKey& k) const noexcept {
    return static_cast<std::size_t>(k.stable_hash());
  }
};

QueryKey make_key(const Query& q, std::uint32_t sample);
QueryKind kind_of(const Query& q) noexcept;

}  // namespace va::oracle
