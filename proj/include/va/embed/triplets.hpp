#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "va/core.hpp"
#include "va/oracle/oracle.hpp"

namespace va::embed {

/// Indices into the item list. Before answering, `near` and `far` are just
/// the two candidates (y, z); after canonicalization the anchor is known to be
/// closer to `near`.
struct Triplet {
  Eigen::Index anchor = 0;
  Eigen::Index near = 0;
  Eigen::Index far = 0;

  friend bool operator==(const Triplet&, const Triplet&) = default;
};

struct TripletAnswerSet {
  std::vector<Triplet> triplets;
  std::vector<bool> answers;  // true: anchor closer to near than to far
  std::size_t per_item = 0;

  /// Swaps near/far wherever the answer is false, leaving every answer true.
  void canonicalize();
  bool canonical() const;
};

/// n * k triplets; item i anchors k of them with (near, far) drawn uniformly
/// from ordered pairs of distinct non-anchor items. Deterministic in seed.
std::vector<Triplet> sample_triplets(std::size_t n, std::size_t k, std::uint64_t seed);

/// Asks the oracle every triplet in one batch (K samples each when voting).
TripletAnswerSet collect_triplet_answers(oracle::Oracle& oracle, std::span<const Item> items,
                                         const Criteria& criteria, std::vector<Triplet> triplets,
                                         std::size_t per_item, std::optional<oracle::VoteConfig> vote = std::nullopt);

/// JSONL, one `{anchor_id, y_id, z_id, answer}` per line.
void write_triplet_answers(const std::filesystem::path& path, const TripletAnswerSet& tas,
                           std::span<const Item> items);
TripletAnswerSet read_triplet_answers(const std::filesystem::path& path, std::span<const Item> items);

}  // namespace va::embed
