#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "va/oracle/backend.hpp"
#include "va/oracle/cache.hpp"

namespace va::oracle {

/// Number of samples for majority voting. Always odd, so votes never tie.
class VoteConfig {
 public:
  explicit VoteConfig(std::uint32_t k);

  std::uint32_t k() const noexcept { return k_; }

 private:
  std::uint32_t k_;
};

struct OracleStats {
  std::uint64_t queries_issued = 0;  // (query, sample) answers requested, cached or not
  std::uint64_t cache_hits = 0;
  std::uint64_t parse_failures = 0;
  std::uint64_t batch_calls = 0;       // backend resolve() invocations
  std::uint64_t backend_requests = 0;  // samples actually sent to the backend
  double wall_time = 0.0;              // seconds spent in the backend (modeled or measured)
};

struct TimedAnswers {
  std::vector<bool> values;
  double seconds = 0.0;  // backend time attributable to this dispatch
};

/// Lower bound 1 - exp(-K (2p-1)^2 / 2) on the correctness of a K-vote over
/// an oracle that is right with probability p.
double hoeffding_bound(double p, std::uint32_t k);

/// Front end over a backend: caching, batching, statistics and voting.
///
/// Safe to share between threads. Answers are positionally aligned with the
/// input span; duplicate queries inside one batch reach the backend once.
class Oracle {
 public:
  explicit Oracle(std::shared_ptr<Backend> backend,
                  std::shared_ptr<AnswerCache> cache = std::make_shared<AnswerCache>());

  bool answer(const ComparisonQuery& q);
  bool answer(const TripletQuery& q);

  std::vector<bool> answer_batch(std::span<const ComparisonQuery> qs);
  std::vector<bool> answer_batch(std::span<const TripletQuery> qs);

  bool majority_vote(const ComparisonQuery& q, VoteConfig vote);
  bool majority_vote(const TripletQuery& q, VoteConfig vote);

  /// K samples per query, all in a single backend dispatch.
  std::vector<bool> vote_batch(std::span<const ComparisonQuery> qs, VoteConfig vote);
  std::vector<bool> vote_batch(std::span<const TripletQuery> qs, VoteConfig vote);

  /// Positional answers for a mixed span; K = 1 asks sample 0 only.
  std::vector<bool> dispatch(std::span<const Query> qs, VoteConfig vote = VoteConfig(1));
  TimedAnswers dispatch_timed(std::span<const Query> qs, VoteConfig vote = VoteConfig(1));

  OracleStats stats() const;
  Backend& backend() noexcept { return *backend_; }

 private:
  std::shared_ptr<Backend> backend_;
  std::shared_ptr<AnswerCache> cache_;
  mutable std::mutex stats_mutex_;
  OracleStats stats_;
};

}  // namespace va::oracle
