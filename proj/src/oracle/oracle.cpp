#include "va/oracle/oracle.hpp"

#include <chrono>
#include <cmath>
#include <string>
#include <unordered_map>

namespace va::oracle {

VoteConfig::VoteConfig(std::uint32_t k) : k_(k) {
  if (k == 0 || k % 2 == 0) throw DomainError("vote K must be a positive odd integer, got " + std::to_string(k));
}

double hoeffding_bound(double p, std::uint32_t k) {
  if (!(p > 0.5 && p <= 1.0)) throw DomainError("hoeffding bound needs 0.5 < p <= 1");
  (void)VoteConfig{k};
  const double margin = 2.0 * p - 1.0;
  return 1.0 - std::exp(-static_cast<double>(k) * margin * margin / 2.0);
}

Oracle::Oracle(std::shared_ptr<Backend> backend, std::shared_ptr<AnswerCache> cache)
    : backend_(std::move(backend)), cache_(std::move(cache)) {
  if (!backend_) throw std::invalid_argument("oracle needs a backend");
  if (!cache_) cache_ = std::make_shared<AnswerCache>();
}

std::vector<bool> Oracle::dispatch(std::span<const Query> qs, VoteConfig vote) {
  return dispatch_timed(qs, vote).values;
}

TimedAnswers Oracle::dispatch_timed(std::span<const Query> qs, VoteConfig vote) {
  const std::uint32_t k = vote.k();
  if (k > 1 && !backend_->independent_samples())
    throw DomainError("majority voting needs independent samples (temperature > 0)");

  std::vector<std::uint32_t> trues(qs.size(), 0);
  std::vector<SampleRequest> pending;
  std::vector<QueryKey> pending_keys;
  std::unordered_map<QueryKey, std::size_t, QueryKeyHash> slot;
  std::vector<std::pair<std::size_t, std::size_t>> waiting;  // (query index, pending index)
  std::uint64_t hits = 0;

  for (std::size_t i = 0; i < qs.size(); ++i) {
    for (std::uint32_t s = 0; s < k; ++s) {
      QueryKey key = make_key(qs[i], s);
      if (auto cached = cache_->lookup(key)) {
        trues[i] += *cached ? 1 : 0;
        ++hits;
        continue;
      }
      auto [it, fresh] = slot.try_emplace(key, pending.size());
      if (fresh) {
        pending.push_back({qs[i], s});
        pending_keys.push_back(std::move(key));
      } else {
        ++hits;
      }
      waiting.emplace_back(i, it->second);
    }
  }

  std::uint64_t parse_failures = 0;
  double seconds = 0.0;
  if (!pending.empty()) {
    const auto start = std::chrono::steady_clock::now();
    BatchResult result = backend_->resolve(pending);
    const std::chrono::duration<double> measured = std::chrono::steady_clock::now() - start;
    if (result.answers.size() != pending.size())
      throw BackendError("backend returned " + std::to_string(result.answers.size()) + " answers for " +
                             std::to_string(pending.size()) + " requests",
                         pending_keys.front());
    seconds = result.modeled_seconds.value_or(measured.count());

    std::vector<bool> resolved(pending.size());
    for (std::size_t p = 0; p < pending.size(); ++p) {
      const RawAnswer& a = result.answers[p];
      parse_failures += a.parse_failures;
      resolved[p] = cache_->insert(pending_keys[p], a.text, a.value);
    }
    for (auto [i, p] : waiting) trues[i] += resolved[p] ? 1 : 0;
  }

  {
    std::lock_guard lock(stats_mutex_);
    stats_.queries_issued += static_cast<std::uint64_t>(qs.size()) * k;
    stats_.cache_hits += hits;
    stats_.parse_failures += parse_failures;
    stats_.backend_requests += pending.size();
    stats_.batch_calls += pending.empty() ? 0 : 1;
    stats_.wall_time += seconds;
  }

  TimedAnswers out;
  out.values.resize(qs.size());
  out.seconds = seconds;
  for (std::size_t i = 0; i < qs.size(); ++i) out.values[i] = 2 * trues[i] > k;
  return out;
}

namespace {

template <typename Q>
std::vector<Query> widen(std::span<const Q> qs) {
  return {qs.begin(), qs.end()};
}

}  // namespace

bool Oracle::answer(const ComparisonQuery& q) {
  const Query one[] = {q};
  return dispatch(one).front();
}

bool Oracle::answer(const TripletQuery& q) {
  const Query one[] = {q};
  return dispatch(one).front();
}

std::vector<bool> Oracle::answer_batch(std::span<const ComparisonQuery> qs) { return dispatch(widen(qs)); }

std::vector<bool> Oracle::answer_batch(std::span<const TripletQuery> qs) { return dispatch(widen(qs)); }

bool Oracle::majority_vote(const ComparisonQuery& q, VoteConfig vote) {
  const Query one[] = {q};
  return dispatch(one, vote).front();
}

bool Oracle::majority_vote(const TripletQuery& q, VoteConfig vote) {
  const Query one[] = {q};
  return dispatch(one, vote).front();
}

std::vector<bool> Oracle::vote_batch(std::span<const ComparisonQuery> qs, VoteConfig vote) {
  return dispatch(widen(qs), vote);
}

std::vector<bool> Oracle::vote_batch(std::span<const TripletQuery> qs, VoteConfig vote) {
  return dispatch(widen(qs), vote);
}

OracleStats Oracle::stats() const {
  std::lock_guard lock(stats_mutex_);
  return stats_;
}

}  // namespace va::oracle
