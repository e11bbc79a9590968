#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "va/oracle/backend.hpp"

namespace va::oracle {

struct SimulatedOracleConfig {
  /// Latent score per id for comparison queries; x beats y iff score(x) > score(y).
  std::unordered_map<std::string, double> scores;
  /// Coordinates per id for triplet queries.
  std::unordered_map<std::string, std::vector<double>> coordinates;
  /// Probability that any single answer is flipped; 0 <= p < 0.5.
  double flip_probability = 0.0;
  std::uint64_t seed = 0;
  /// Modeled latency of one backend call, in seconds.
  double call_latency = 1.0;
  /// Requests served per modeled call; 0 means unlimited.
  std::size_t max_batch = 0;
};

/// Deterministic ground-truth oracle with independent per-answer noise.
///
/// The flip decision for a request is a pure function of (seed, query key,
/// sample index), so answers never depend on call order or thread interleaving.
/// Time is modeled rather than measured: each resolve() costs
/// call_latency * ceil(requests / max_batch).
class SimulatedBackend final : public Backend {
 public:
  explicit SimulatedBackend(SimulatedOracleConfig config);

  BatchResult resolve(std::span<const SampleRequest> requests) override;
  bool independent_samples() const noexcept override { return true; }

  /// Noiseless answer for a query.
  bool truth(const Query& q) const;

  /// Whether the answer for this key gets flipped.
  bool flips(const QueryKey& key) const noexcept;

  const SimulatedOracleConfig& config() const noexcept { return config_; }

 private:
  double score_of(const std::string& id) const;
  const std::vector<double>& coords_of(const std::string& id) const;

  SimulatedOracleConfig config_;
};

}  // namespace va::oracle
