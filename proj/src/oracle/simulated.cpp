#include "va/oracle/simulated.hpp"

#include <cmath>

namespace va::oracle {

namespace {

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = a[i] - b[i];
    d += t * t;
  }
  return d;
}

}  // namespace

SimulatedBackend::SimulatedBackend(SimulatedOracleConfig config) : config_(std::move(config)) {
  const double p = config_.flip_probability;
  if (!(p >= 0.0 && p < 0.5)) throw DomainError("flip probability must lie in [0, 0.5)");
  if (config_.call_latency < 0.0) throw DomainError("call latency must be non-negative");
  std::size_t dim = 0;
  for (const auto& [id, c] : config_.coordinates) {
    if (dim == 0) dim = c.size();
    if (c.empty() || c.size() != dim) throw DomainError("coordinates for '" + id + "' have inconsistent dimension");
  }
}

double SimulatedBackend::score_of(const std::string& id) const {
  auto it = config_.scores.find(id);
  if (it == config_.scores.end()) throw DomainError("simulated oracle has no ground truth for '" + id + "'");
  return it->second;
}

const std::vector<double>& SimulatedBackend::coords_of(const std::string& id) const {
  auto it = config_.coordinates.find(id);
  if (it == config_.coordinates.end())
    throw DomainError("simulated oracle has no coordinates for '" + id + "'");
  return it->second;
}

bool SimulatedBackend::truth(const Query& q) const {
  if (const auto* c = std::get_if<ComparisonQuery>(&q)) return score_of(c->x().id) > score_of(c->y().id);
  const auto& t = std::get<TripletQuery>(q);
  const auto& a = coords_of(t.anchor().id);
  const double dy = squared_distance(a, coords_of(t.cand_y().id));
  const double dz = squared_distance(a, coords_of(t.cand_z().id));
  if (dy == dz) return t.cand_y().id < t.cand_z().id;
  return dy < dz;
}

bool SimulatedBackend::flips(const QueryKey& key) const noexcept {
  if (config_.flip_probability <= 0.0) return false;
  const std::uint64_t h = hash_combine(splitmix64(config_.seed), key.stable_hash());
  const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
  return u < config_.flip_probability;
}

BatchResult SimulatedBackend::resolve(std::span<const SampleRequest> requests) {
  BatchResult out;
  out.answers.reserve(requests.size());
  for (const auto& r : requests) {
    const bool value = truth(r.query) != flips(make_key(r.query, r.sample));
    const bool yes_no = kind_of(r.query) == QueryKind::comparison;
    out.answers.push_back({value ? (yes_no ? "yes" : "X") : (yes_no ? "no" : "Y"), value, 0});
  }
  double calls = 0.0;
  if (!requests.empty()) {
    calls = config_.max_batch == 0
                ? 1.0
                : std::ceil(static_cast<double>(requests.size()) / static_cast<double>(config_.max_batch));
  }
  out.modeled_seconds = calls * config_.call_latency;
  return out;
}

}  // namespace va::oracle
