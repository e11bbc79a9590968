#include "va/embed/triplets.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <random>
#include <unordered_map>

namespace va::embed {

void TripletAnswerSet::canonicalize() {
  for (std::size_t t = 0; t < triplets.size(); ++t) {
    if (!answers[t]) {
      std::swap(triplets[t].near, triplets[t].far);
      answers[t] = true;
    }
  }
}

bool TripletAnswerSet::canonical() const {
  return triplets.size() == answers.size() && std::all_of(answers.begin(), answers.end(), [](bool a) { return a; });
}

std::vector<Triplet> sample_triplets(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (n < 3) throw DomainError("triplet sampling needs at least 3 items");
  if (k < 1) throw DomainError("triplet sampling needs k >= 1");
  std::mt19937_64 rng(seed);
  auto draw = [&rng](std::size_t bound) { return static_cast<std::size_t>(bounded_draw(rng(), bound)); };

  std::vector<Triplet> out;
  out.reserve(n * k);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t r = 0; r < k; ++r) {
      // Draw from the index space with the anchor (and then j) removed.
      std::size_t j = draw(n - 1);
      if (j >= i) ++j;
      std::size_t l = draw(n - 2);
      const std::size_t lo = std::min(i, j), hi = std::max(i, j);
      if (l >= lo) ++l;
      if (l >= hi) ++l;
      out.push_back({static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)});
    }
  }
  return out;
}

TripletAnswerSet collect_triplet_answers(oracle::Oracle& oracle, std::span<const Item> items,
                                         const Criteria& criteria, std::vector<Triplet> triplets,
                                         std::size_t per_item, std::optional<oracle::VoteConfig> vote) {
  std::vector<oracle::Query> batch;
  batch.reserve(triplets.size());
  const auto n = static_cast<Eigen::Index>(items.size());
  for (const auto& t : triplets) {
    if (t.anchor >= n || t.near >= n || t.far >= n || t.anchor < 0 || t.near < 0 || t.far < 0)
      throw DomainError("triplet index out of range");
    batch.emplace_back(oracle::TripletQuery(criteria, items[t.anchor], items[t.near], items[t.far]));
  }
  TripletAnswerSet out;
  out.answers = oracle.dispatch(batch, vote.value_or(oracle::VoteConfig(1)));
  out.triplets = std::move(triplets);
  out.per_item = per_item;
  return out;
}

void write_triplet_answers(const std::filesystem::path& path, const TripletAnswerSet& tas,
                           std::span<const Item> items) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (std::size_t t = 0; t < tas.triplets.size(); ++t) {
    const auto& tr = tas.triplets[t];
    nlohmann::json j = {{"anchor_id", items[tr.anchor].id},
                        {"y_id", items[tr.near].id},
                        {"z_id", items[tr.far].id},
                        {"answer", static_cast<bool>(tas.answers[t])}};
    out << j.dump() << '\n';
  }
}

TripletAnswerSet read_triplet_answers(const std::filesystem::path& path, std::span<const Item> items) {
  std::unordered_map<std::string, Eigen::Index> index;
  for (std::size_t i = 0; i < items.size(); ++i) index.emplace(items[i].id, static_cast<Eigen::Index>(i));
  auto lookup = [&](const std::string& id, std::size_t lineno) {
    auto it = index.find(id);
    if (it == index.end())
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": unknown id '" + id + "'");
    return it->second;
  };

  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  TripletAnswerSet tas;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      tas.triplets.push_back({lookup(j.at("anchor_id").get<std::string>(), lineno),
                              lookup(j.at("y_id").get<std::string>(), lineno),
                              lookup(j.at("z_id").get<std::string>(), lineno)});
      tas.answers.push_back(j.at("answer").get<bool>());
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!items.empty()) tas.per_item = tas.triplets.size() / items.size();
  return tas;
}

}  // namespace va::embed
