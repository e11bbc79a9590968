#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "support/fakes.hpp"
#include "va/oracle/simulated.hpp"
#include "va/sortnet/network.hpp"
#include "va/sortnet/sort.hpp"

using namespace va;
using namespace va::sortnet;
using va::testing::make_items;

namespace {

struct Fixture {
  std::vector<Item> items;
  std::unordered_map<std::string, double> scores;
  Criteria criteria{"Is X larger than Y?"};

  explicit Fixture(const std::vector<double>& values) : items(make_items(values.size())) {
    for (std::size_t i = 0; i < values.size(); ++i) scores[items[i].id] = values[i];
  }

  std::shared_ptr<oracle::SimulatedBackend> backend(double flip = 0.0, std::uint64_t seed = 0) const {
    oracle::SimulatedOracleConfig cfg;
    for (const auto& [id, s] : scores) cfg.scores.emplace(id, s);
    cfg.flip_probability = flip;
    cfg.seed = seed;
    return std::make_shared<oracle::SimulatedBackend>(cfg);
  }

  /// Ids sorted by score, input order kept among equal scores.
  std::vector<std::string> expected() const {
    std::vector<std::size_t> idx(items.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](auto a, auto b) { return scores.at(items[a].id) < scores.at(items[b].id); });
    std::vector<std::string> out;
    for (auto i : idx) out.push_back(items[i].id);
    return out;
  }

  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    for (const auto& it : items) out.push_back(it.id);
    return out;
  }
};

std::vector<double> shuffled_values(std::size_t n, std::mt19937_64& rng) {
  std::vector<double> v(n);
  std::iota(v.begin(), v.end(), 0.0);
  std::shuffle(v.begin(), v.end(), rng);
  return v;
}

}  // namespace

TEST_CASE("bitonic network shapes") {
  struct Shape {
    std::size_t n, depth, comparators;
  };
  for (auto s : {Shape{1, 0, 0}, Shape{2, 1, 1}, Shape{3, 3, 3}, Shape{4, 3, 6}, Shape{8, 6, 24}, Shape{16, 10, 80},
                 Shape{25, 15, 171}, Shape{32, 15, 240}}) {
    CAPTURE(s.n);
    const auto net = build_bitonic_network(s.n);
    CHECK(net.size() == s.n);
    CHECK(net.depth() == s.depth);
    CHECK(net.comparator_count() == s.comparators);
  }
  CHECK_THROWS_AS(build_bitonic_network(0), DomainError);
  CHECK(theoretical_speedup(build_bitonic_network(25)) == doctest::Approx(171.0 / 15.0));
  CHECK_THROWS_AS(theoretical_speedup(build_bitonic_network(1)), DomainError);
}

TEST_CASE("depth follows k(k+1)/2 for k = ceil(log2 n)") {
  for (std::size_t n = 2; n <= 200; ++n) {
    std::size_t k = 0;
    while ((std::size_t{1} << k) < n) ++k;
    CHECK(build_bitonic_network(n).depth() == k * (k + 1) / 2);
  }
}

TEST_CASE("network construction rejects malformed layers") {
  CHECK_THROWS(SortingNetwork(4, {Layer{{Comparator{0, 1}, Comparator{1, 2}}}}));
  CHECK_THROWS(SortingNetwork(4, {Layer{{Comparator{2, 1}}}}));
  CHECK_THROWS(SortingNetwork(4, {Layer{{Comparator{1, 4}}}}));
  CHECK_NOTHROW(SortingNetwork(4, {Layer{{Comparator{0, 1}, Comparator{2, 3}}}}));
}

namespace {

bool sorts_all_binary_inputs(const SortingNetwork& net) {
  const std::size_t n = net.size();
  for (std::uint64_t input = 0; input < (std::uint64_t{1} << n); ++input) {
    std::vector<int> v(n);
    for (std::size_t w = 0; w < n; ++w) v[w] = static_cast<int>((input >> w) & 1U);
    for (const auto& layer : net.layers())
      for (const auto& c : layer.comparators)
        if (v[c.lo] > v[c.hi]) std::swap(v[c.lo], v[c.hi]);
    if (!std::is_sorted(v.begin(), v.end())) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("0-1 verification accepts bitonic networks and catches broken ones") {
  for (std::size_t n = 1; n <= 16; ++n) CHECK(verify_network(build_bitonic_network(n)));
  CHECK(verify_network(build_bitonic_network(25)));
  // Pruned networks keep some redundant comparators, so compare each
  // single-comparator deletion against per-input simulation.
  for (std::size_t n : {3, 7, 8, 12}) {
    CAPTURE(n);
    const auto net = build_bitonic_network(n);
    std::size_t broken = 0;
    for (std::size_t d = 0; d < net.depth(); ++d)
      for (std::size_t k = 0; k < net.layers()[d].comparators.size(); ++k) {
        auto layers = net.layers();
        layers[d].comparators.erase(layers[d].comparators.begin() + static_cast<std::ptrdiff_t>(k));
        const SortingNetwork cut(n, layers);
        const bool sorts = sorts_all_binary_inputs(cut);
        CHECK(verify_network(cut) == sorts);
        broken += sorts ? 0 : 1;
      }
    CHECK(broken > 0);
  }
  CHECK_THROWS_AS(verify_network(build_bitonic_network(kVerifyMaxInputs + 1)), DomainError);
}

TEST_CASE("perfect oracle: both sorts reproduce ground truth; bitonic uses at most one batch per layer") {
  std::mt19937_64 rng(7);
  for (std::size_t n = 2; n <= 40; ++n) {
    CAPTURE(n);
    Fixture fx(shuffled_values(n, rng));
    const auto net = build_bitonic_network(n);
    oracle::Oracle o1(fx.backend());
    const auto bit = execute_network(net, fx.items, fx.criteria, o1);
    CHECK(bit.order == fx.expected());
    CHECK(bit.layers_executed == net.depth());
    CHECK(bit.comparisons_issued == net.comparator_count());
    // Layers whose pairs are all cached skip the backend.
    CHECK(o1.stats().batch_calls <= net.depth());
    CHECK(o1.stats().queries_issued == bit.comparisons_issued);

    oracle::Oracle o2(fx.backend());
    const auto merge = oracle_merge_sort(fx.items, fx.criteria, o2);
    CHECK(merge.order == fx.expected());
    CHECK(merge.comparisons_issued == o2.stats().queries_issued);
    CHECK(o2.stats().batch_calls == merge.comparisons_issued);
  }
}

TEST_CASE("merge sort is stable under ties") {
  Fixture fx({2, 1, 2, 1, 2, 0, 1});
  oracle::Oracle o(fx.backend());
  CHECK(oracle_merge_sort(fx.items, fx.criteria, o).order == fx.expected());
}

TEST_CASE("any oracle behaviour yields a permutation") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + rng() % 30;
    Fixture fx(shuffled_values(n, rng));
    const double flip = 0.45;
    oracle::Oracle o1(fx.backend(flip, rng()));
    const auto bit = execute_network(build_bitonic_network(n), fx.items, fx.criteria, o1, oracle::VoteConfig(3));
    CHECK(check_permutation_invariance(fx.ids(), bit.order) == InvarianceViolations{});
    oracle::Oracle o2(fx.backend(flip, rng()));
    const auto merge = oracle_merge_sort(fx.items, fx.criteria, o2);
    CHECK(check_permutation_invariance(fx.ids(), merge.order) == InvarianceViolations{});
  }
}

TEST_CASE("voting multiplies comparisons but not batches") {
  Fixture fx({4, 2, 7, 1, 0, 3});
  const auto net = build_bitonic_network(6);
  oracle::Oracle o(fx.backend(0.1, 5));
  const auto out = execute_network(net, fx.items, fx.criteria, o, oracle::VoteConfig(5));
  CHECK(out.comparisons_issued == 5 * net.comparator_count());
  CHECK(o.stats().batch_calls == net.depth());
}

TEST_CASE("invariance counting") {
  const std::vector<std::string> in{"a", "b", "c", "d"};
  CHECK(check_permutation_invariance(in, std::vector<std::string>{"d", "c", "b", "a"}) == InvarianceViolations{});
  const auto v = check_permutation_invariance(in, std::vector<std::string>{"a", "a", "a", "b"});
  CHECK(v.duplicates == 2);
  CHECK(v.missing == 2);
}

TEST_CASE("backend failures name the layer or comparison") {
  Fixture fx({3, 1, 2, 0});
  auto backend = std::make_shared<va::testing::ScriptedBackend>(fx.scores);
  backend->fail_on_call(3);
  oracle::Oracle o(backend);
  try {
    execute_network(build_bitonic_network(4), fx.items, fx.criteria, o);
    FAIL("expected BackendError");
  } catch (const oracle::BackendError& e) {
    CHECK(std::string(e.what()).starts_with("bitonic layer 2"));
  }
  auto backend2 = std::make_shared<va::testing::ScriptedBackend>(fx.scores);
  backend2->fail_on_call(2);
  oracle::Oracle o2(backend2);
  CHECK_THROWS_WITH_AS(oracle_merge_sort(fx.items, fx.criteria, o2), doctest::Contains("merge sort comparison 1"),
                       oracle::BackendError);
}

TEST_CASE("sort outcomes round-trip through JSON") {
  SortOutcome o{{"b", "a"}, 12, 3, 4.5};
  const SortOutcome back = nlohmann::json(o).get<SortOutcome>();
  CHECK(back.order == o.order);
  CHECK(back.comparisons_issued == 12);
  CHECK(back.layers_executed == 3);
  CHECK(back.wall_time == 4.5);
}

TEST_CASE("execute_network checks the item count") {
  Fixture fx({1, 2, 3});
  oracle::Oracle o(fx.backend());
  CHECK_THROWS_AS(execute_network(build_bitonic_network(4), fx.items, fx.criteria, o), DomainError);
}
