#include <array>
#include <filesystem>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "support/fakes.hpp"
#include "support/oracles.hpp"
#include "va/embed/io.hpp"
#include "va/embed/jaccard.hpp"
#include "va/embed/mds.hpp"
#include "va/embed/triplets.hpp"
#include "va/embed/tste.hpp"
#include "va/metrics/clustering_score.hpp"
#include "va/oracle/simulated.hpp"

using namespace va;
using namespace va::embed;

namespace {

Eigen::MatrixXd random_points(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = g(rng);
  return x;
}

std::vector<std::array<long, 3>> as_arrays(const std::vector<Triplet>& ts) {
  std::vector<std::array<long, 3>> out;
  for (const auto& t : ts) out.push_back({t.anchor, t.near, t.far});
  return out;
}

}  // namespace

TEST_CASE("tokenizer and Jaccard distance") {
  CHECK(tokenize("Hello, World! hello_x") == TokenSet{"hello", "world", "x"});
  CHECK(tokenize("  ...  ").empty());
  CHECK(jaccard_distance(tokenize("a b c"), tokenize("b c d")) == doctest::Approx(0.5));
  CHECK(jaccard_distance({}, {}) == 0.0);
  CHECK(jaccard_distance(tokenize("a"), {}) == 1.0);
  const std::vector<std::string> texts{"red apple", "green apple", "red car", "blue sky"};
  const auto dm = jaccard_distance_matrix(texts);
  CHECK(dm.isApprox(dm.transpose()));
  CHECK(dm.diagonal().isZero());
  CHECK(dm(0, 1) == doctest::Approx(1.0 - 1.0 / 3.0));
  CHECK(dm(0, 3) == 1.0);
}

TEST_CASE("classical MDS reproduces Euclidean geometry and the eigensolver reference") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Eigen::MatrixXd pts = random_points(20, 3, seed);
    const Eigen::MatrixXd dm = va::testing::pairwise_distances(pts);
    const Eigen::MatrixXd emb = classical_mds(dm, 3);
    CHECK((va::testing::pairwise_distances(emb) - dm).cwiseAbs().maxCoeff() < 1e-6);

    const Eigen::MatrixXd ref = va::testing::eigen_mds(dm, 3);
    for (int d = 0; d < 3; ++d) {
      const double sign = emb.col(d).dot(ref.col(d)) < 0 ? -1.0 : 1.0;
      CHECK((emb.col(d) - sign * ref.col(d)).cwiseAbs().maxCoeff() < 1e-5);
    }
  }
}

TEST_CASE("classical MDS on non-Euclidean input keeps the top positive eigenpairs") {
  std::vector<std::string> texts;
  std::mt19937_64 rng(9);
  const char* words[] = {"alpha", "beta", "gamma", "delta", "eps", "zeta", "eta", "theta"};
  for (int i = 0; i < 15; ++i) {
    std::string t;
    for (int w = 0; w < 3; ++w) t += std::string(words[rng() % 8]) + " ";
    texts.push_back(t + "w" + std::to_string(i % 4));
  }
  const auto dm = jaccard_distance_matrix(texts);
  const Eigen::MatrixXd emb = classical_mds(dm, 2);
  const Eigen::MatrixXd ref = va::testing::eigen_mds(dm, 2);
  for (int d = 0; d < 2; ++d) {
    const double sign = emb.col(d).dot(ref.col(d)) < 0 ? -1.0 : 1.0;
    CHECK((emb.col(d) - sign * ref.col(d)).cwiseAbs().maxCoeff() < 1e-5);
  }
}

TEST_CASE("classical MDS domain checks") {
  const Eigen::MatrixXd dm = va::testing::pairwise_distances(random_points(5, 2, 1));
  CHECK_THROWS_AS(classical_mds(dm, 5), DomainError);
  CHECK_THROWS_AS(classical_mds(dm, 0), DomainError);
  CHECK_THROWS_AS(classical_mds(Eigen::MatrixXd(3, 4), 1), DomainError);
  Eigen::MatrixXd bad = dm;
  bad(0, 1) = std::nan("");
  CHECK_THROWS_AS(classical_mds(bad, 2), DomainError);
  // Rank-deficient input leaves the surplus columns at zero.
  const Eigen::MatrixXd line = va::testing::pairwise_distances(random_points(6, 1, 4));
  const Eigen::MatrixXd emb = classical_mds(line, 3);
  CHECK(emb.col(1).norm() < 1e-4);
  CHECK(emb.col(2).norm() < 1e-4);
}

TEST_CASE("triplet sampling") {
  const auto ts = sample_triplets(10, 7, 42);
  CHECK(ts.size() == 70);
  std::vector<int> per_anchor(10, 0);
  for (const auto& t : ts) {
    ++per_anchor[t.anchor];
    CHECK(t.anchor != t.near);
    CHECK(t.anchor != t.far);
    CHECK(t.near != t.far);
    CHECK(t.far < 10);
  }
  for (int c : per_anchor) CHECK(c == 7);
  CHECK(sample_triplets(10, 7, 42) == ts);
  CHECK_FALSE(sample_triplets(10, 7, 43) == ts);
  CHECK_THROWS_AS(sample_triplets(2, 1, 0), DomainError);
  CHECK_THROWS_AS(sample_triplets(5, 0, 0), DomainError);

  // Every ordered candidate pair shows up for a small n.
  std::set<std::pair<long, long>> pairs;
  for (const auto& t : sample_triplets(4, 200, 1))
    if (t.anchor == 0) pairs.emplace(t.near, t.far);
  CHECK(pairs.size() == 6);
}

TEST_CASE("triplet answers: one batch, canonical form, JSONL round trip") {
  const auto items = va::testing::make_items(12);
  oracle::SimulatedOracleConfig cfg;
  for (std::size_t i = 0; i < items.size(); ++i) cfg.coordinates[items[i].id] = {static_cast<double>(i), 0.0};
  auto backend = std::make_shared<oracle::SimulatedBackend>(cfg);
  oracle::Oracle o(backend);
  const Criteria crit("closer?");
  auto tas = collect_triplet_answers(o, items, crit, sample_triplets(items.size(), 5, 3), 5);
  CHECK(o.stats().batch_calls == 1);
  CHECK(o.stats().queries_issued == 60);
  CHECK(tas.per_item == 5);

  const auto path = std::filesystem::temp_directory_path() / "va_test_triplets.jsonl";
  write_triplet_answers(path, tas, items);
  const auto back = read_triplet_answers(path, items);
  CHECK(back.triplets == tas.triplets);
  CHECK(back.answers == tas.answers);
  std::filesystem::remove(path);

  tas.canonicalize();
  CHECK(tas.canonical());
  for (const auto& t : tas.triplets) CHECK(std::abs(t.anchor - t.near) <= std::abs(t.anchor - t.far));
}

TEST_CASE("t-STE objective matches the direct likelihood; gradient matches finite differences") {
  std::mt19937_64 rng(5);
  for (int inst = 0; inst < 5; ++inst) {
    const Eigen::Index n = 9, d = 3;
    const Eigen::MatrixXd x = random_points(n, d, rng());
    const auto ts = sample_triplets(n, 4, rng());
    const double alpha = 2.0;
    const Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic> xl = x.cast<long double>();
    CHECK(tste_objective(x, ts, alpha) ==
          doctest::Approx(static_cast<double>(va::testing::direct_tste_objective(xl, as_arrays(ts), alpha))));

    const auto g = tste_gradient(x, ts, alpha);
    const long double h = 1e-6L;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index k = 0; k < d; ++k) {
        auto plus = xl, minus = xl;
        plus(i, k) += h;
        minus(i, k) -= h;
        const long double fd = (va::testing::direct_tste_objective(plus, as_arrays(ts), alpha) -
                                va::testing::direct_tste_objective(minus, as_arrays(ts), alpha)) /
                               (2 * h);
        CHECK(g(i, k) == doctest::Approx(static_cast<double>(fd)).epsilon(1e-5).scale(1e-3));
      }
  }
}

TEST_CASE("t-STE probability is symmetric and bounded") {
  const Eigen::RowVector2d a(0, 0), b(1, 0), c(2, 0);
  const double p = tste_probability(a, b, c, 1.0);
  CHECK(p > 0.5);
  CHECK(p + tste_probability(a, c, b, 1.0) == doctest::Approx(1.0));
  CHECK(tste_probability(a, b, b, 1.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(tste_probability(a, b, c, 0.0), DomainError);
}

TEST_CASE("t-STE fits planted clusters from noiseless answers") {
  const Eigen::Index n = 30;
  std::vector<std::string> ids;
  std::map<std::string, std::string, std::less<>> labels;
  oracle::SimulatedOracleConfig cfg;
  const auto items = va::testing::make_items(n);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 0.3);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int c = static_cast<int>(i % 3);
    cfg.coordinates[items[i].id] = {c * 5.0 + g(rng), (c == 1 ? 5.0 : 0.0) + g(rng)};
    ids.push_back(items[i].id);
    labels[items[i].id] = "c" + std::to_string(c);
  }
  oracle::Oracle o(std::make_shared<oracle::SimulatedBackend>(cfg));
  const Criteria crit("closer?");
  auto tas = collect_triplet_answers(o, items, crit, sample_triplets(n, 40, 2), 40);
  TsteConfig tc;
  tc.dims = 2;
  tc.seed = 3;
  const auto fit = fit_tste(tas, n, tc);
  // Within-cluster answers hinge on small jitter, so some stay violated.
  CHECK(fit.violation_fraction < 0.1);
  CHECK(fit.iterations > 1);
  CHECK(fit.embedding.rows() == n);
  const double ceiling = 1.0 - 10.0 / (2.0 * 30.0);  // clusters of 10 among 30
  CHECK(metrics::clustering_score(fit.embedding, ids, metrics::ClusterAssignment(labels)) > 0.95 * ceiling);

  // Same seed, same fit.
  const auto again = fit_tste(tas, n, tc);
  CHECK(again.embedding == fit.embedding);
}

TEST_CASE("t-STE configuration checks") {
  TsteConfig tc;
  CHECK(tc.resolved_alpha() == 7.0);
  tc.dims = 1;
  CHECK_THROWS_AS(tc.validate(), DomainError);
  tc.dims = 2;
  tc.alpha = 0.0;
  CHECK_THROWS_AS(tc.validate(), DomainError);
  CHECK_THROWS_AS(fit_tste(TripletAnswerSet{}, 5, TsteConfig{}), DomainError);
  TripletAnswerSet bad;
  bad.triplets = {{0, 1, 9}};
  bad.answers = {true};
  CHECK_THROWS_AS(fit_tste(bad, 5, TsteConfig{}), DomainError);
}

TEST_CASE("embedding JSON round trip") {
  const Eigen::MatrixXd emb = random_points(4, 3, 8);
  const std::vector<std::string> ids{"a", "b", "c", "d"};
  const auto back = embedding_from_json(nlohmann::json::parse(embedding_to_json(emb, ids).dump()));
  CHECK(back.ids == ids);
  CHECK(back.coordinates == emb);
  CHECK_THROWS_AS(embedding_to_json(emb, std::vector<std::string>{"a"}), DomainError);
}
